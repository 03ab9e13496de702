"""Smallest eigenvalue of the energy form over L2(mu)-normalized functions.

lambda1 = inf { integral of (|grad u|^2 + h u^2) dmu : integral of u^2 dmu = 1 }
is the smallest eigenvalue of Q u = lambda M u with Q the form matrix and
M = diag(mu).  The production path is inverse iteration with shift 0 and a
conjugate-gradient inner solve (Q is SPD because h > 0); a dense symmetric
decomposition of M^(-1/2) Q M^(-1/2) serves as an independent oracle for
small graphs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GraphTooLarge, NoConvergence, NonpositivePotential
from .graph import WeightedGraph, as_vertex_function
from .linalg import conjugate_gradient, h_form_matrices

DENSE_ORACLE_CAP = 2000


@dataclass
class EigenResult:
    lambda1: float
    eigenfunction: np.ndarray  # normalized so integral of u^2 dmu = 1
    iterations: int
    residual: float  # relative eigen-residual ||Qu - lambda*Mu|| / ||Qu||


def _potential_values(G, h):
    hv = h.on_graph(G) if hasattr(h, "on_graph") else as_vertex_function(G, h)
    if np.any(hv <= 0.0):
        raise NonpositivePotential("lambda1 needs h > 0 everywhere (H1)")
    return hv


def lambda1(G: WeightedGraph, h, tol: float = 1e-10, max_iter: int = 10000) -> EigenResult:
    """Inverse iteration for the smallest generalized eigenpair of (Q, M).

    Convergence criterion is the relative eigen-residual
    ||Q u - lambda M u|| / ||Q u|| <= tol.  The eigenfunction comes back
    with integral of u^2 dmu = 1 and its largest-magnitude entry positive.
    """
    hv = _potential_values(G, h)
    Q, mu = h_form_matrices(G, hv)
    n = G.n_vertices

    u = np.ones(n)
    u /= np.sqrt(np.dot(mu, u * u))
    lam = float(np.dot(u, Q @ u))
    resid = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        Qu = Q @ u
        resid = float(np.linalg.norm(Qu - lam * mu * u) / np.linalg.norm(Qu))
        if resid <= tol:
            break
        y, _ = conjugate_gradient(Q, mu * u, x0=u / lam, rtol=2e-14)
        u = y / np.sqrt(np.dot(mu, y * y))
        lam = float(np.dot(u, Q @ u))
    else:
        raise NoConvergence(
            f"inverse iteration: residual {resid:.3e} > tol {tol:.3e} "
            f"after {max_iter} iterations"
        )
    k = int(np.argmax(np.abs(u)))
    if u[k] < 0.0:
        u = -u
    return EigenResult(lambda1=lam, eigenfunction=u, iterations=it, residual=resid)


def lambda1_dense_oracle(G: WeightedGraph, h) -> float:
    """Smallest generalized eigenvalue by dense symmetric decomposition.

    Independent of the iterative path: forms M^(-1/2) Q M^(-1/2) densely and
    takes the bottom of its spectrum.  Capped at 2000 vertices.
    """
    if G.n_vertices > DENSE_ORACLE_CAP:
        raise GraphTooLarge(
            f"dense oracle capped at {DENSE_ORACLE_CAP} vertices, got {G.n_vertices}"
        )
    hv = _potential_values(G, h)
    Q, mu = h_form_matrices(G, hv)
    d = 1.0 / np.sqrt(mu)
    S = Q.toarray() * np.outer(d, d)
    S = 0.5 * (S + S.T)
    return float(np.linalg.eigvalsh(S)[0])
