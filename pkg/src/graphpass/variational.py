"""Energy functionals, their gradients, pointwise residuals, and geometry probes.

The action functional on vertex functions is

    J(u) = 1/2 * integral of (|grad u|^2 + h u^2) dmu - integral of F(x,u) dmu

and, with a perturbation present,

    J_eps(u) = J(u) - eps * integral of g u dmu.

Critical points of J are exactly the pointwise solutions of
-Laplace(u) + h u = f(x, u) (+ eps g).  The probes quantify the mountain-pass
geometry: rays along which J drops to -infinity, and spheres in the energy
norm on which J stays above a computable positive margin.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidGrid, NonpositivePotential, NonpositiveRadius, ZeroDirection
from .graph import WeightedGraph, as_vertex_function, gamma, integrate, laplacian, norm_h
from .linalg import h_form_matrices
from .model import PerturbationSource
from .spectral import lambda1 as _lambda1


@dataclass
class EnergyBreakdown:
    """J split into its terms; total = dirichlet + potential - nonlinear - source."""

    dirichlet: float
    potential: float
    nonlinear: float
    source: float
    total: float

    def to_dict(self) -> dict:
        return {
            "dirichlet": self.dirichlet,
            "potential": self.potential,
            "nonlinear": self.nonlinear,
            "source": self.source,
            "total": self.total,
        }


@dataclass
class RayProbe:
    """J sampled along t -> J(t * direction) on an increasing grid."""

    t: np.ndarray
    energies: np.ndarray
    diverging: bool


@dataclass
class RimProbe:
    """J sampled on the energy-norm sphere of the given radius.

    ``tau`` and ``rho`` realize the small-s quadratic bound
    F(x,s) <= ((lambda1 - tau)/2) s^2 on [0, rho] for the power family, via
    tau = lambda1/2 and rho = (lambda1 p / (4 max a))^(1/(p-2)); the bound is
    tight at s = rho.  ``delta`` is the predicted rim margin
    tau r^2 / (4 lambda1), replaced by delta_eps = tau eps / (16 lambda1)
    when a perturbation is present.
    """

    radius: float
    energies: np.ndarray
    min_energy: float
    tau: float
    rho: float
    delta: float
    lambda1: float
    seed: int
    r_eps: float | None = None
    delta_eps: float | None = None


def _hv(G, h):
    values = h.on_graph(G) if hasattr(h, "on_graph") else as_vertex_function(G, h)
    if np.any(values <= 0.0):
        raise NonpositivePotential("energy needs h > 0 everywhere (H1)")
    return values


def energy(G: WeightedGraph, h, nl, u, perturbation: PerturbationSource | None = None
           ) -> EnergyBreakdown:
    """Evaluate J (or J_eps) with its term-by-term breakdown."""
    hv = _hv(G, h)
    u = as_vertex_function(G, u)
    dirichlet = 0.5 * integrate(G, gamma(G, u, u))
    potential = 0.5 * integrate(G, hv * u * u)
    nonlinear = integrate(G, nl.F(u))
    source = 0.0
    if perturbation is not None:
        g = as_vertex_function(G, perturbation.g)
        source = perturbation.eps * integrate(G, g * u)
    return EnergyBreakdown(
        dirichlet=dirichlet,
        potential=potential,
        nonlinear=nonlinear,
        source=source,
        total=dirichlet + potential - nonlinear - source,
    )


def residual(G: WeightedGraph, h, nl, u,
             perturbation: PerturbationSource | None = None) -> np.ndarray:
    """Pointwise defect  -Laplace(u) + h u - f(x,u) - eps g;  zero iff u solves."""
    hv = _hv(G, h)
    u = as_vertex_function(G, u)
    r = -laplacian(G, u) + hv * u - nl.f(u)
    if perturbation is not None:
        r = r - perturbation.eps * as_vertex_function(G, perturbation.g)
    return r


def energy_gradient(G: WeightedGraph, h, nl, u,
                    perturbation: PerturbationSource | None = None) -> np.ndarray:
    """Euclidean gradient of the discrete J: equals mu(x) * residual(x).

    Assembled through the quadratic-form matrix, a route independent of the
    Laplacian stencil used by ``residual``, so the identity between the two
    is a meaningful consistency check rather than a tautology.
    """
    hv = _hv(G, h)
    u = as_vertex_function(G, u)
    Q, mu = h_form_matrices(G, hv)
    grad = Q @ u - mu * nl.f(u)
    if perturbation is not None:
        grad = grad - perturbation.eps * mu * as_vertex_function(G, perturbation.g)
    return grad


def ray_scan(G: WeightedGraph, h, nl, direction, t_max: float, n_points: int,
             perturbation: PerturbationSource | None = None) -> RayProbe:
    """Sample J(t * direction) for t on [0, t_max].

    The divergence flag is a desk-scale witness of the superquadratic drop:
    it is set when the last sample sits below J(0) - 1 and the samples
    decrease strictly from their maximum onward.
    """
    direction = as_vertex_function(G, direction)
    if np.any(direction < 0.0) or not np.any(direction > 0.0):
        raise ZeroDirection("ray direction must be nonnegative and not identically zero")
    if n_points < 2 or not t_max > 0.0:
        raise InvalidGrid("ray grid needs n_points >= 2 and t_max > 0")
    t = np.linspace(0.0, float(t_max), int(n_points))
    energies = np.array([energy(G, h, nl, tk * direction, perturbation).total for tk in t])
    k = int(np.argmax(energies))
    tail_decreasing = k < len(t) - 1 and bool(np.all(np.diff(energies[k:]) < 0.0))
    diverging = bool(energies[-1] < energies[0] - 1.0) and tail_decreasing
    return RayProbe(t=t, energies=energies, diverging=diverging)


def small_s_constants(lam: float, nl) -> tuple[float, float]:
    """(tau, rho) for the power family: F <= ((lambda1-tau)/2) s^2 on [0, rho].

    tau = lambda1/2 and rho = (lambda1 p / (4 max a))^(1/(p-2)) satisfy the
    bound with equality at s = rho.
    """
    tau = 0.5 * lam
    rho = (lam * nl.p / (4.0 * nl.max_a())) ** (1.0 / (nl.p - 2.0))
    return tau, rho


def rim_probe(G: WeightedGraph, h, nl, radius: float, n_samples: int, seed: int,
              perturbation: PerturbationSource | None = None) -> RimProbe:
    """Sample J (or J_eps) on the sphere ||u||_H = radius.

    Directions are seeded standard normal vectors rescaled to the energy
    norm; the sampled minimum is falsifiable evidence for the rim bound, not
    a proof.  With a perturbation, r_eps = sqrt(eps) and
    delta_eps = tau * eps / (16 * lambda1) are reported alongside.
    """
    if not radius > 0.0:
        raise NonpositiveRadius(f"rim radius must be positive, got {radius}")
    if int(n_samples) < 1:
        raise InvalidGrid("rim probe needs n_samples >= 1")
    hv = _hv(G, h)
    lam = _lambda1(G, hv).lambda1
    tau, rho = small_s_constants(lam, nl)
    rng = np.random.default_rng(seed)
    energies = np.empty(int(n_samples))
    for i in range(int(n_samples)):
        d = rng.standard_normal(G.n_vertices)
        u = (radius / norm_h(G, hv, d)) * d
        energies[i] = energy(G, hv, nl, u, perturbation).total
    if perturbation is None:
        delta = tau * radius * radius / (4.0 * lam)
        r_eps = delta_eps = None
    else:
        r_eps = float(np.sqrt(perturbation.eps))
        delta_eps = tau * perturbation.eps / (16.0 * lam)
        delta = delta_eps
    return RimProbe(
        radius=float(radius),
        energies=energies,
        min_energy=float(energies.min()),
        tau=tau,
        rho=rho,
        delta=delta,
        lambda1=lam,
        seed=int(seed),
        r_eps=r_eps,
        delta_eps=delta_eps,
    )
