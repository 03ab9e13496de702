"""A posteriori certification of computed solutions.

A certificate records everything needed to audit a claimed solution without
rerunning the solver: residual norms, the weak-form defect swept over the
canonical test basis, strict positivity, the energy breakdown, lambda1, the
hypothesis report, and provenance digests of the inputs.

On a finite graph the indicator test functions e_x / mu(x) span the whole
space, so the weak formulation and the pointwise equation agree exactly:
``weak_form_max`` must reproduce ``residual_inf`` up to rounding.  The two
are computed through independent routes (gradient-form sums versus the
Laplacian stencil), which makes the agreement a real check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import WeightedGraph, as_vertex_function, gamma, integrate
from .model import HypothesisReport, PerturbationSource, check_hypotheses
from .spectral import lambda1 as _lambda1
from .variational import EnergyBreakdown, energy, residual


@dataclass
class SolutionCertificate:
    residual_inf: float
    residual_l2: float      # sqrt of integral of residual^2 dmu
    min_value: float
    positive: bool
    energy: EnergyBreakdown
    weak_form_max: float
    hypothesis_report: HypothesisReport
    lambda1: float
    embedding_check: bool
    provenance: dict

    def to_dict(self) -> dict:
        return {
            "residual_inf": self.residual_inf,
            "residual_l2": self.residual_l2,
            "min_value": self.min_value,
            "positive": self.positive,
            "energy": self.energy.to_dict(),
            "weak_form_max": self.weak_form_max,
            "lambda1": self.lambda1,
            "embedding_check": self.embedding_check,
            "hypotheses": self.hypothesis_report.to_dict(),
            "provenance": self.provenance,
        }


def weak_form_defects(G: WeightedGraph, h, nl, u,
                      perturbation: PerturbationSource | None = None) -> np.ndarray:
    """Weak-form defect against each scaled indicator test function.

    For phi_x = e_x / mu(x) the defect is
    | <u, phi_x>_H - integral of f(x,u) phi_x dmu - eps * integral of g phi_x dmu |,
    evaluated through the gradient form, not the Laplacian stencil.  Cost is
    O(n * m); certification is a per-solution operation, not an inner loop.
    """
    hv = h.on_graph(G) if hasattr(h, "on_graph") else as_vertex_function(G, h)
    u = as_vertex_function(G, u)
    fu = nl.f(u)
    eg = np.zeros(G.n_vertices)
    if perturbation is not None:
        eg = perturbation.eps * as_vertex_function(G, perturbation.g)
    out = np.empty(G.n_vertices)
    for x in range(G.n_vertices):
        phi = np.zeros(G.n_vertices)
        phi[x] = 1.0 / G.mu[x]
        pairing = integrate(G, gamma(G, u, phi) + hv * u * phi)
        out[x] = pairing - integrate(G, (fu + eg) * phi)
    return out


def embedding_inequalities_hold(G: WeightedGraph, u, rtol: float = 1e-12) -> bool:
    """max|u| <= mu_min^-1 * integral of |u| dmu  and
    max|u| <= mu_min^-1/2 * (integral of u^2 dmu)^1/2, with rounding slack."""
    u = as_vertex_function(G, u)
    m = float(np.max(np.abs(u))) if u.size else 0.0
    slack = 1.0 + rtol
    l1 = integrate(G, np.abs(u)) / G.mu_min
    l2 = float(np.sqrt(integrate(G, u * u) / G.mu_min))
    return m <= l1 * slack and m <= l2 * slack


def certify(G: WeightedGraph, h, nl, u,
            perturbation: PerturbationSource | None = None, *,
            mode: str = "H2", provenance: dict | None = None) -> SolutionCertificate:
    """Build the full certificate for a claimed solution u."""
    u = as_vertex_function(G, u)
    r = residual(G, h, nl, u, perturbation)
    res_inf = float(np.max(np.abs(r)))
    res_l2 = float(np.sqrt(integrate(G, r * r)))
    weak_max = float(np.max(np.abs(weak_form_defects(G, h, nl, u, perturbation))))
    lam = _lambda1(G, h).lambda1
    report = check_hypotheses(G, h, nl, mode, lambda1=lam)
    min_value = float(u.min())
    return SolutionCertificate(
        residual_inf=res_inf,
        residual_l2=res_l2,
        min_value=min_value,
        positive=bool(min_value > 0.0),
        energy=energy(G, h, nl, u, perturbation),
        weak_form_max=weak_max,
        hypothesis_report=report,
        lambda1=lam,
        embedding_check=embedding_inequalities_hold(G, u),
        provenance=provenance or {},
    )
