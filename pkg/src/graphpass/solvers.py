"""Solvers: linear, Newton refinement, mountain pass, and ball minimization.

``mountain_pass_solve`` realizes the min-max value

    c = min over paths from 0 to u*  of  max along the path of J

by deforming a discretized path: the maximum-energy interior node descends
(component orthogonal to the local path direction first), the path is
re-spaced to uniform energy-norm arclength, and the best point on the
polyline near the maximum seeds a damped Newton refinement once its gradient
is small.  ``ball_minimize`` finds the negative-energy local minimizer of the
perturbed functional inside an energy-norm ball; ``solve_perturbed_pair``
composes the two into the two-solution pipeline and certifies distinctness
and the energy ordering J_eps(u0) < 0 < J_eps(uM).

Strict positivity is checked a posteriori, never imposed: a computed
solution with a nonpositive entry raises ``NonpositiveSolution``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.optimize import minimize_scalar

from .errors import (
    GraphpassError,
    NoConvergence,
    NoDivergenceDirection,
    NonnegativeMinimum,
    NonpositiveRadius,
    NonpositiveSolution,
    NotDistinct,
    BoundaryContact,
    PerturbationRequired,
    SingularJacobian,
)
from .graph import WeightedGraph, as_vertex_function, norm_h
from .linalg import conjugate_gradient, h_form_matrices
from .model import PerturbationSource
from .variational import energy, energy_gradient, ray_scan, residual


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances, iteration caps, path discretization, and seeds."""

    tol: float = 1e-10          # residual inf-norm accepted as "solution"
    gtol: float = 1e-5          # gradient norm that hands over to Newton
    max_iter: int = 10000       # deformation / descent iteration cap
    newton_max_iter: int = 100
    path_nodes: int = 21        # >= 3
    ray_t_max: float = 10.0
    ray_points: int = 201
    distinct_tol: float = 1e-3  # inf-norm separating the perturbed pair
    seed: int = 42
    base_vertex: str | None = None  # ray direction vertex; graph's first if None


@dataclass
class PathState:
    """Discretized path from 0 to the far endpoint, with node energies.

    ``max_energy_trace`` records the max-node energy after each accepted
    deformation iteration; it is non-increasing by construction.
    """

    nodes: list
    energies: np.ndarray
    max_index: int
    max_energy_trace: list = field(default_factory=list)


@dataclass
class SolveOutcome:
    solution: np.ndarray
    energy: float
    residual_inf: float
    iterations: int
    classification: str  # mountain_pass | local_min | linear | newton | trivial
    min_value: float
    path: PathState | None = None


# ------------------------------------------------------------ linear solve

def solve_linear(G: WeightedGraph, h, g, tol: float = 1e-10) -> np.ndarray:
    """Solve -Laplace(v) + h v = g to ||defect||_inf <= tol.

    The system Q v = mu*g is SPD, so conjugate gradients apply.  When
    g >= 0 and g is not identically zero, the solution satisfies
    integral of g v dmu = ||v||_H^2 > 0; callers can audit that identity
    directly from the returned vector.
    """
    hv = h.on_graph(G) if hasattr(h, "on_graph") else as_vertex_function(G, h)
    g = as_vertex_function(G, g)
    Q, mu = h_form_matrices(G, hv)
    b = mu * g
    v, _ = conjugate_gradient(
        Q, b, converged=lambda r: float(np.max(np.abs(r / mu))) <= tol
    )
    defect = float(np.max(np.abs((b - Q @ v) / mu)))
    if defect > tol:
        raise NoConvergence(f"linear solve stalled at defect {defect:.3e} > tol {tol:.3e}")
    return v


# --------------------------------------------------------- newton refinement

def newton_refine(G: WeightedGraph, h, nl, u0,
                  perturbation: PerturbationSource | None = None,
                  tol: float = 1e-10, max_iter: int = 100) -> SolveOutcome:
    """Damped Newton iteration on the pointwise residual.

    The Jacobian of the mu-scaled residual is Q - diag(mu * f_s(x, u)); steps
    are halved until the residual inf-norm decreases.  Converging to the zero
    function is reported with classification "trivial", not as an error.
    """
    hv = h.on_graph(G) if hasattr(h, "on_graph") else as_vertex_function(G, h)
    u = as_vertex_function(G, u0).copy()
    Q, mu = h_form_matrices(G, hv)

    r = residual(G, hv, nl, u, perturbation)
    rnorm = float(np.max(np.abs(r)))
    it = 0
    while rnorm > tol:
        if it >= max_iter:
            raise NoConvergence(
                f"Newton: residual {rnorm:.3e} > tol {tol:.3e} after {max_iter} iterations"
            )
        it += 1
        J = (Q - sp.diags(mu * nl.f_prime(u))).tocsc()
        try:
            step = spla.splu(J).solve(-(mu * r))
        except RuntimeError as exc:
            raise SingularJacobian(f"Newton linearization failed: {exc}") from exc
        if not np.all(np.isfinite(step)):
            raise SingularJacobian("Newton step is not finite")
        alpha = 1.0
        while alpha >= 1e-14:
            cand = u + alpha * step
            r_cand = residual(G, hv, nl, cand, perturbation)
            if float(np.max(np.abs(r_cand))) <= (1.0 - 1e-4 * alpha) * rnorm:
                u, r = cand, r_cand
                rnorm = float(np.max(np.abs(r)))
                break
            alpha *= 0.5
        else:
            raise NoConvergence(
                f"Newton line search stalled at residual {rnorm:.3e}"
            )
    cls = "trivial" if not np.any(u != 0.0) else "newton"
    return SolveOutcome(
        solution=u,
        energy=energy(G, hv, nl, u, perturbation).total,
        residual_inf=rnorm,
        iterations=it,
        classification=cls,
        min_value=float(u.min()),
    )


# ----------------------------------------------------------- mountain pass

def _armijo(J, x, Jx, d, slope, scale):
    """Backtrack x - alpha*d until J decreases enough; None if no step works."""
    alpha = scale / max(float(np.linalg.norm(d)), 1e-300)
    for _ in range(60):
        cand = x - alpha * d
        Jc = J(cand)
        if Jc <= Jx - 1e-4 * alpha * slope:
            return cand, Jc
        alpha *= 0.5
    return None


def _segment_max(J, a, b):
    """Maximize J on the segment [a, b]; returns (point, value)."""
    res = minimize_scalar(
        lambda s: -J(a + s * (b - a)), bounds=(0.0, 1.0), method="bounded",
        options={"xatol": 1e-12},
    )
    s = float(res.x)
    point = a + s * (b - a)
    return point, J(point)


def _polyline_max(J, path, m, E):
    """Best point on the two segments adjacent to node m (read-only)."""
    best, best_val = path[m], E[m]
    for a, b in ((path[m - 1], path[m]), (path[m], path[m + 1])):
        point, val = _segment_max(J, a, b)
        if val > best_val:
            best, best_val = point, val
    return best, best_val


def _respace(path, seg_norm):
    """Redistribute interior nodes to uniform arclength along the polyline."""
    lengths = np.array([seg_norm(path[k + 1] - path[k]) for k in range(len(path) - 1)])
    total = float(lengths.sum())
    if total <= 0.0:
        return path
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    targets = np.linspace(0.0, total, len(path))
    out = [path[0]]
    for t in targets[1:-1]:
        k = int(np.searchsorted(cum, t, side="right") - 1)
        k = min(k, len(path) - 2)
        frac = 0.0 if lengths[k] == 0.0 else (t - cum[k]) / lengths[k]
        out.append(path[k] + frac * (path[k + 1] - path[k]))
    out.append(path[-1])
    return out


def mountain_pass_solve(G: WeightedGraph, h, nl,
                        perturbation: PerturbationSource | None = None,
                        config: SolverConfig | None = None) -> SolveOutcome:
    """Numerical min-max search for a positive mountain-pass solution.

    The far endpoint is the first ray point with J < -1 along the indicator
    of the base vertex (the superquadratic growth guarantees one exists).
    Deformation terminates when the gradient at the polyline maximum drops
    below ``gtol``; damped Newton then drives the residual to ``tol``.
    """
    cfg = config or SolverConfig()
    if cfg.path_nodes < 3:
        raise GraphpassError("path needs at least 3 nodes")
    hv = h.on_graph(G) if hasattr(h, "on_graph") else as_vertex_function(G, h)
    n = G.n_vertices

    base = cfg.base_vertex if cfg.base_vertex is not None else G.vertex_ids[0]
    if base not in G.index:
        raise GraphpassError(f"base vertex {base!r} not in graph")
    direction = np.zeros(n)
    direction[G.index[base]] = 1.0

    t_max = cfg.ray_t_max
    t_star = None
    for _ in range(8):
        probe = ray_scan(G, hv, nl, direction, t_max, cfg.ray_points, perturbation)
        below = np.nonzero(probe.energies < -1.0)[0]
        if below.size:
            t_star = float(probe.t[below[0]])
            break
        t_max *= 2.0
    if t_star is None:
        raise NoDivergenceDirection(
            f"no ray point with J < -1 up to t = {t_max:.3g}"
        )
    u_star = t_star * direction

    def J(u):
        return energy(G, hv, nl, u, perturbation).total

    def grad(u):
        return energy_gradient(G, hv, nl, u, perturbation)

    def seg_norm(v):
        return norm_h(G, hv, v)

    N = cfg.path_nodes
    path = [(k / (N - 1)) * u_star for k in range(N)]
    E = np.array([J(x) for x in path])

    def descend_node(m):
        """One Armijo step at node m, orthogonal component first; None if stuck."""
        g = grad(path[m])
        tangent = path[m + 1] - path[m - 1]
        tn = float(np.linalg.norm(tangent))
        step_scale = 0.5 * min(seg_norm(path[m] - path[m - 1]),
                               seg_norm(path[m + 1] - path[m])) + 1e-30
        if tn > 0.0:
            that = tangent / tn
            g_perp = g - np.dot(g, that) * that
            slope = float(np.dot(g, g_perp))
            if slope > 0.0:
                moved = _armijo(J, path[m], E[m], g_perp, slope, step_scale)
                if moved is not None:
                    return moved
        slope = float(np.dot(g, g))
        if slope > 0.0:
            return _armijo(J, path[m], E[m], g, slope, step_scale)
        return None

    seed_point = None
    deform_iters = 0
    best_max = np.inf
    plateau = 0
    trace = [float(E.max())]
    for _ in range(cfg.max_iter):
        deform_iters += 1
        m = 1 + int(np.argmax(E[1:-1]))
        point, point_val = _polyline_max(J, path, m, E)
        if point_val <= 1e-12:
            raise NoConvergence(
                "path maximum is not positive: mountain geometry collapsed "
                "(for the perturbed problem this signals eps at or above the "
                "instance threshold)"
            )
        gp = grad(point)
        if float(np.linalg.norm(gp)) <= cfg.gtol:
            seed_point = point
            break
        # Plateau: the discrete min-max estimate has stopped improving, so
        # further steepest descent is wasted effort; Newton finishes the job
        # from the polyline maximum.
        if point_val < best_max - 1e-9 * (1.0 + abs(best_max)):
            best_max, plateau = point_val, 0
        else:
            plateau += 1
            if plateau >= 25:
                seed_point = point
                break

        # Pull the max node downhill until another node takes over the max.
        stuck = True
        for _ in range(50):
            moved = descend_node(m)
            if moved is None:
                break
            stuck = False
            path[m], E[m] = moved
            if 1 + int(np.argmax(E[1:-1])) != m:
                break
        if stuck:
            # The max node cannot descend at all; take the polyline point as
            # the Newton seed even though its gradient is above gtol.
            seed_point = point
            break

        respaced = _respace(path, seg_norm)
        E_new = np.array([J(x) for x in respaced])
        if E_new.max() <= E.max() + 1e-12 * (1.0 + abs(E.max())):
            path, E = respaced, E_new
        trace.append(float(E.max()))
    if seed_point is None:
        raise NoConvergence(
            f"path deformation: gradient above gtol {cfg.gtol:.3g} "
            f"after {cfg.max_iter} iterations"
        )

    refined = newton_refine(G, hv, nl, seed_point, perturbation,
                            tol=cfg.tol, max_iter=cfg.newton_max_iter)
    if refined.min_value <= 0.0:
        raise NonpositiveSolution(
            f"mountain-pass refinement gives min u = {refined.min_value:.3e}; "
            "not a strictly positive solution"
        )
    if refined.energy <= 0.0:
        raise NoConvergence(
            f"refined point has energy {refined.energy:.3e} <= 0; "
            "Newton left the mountain-pass regime"
        )
    state = PathState(nodes=path, energies=E, max_index=1 + int(np.argmax(E[1:-1])),
                      max_energy_trace=trace)
    return replace(
        refined,
        classification="mountain_pass",
        iterations=deform_iters + refined.iterations,
        path=state,
    )


# --------------------------------------------------------- ball minimization

def ball_minimize(G: WeightedGraph, h, nl,
                  perturbation: PerturbationSource | None, radius: float,
                  config: SolverConfig | None = None) -> SolveOutcome:
    """Minimize the perturbed functional over the energy-norm ball.

    Starts from a small multiple of the linear solution v of
    -Laplace(v) + h v = g, which is a descent direction at 0; runs projected
    gradient descent inside the ball, then Newton.  A minimizer pinned to the
    boundary (within 1e-6 of the radius) contradicts the small-ball picture
    and raises ``BoundaryContact``.
    """
    if perturbation is None:
        raise PerturbationRequired("ball minimization needs eps > 0 and a source g")
    if not radius > 0.0:
        raise NonpositiveRadius(f"ball radius must be positive, got {radius}")
    cfg = config or SolverConfig()
    hv = h.on_graph(G) if hasattr(h, "on_graph") else as_vertex_function(G, h)

    def J(u):
        return energy(G, hv, nl, u, perturbation).total

    def grad(u):
        return energy_gradient(G, hv, nl, u, perturbation)

    def project(u):
        un = norm_h(G, hv, u)
        return u if un <= radius else (radius / un) * u

    v = solve_linear(G, hv, perturbation.g, tol=cfg.tol)
    vH = norm_h(G, hv, v)
    t = 0.5 * radius / vH
    for _ in range(200):
        if J(t * v) < 0.0:
            break
        t *= 0.5
    else:
        raise NonnegativeMinimum(
            "no negative-energy point along the linear-solution ray; "
            "eps too large or g degenerate"
        )

    u = t * v
    Ju = J(u)
    alpha = 1.0
    it = 0
    for it in range(1, cfg.max_iter + 1):
        g = grad(u)
        uH = norm_h(G, hv, u)
        interior = uH < radius * (1.0 - 1e-9)
        if interior and float(np.linalg.norm(g)) <= cfg.gtol:
            break
        stepped = False
        a = alpha
        for _ in range(80):
            cand = project(u - a * g)
            Jc = J(cand)
            disp = cand - u
            if Jc <= Ju - 1e-4 / max(a, 1e-300) * float(np.dot(disp, disp)) \
                    and Jc < Ju:
                u, Ju = cand, Jc
                alpha = min(a * 2.0, 1e6)
                stepped = True
                break
            a *= 0.5
        if not stepped:
            if not interior:
                raise BoundaryContact(
                    f"descent pinned on the ball boundary ||u||_H = {uH:.6g} "
                    f"(radius {radius:.6g}); eps too large for the small-ball regime"
                )
            raise NoConvergence("projected descent stalled in the ball interior")
    else:
        raise NoConvergence(
            f"projected descent: gradient above gtol after {cfg.max_iter} iterations"
        )

    refined = newton_refine(G, hv, nl, u, perturbation,
                            tol=cfg.tol, max_iter=cfg.newton_max_iter)
    uH = norm_h(G, hv, refined.solution)
    if uH >= radius * (1.0 - 1e-6):
        raise BoundaryContact(
            f"minimizer sits on the ball boundary: ||u||_H = {uH:.6g}, radius {radius:.6g}"
        )
    if refined.energy >= 0.0:
        raise NonnegativeMinimum(
            f"ball minimum has energy {refined.energy:.3e} >= 0"
        )
    if refined.min_value <= 0.0:
        raise NonpositiveSolution(
            f"ball minimizer gives min u = {refined.min_value:.3e}; "
            "not a strictly positive solution"
        )
    return replace(refined, classification="local_min",
                   iterations=it + refined.iterations)


# ------------------------------------------------------------ the pipeline

def solve_perturbed_pair(G: WeightedGraph, h, nl, g, eps: float,
                         config: SolverConfig | None = None
                         ) -> tuple[SolveOutcome, SolveOutcome]:
    """Two distinct strictly positive solutions of the perturbed equation.

    Returns (minimizer, mountain_pass) with J_eps(u0) < 0 < J_eps(uM).
    Component failures propagate; coinciding solutions raise ``NotDistinct``,
    which signals eps at or above this instance's threshold.
    """
    cfg = config or SolverConfig()
    pert = PerturbationSource(np.asarray(g, dtype=np.float64), float(eps))
    radius = 2.0 * float(np.sqrt(pert.eps))
    out_min = ball_minimize(G, h, nl, pert, radius, cfg)
    out_mp = mountain_pass_solve(G, h, nl, pert, cfg)
    gap = float(np.max(np.abs(out_mp.solution - out_min.solution)))
    if gap <= cfg.distinct_tol:
        raise NotDistinct(
            f"solutions coincide to {gap:.3e} <= distinct_tol {cfg.distinct_tol:.3e}; "
            "eps is at or above the threshold for this instance"
        )
    return out_min, out_mp
