"""Problem data: potential h, nonlinearity f with primitive F, perturbation eps*g.

The nonlinearity registry ships the superquadratic power family

    f(x, s) = a(x) * s^(p-1)  for s > 0,      f(x, s) = 0  for s <= 0,
    F(x, s) = a(x) * s^p / p  for s > 0,      F(x, s) = 0  for s <= 0,

with exponent p > 2 and coefficient a(x) >= a0 > 0.  Cutting f off below
zero is built in: every computed critical point is then automatically
nonnegative, and on a connected graph strictly positive, which is exactly
the property the solvers certify a posteriori.

``check_hypotheses`` turns the standing assumptions on h and f into runnable
checks with numeric witnesses.  Checks that a finite graph cannot decide
(behavior of h at infinity) come back as advisory trends, never as proofs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    GraphpassError,
    InvalidExponent,
    InvalidSource,
    MissingDistanceBase,
    NonpositivePotential,
    PerturbationRequired,
)
from .graph import WeightedGraph, as_vertex_function, hop_distances, integrate


# ------------------------------------------------------------- potential

class Potential:
    """Potential h, either a per-vertex table or the profile h0 + c*dist(x,x0)^alpha.

    Profile distances are unweighted hop counts from the base vertex ``x0``.
    Either way h(x) >= h0 > 0 must hold; evaluation raises
    NonpositivePotential otherwise.
    """

    def __init__(self, *, table=None, h0=None, c=0.0, alpha=0.0, x0=None):
        if (table is None) == (h0 is None):
            raise GraphpassError("give either table=... or a profile h0=...")
        if table is not None:
            self.table = np.asarray(table, dtype=np.float64)
            if not np.all(np.isfinite(self.table)) or np.any(self.table <= 0.0):
                raise NonpositivePotential("potential table must be positive and finite")
            self.h0 = self.c = self.alpha = self.x0 = None
        else:
            self.table = None
            self.h0, self.c, self.alpha, self.x0 = float(h0), float(c), float(alpha), x0
            if not self.h0 > 0.0:
                raise NonpositivePotential("profile needs h0 > 0")
            if self.c < 0.0 or self.alpha < 0.0:
                raise NonpositivePotential("profile needs c >= 0 and alpha >= 0")

    @classmethod
    def constant(cls, value: float) -> "Potential":
        return cls(h0=value)

    def base_vertex(self):
        return None if self.table is not None else self.x0

    def on_graph(self, G: WeightedGraph) -> np.ndarray:
        if self.table is not None:
            return as_vertex_function(G, self.table)
        x0 = self.x0 if self.x0 is not None else G.vertex_ids[0]
        if self.c == 0.0:
            return np.full(G.n_vertices, self.h0)
        dist = hop_distances(G, x0)
        if np.any(dist < 0):
            raise GraphpassError(
                "potential profile undefined: some vertices unreachable from x0"
            )
        return self.h0 + self.c * dist.astype(np.float64) ** self.alpha

    def to_dict(self) -> dict:
        if self.table is not None:
            return {"table": [float(v) for v in self.table]}
        prof = {"h0": self.h0, "c": self.c, "alpha": self.alpha}
        if self.x0 is not None:
            prof["x0"] = self.x0
        return {"profile": prof}

    @classmethod
    def from_dict(cls, data: dict) -> "Potential":
        if "table" in data:
            return cls(table=data["table"])
        if "profile" in data:
            return cls(**data["profile"])
        raise GraphpassError("potential needs 'table' or 'profile'")


# ---------------------------------------------------------- nonlinearity

class PowerNonlinearity:
    """The power family; the Ambrosetti-Rabinowitz constant is theta = p."""

    family = "power"

    def __init__(self, p: float, a=1.0):
        p = float(p)
        if not p > 2.0:
            raise InvalidExponent(f"power exponent must exceed 2, got {p}")
        self.p = p
        self.a = np.asarray(a, dtype=np.float64)
        if self.a.ndim not in (0, 1):
            raise GraphpassError("coefficient a must be scalar or per-vertex")
        if not np.all(np.isfinite(self.a)) or np.any(self.a <= 0.0):
            raise GraphpassError("coefficient a must be positive and finite")

    @property
    def theta(self) -> float:
        return self.p

    def _eval(self, s, expo, factor, x):
        """factor * a * s^expo on s > 0, zero elsewhere; safe for fractional expo.

        With ``x`` given, a(x) is used; otherwise a broadcasts, so a per-vertex
        table requires a vertex-aligned ``s``.
        """
        if x is not None:
            a = float(self.a) if self.a.ndim == 0 else float(self.a[x])
        elif self.a.ndim == 0:
            a = float(self.a)
        else:
            a = self.a
        if np.isscalar(s):
            return factor * float(np.asarray(a)) * s ** expo if s > 0.0 else 0.0
        arr = np.asarray(s, dtype=np.float64)
        if isinstance(a, np.ndarray) and a.shape != arr.shape:
            raise GraphpassError("per-vertex coefficient needs a vertex-aligned argument")
        out = np.zeros_like(arr)
        m = arr > 0.0
        av = a[m] if isinstance(a, np.ndarray) else a
        out[m] = factor * av * arr[m] ** expo
        return out

    def f(self, s, x: int | None = None):
        """f(x, s); pass ``x`` to pick one vertex's coefficient."""
        return self._eval(s, self.p - 1.0, 1.0, x)

    def F(self, s, x: int | None = None):
        """Primitive of f in s, F(x, s) = integral of f(x, t) dt from 0 to s."""
        return self._eval(s, self.p, 1.0 / self.p, x)

    def f_prime(self, s, x: int | None = None):
        """d f / d s; one-sided value 0 at s = 0 (valid since p > 2)."""
        return self._eval(s, self.p - 2.0, self.p - 1.0, x)

    def max_a(self) -> float:
        return float(np.max(self.a))

    def a_on(self, G: WeightedGraph) -> np.ndarray:
        if self.a.ndim == 0:
            return np.full(G.n_vertices, float(self.a))
        return as_vertex_function(G, self.a)

    def to_dict(self) -> dict:
        a = float(self.a) if self.a.ndim == 0 else [float(v) for v in self.a]
        return {"family": "power", "p": self.p, "a": a}


NONLINEARITY_FAMILIES = {
    "power": lambda d: PowerNonlinearity(d["p"], d.get("a", 1.0)),
}


def nonlinearity_from_dict(data: dict):
    family = data.get("family")
    if family not in NONLINEARITY_FAMILIES:
        raise GraphpassError(f"unknown nonlinearity family {family!r}")
    return NONLINEARITY_FAMILIES[family](data)


# ---------------------------------------------------------- perturbation

@dataclass(frozen=True)
class PerturbationSource:
    """Right-hand perturbation eps * g with g >= 0, g not identically 0, eps > 0."""

    g: np.ndarray
    eps: float

    def __post_init__(self):
        g = np.asarray(self.g, dtype=np.float64)
        if not np.all(np.isfinite(g)) or np.any(g < 0.0):
            raise InvalidSource("g must be nonnegative and finite")
        if not np.any(g > 0.0):
            raise InvalidSource("g must not vanish identically")
        if not (np.isfinite(self.eps) and self.eps > 0.0):
            raise PerturbationRequired(f"eps must be positive, got {self.eps}")
        object.__setattr__(self, "g", g)

    def to_dict(self) -> dict:
        return {"eps": self.eps, "g": {"table": [float(v) for v in self.g]}}


# ------------------------------------------------------------ hypotheses

@dataclass
class HypothesisCheck:
    name: str
    status: str  # holds | fails | advisory
    witness: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"status": self.status, "witness": self.witness}


@dataclass
class HypothesisReport:
    mode: str
    lambda1: float
    checks: dict

    def __getitem__(self, name: str) -> HypothesisCheck:
        return self.checks[name]

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "lambda1": self.lambda1,
            "checks": {k: v.to_dict() for k, v in self.checks.items()},
        }


def _shell_table(G, values, dist):
    radii = np.arange(int(dist.max()) + 1)
    return [
        {"radius": int(r), "value": float(values[dist == r].min())}
        for r in radii
    ]


def check_hypotheses(G: WeightedGraph, h: Potential | np.ndarray, nl,
                     mode: str = "H2", *, lambda1: float, x0=None,
                     infinite_family: bool = False, s_max: float = 1.0) -> HypothesisReport:
    """Evaluate the standing hypotheses on this graph with numeric witnesses.

    ``mode`` selects the integrability check on h: "H2" sums 1/h over V,
    "H2prime" inspects growth of h along hop-distance shells from ``x0``.
    ``lambda1`` must come from the spectral module.  With
    ``infinite_family=True`` the H2 verdict degrades to an advisory trend,
    since a truncation cannot decide integrability at infinity.
    """
    if mode not in ("H2", "H2prime"):
        raise GraphpassError(f"mode must be 'H2' or 'H2prime', got {mode!r}")
    hv = h.on_graph(G) if isinstance(h, Potential) else as_vertex_function(G, h)
    if x0 is None and isinstance(h, Potential):
        x0 = h.base_vertex()
    checks = {}

    h0_found = float(hv.min())
    checks["H1"] = HypothesisCheck(
        "H1", "holds" if h0_found > 0.0 else "fails", {"h0": h0_found}
    )

    if mode == "H2":
        integral = integrate(G, 1.0 / hv)
        witness = {"integral_1_over_h": integral}
        status = "holds"
        base = x0 if x0 is not None else G.vertex_ids[0]
        dist = hop_distances(G, base)
        if np.all(dist >= 0):
            shells = np.arange(int(dist.max()) + 1)
            sums = [float(np.dot(G.mu[dist == r], 1.0 / hv[dist == r])) for r in shells]
            witness["shell_sums"] = sums
            witness["tail_sums"] = [float(s) for s in np.cumsum(sums[::-1])[::-1]]
            if infinite_family:
                status = "advisory"
                tail = sums[-3:] if len(sums) >= 3 else sums
                decreasing = all(tail[i + 1] < tail[i] for i in range(len(tail) - 1))
                witness["trend"] = "shell sums decreasing" if decreasing \
                    else "shell sums not decreasing"
        checks["H2"] = HypothesisCheck("H2", status, witness)
    else:
        if x0 is None:
            raise MissingDistanceBase("H2prime needs a base vertex x0")
        dist = hop_distances(G, x0)
        if np.any(dist < 0):
            raise MissingDistanceBase("H2prime base vertex does not reach every vertex")
        shells = _shell_table(G, hv, dist)
        mins = [s["value"] for s in shells]
        increasing = all(mins[i + 1] > mins[i] for i in range(len(mins) - 1))
        checks["H2prime"] = HypothesisCheck(
            "H2prime", "advisory",
            {"shell_min_h": shells, "strictly_increasing": increasing},
        )

    # (F1): continuity and f(x,0)=0 hold by construction for the power
    # family; f is increasing in s there, so the bound on [0, M] is f(M).
    x_worst = None if nl.a.ndim == 0 else int(np.argmax(nl.a))
    A_M = nl.f(s_max, x_worst)
    checks["F1"] = HypothesisCheck(
        "F1", "holds",
        {"f_at_zero": 0.0, "M": s_max, "A_M": float(A_M), "continuous": True},
    )

    # (F2): theta*F <= s*f with theta > 2; equality for pure powers,
    # additionally sampled on a log grid.
    # theta*F - s*f is linear in a, so checking the largest coefficient covers
    # every vertex.
    grid = np.logspace(-6.0, np.log10(max(s_max, 1.0)) + 1.0, 1000)
    Fv = nl.F(grid, x_worst)
    fv = nl.f(grid, x_worst)
    defect = nl.theta * Fv - grid * fv
    worst = float(np.max(defect / np.maximum(grid * fv, 1e-300)))
    positive = bool(np.all(Fv > 0.0))
    checks["F2"] = HypothesisCheck(
        "F2",
        "holds" if (worst <= 1e-12 and positive and nl.theta > 2.0) else "fails",
        {"theta": nl.theta, "max_relative_defect": worst, "F_positive": positive,
         "symbolic_equality": True},
    )

    # (F3): limsup 2F/s^2 as s -> 0+ versus lambda1; zero for p > 2.
    small = np.logspace(-9.0, -3.0, 7)
    ratios = 2.0 * nl.F(small, x_worst) / small ** 2
    limit = float(ratios[0])
    checks["F3"] = HypothesisCheck(
        "F3", "holds" if limit < lambda1 else "fails",
        {"samples_s": [float(s) for s in small],
         "samples_2F_over_s2": [float(r) for r in ratios],
         "limit_estimate": limit, "lambda1": lambda1},
    )

    # (F1'): pure powers are Lipschitz only on bounded ranges; report the
    # constant on [0, s_max] and flag the global failure.
    L_local = nl.f_prime(s_max, x_worst)
    checks["F1prime"] = HypothesisCheck(
        "F1prime", "advisory",
        {"s_max": s_max, "lipschitz_on_range": float(L_local),
         "globally_lipschitz": False},
    )

    return HypothesisReport(mode=mode, lambda1=lambda1, checks=checks)


# --------------------------------------------------------------- problem I/O

@dataclass
class ProblemSpec:
    """Potential + nonlinearity + optional perturbation, as read from JSON."""

    potential: Potential
    nonlinearity: PowerNonlinearity
    perturbation: PerturbationSource | None = None

    def to_dict(self) -> dict:
        out = {
            "potential": self.potential.to_dict(),
            "nonlinearity": self.nonlinearity.to_dict(),
        }
        if self.perturbation is not None:
            out["perturbation"] = self.perturbation.to_dict()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ProblemSpec":
        pert = None
        if "perturbation" in data:
            block = data["perturbation"]
            g = block.get("g")
            if not isinstance(g, dict) or "table" not in g:
                raise GraphpassError("perturbation g needs a {'table': [...]} block")
            pert = PerturbationSource(np.asarray(g["table"], dtype=np.float64),
                                      float(block["eps"]))
        return cls(
            potential=Potential.from_dict(data["potential"]),
            nonlinearity=nonlinearity_from_dict(data["nonlinearity"]),
            perturbation=pert,
        )
