"""Finite weighted graphs with a vertex measure, and the discrete operators on them.

A graph carries a positive symmetric edge weight w_xy and a positive vertex
measure mu(x).  The central objects are

    laplacian(G, u)(x) = (1/mu(x)) * sum_{y~x} w_xy (u(y) - u(x))
    gamma(G, u, v)(x)  = (1/2mu(x)) * sum_{y~x} w_xy (u(y)-u(x)) (v(y)-v(x))
    grad_norm(G, u)    = sqrt(gamma(G, u, u))
    integrate(G, g)    = sum_x mu(x) g(x)

Vertex functions are plain float64 numpy arrays aligned with ``G.vertex_ids``.
All reductions run in the fixed vertex-id order, so results are reproducible
bit for bit across runs.
"""

from __future__ import annotations

import itertools
import json
from collections import deque

import numpy as np
import scipy.sparse as sp

from .errors import (
    DimensionMismatch,
    DuplicateEdge,
    InvalidFamilyParams,
    NonFiniteValue,
    NonpositiveMeasure,
    NonpositivePotential,
    NonpositiveWeight,
    SelfLoop,
    UnknownVertex,
)

VertexFunction = np.ndarray


class WeightedGraph:
    """Immutable finite graph with symmetric positive weights and measure mu.

    Adjacency is stored CSR-style with both edge directions materialized and
    neighbor lists sorted, which gives O(deg) operator application and makes
    symmetry a construction invariant rather than a runtime check.
    """

    def __init__(self, vertex_ids, indptr, indices, weights, mu):
        self.vertex_ids = list(vertex_ids)
        self.index = {v: i for i, v in enumerate(self.vertex_ids)}
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.weights = np.asarray(weights, dtype=np.float64)
        self.mu = np.asarray(mu, dtype=np.float64)
        self.mu_min = float(self.mu.min())
        n = len(self.vertex_ids)
        self._adj = sp.csr_matrix((self.weights, self.indices, self.indptr), shape=(n, n))
        self._row = np.repeat(np.arange(n, dtype=np.int64), np.diff(self.indptr))
        # total incident weight per vertex, reduced in storage order
        self.weight_degree = np.bincount(self._row, weights=self.weights, minlength=n)
        for arr in (self.indptr, self.indices, self.weights, self.mu,
                    self.weight_degree, self._row):
            arr.flags.writeable = False

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_ids)

    @property
    def n_edges(self) -> int:
        return self.indices.size // 2

    def neighbors(self, i: int):
        """Sorted neighbor indices and weights of vertex ``i``."""
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi], self.weights[lo:hi]

    def adjacency_matrix(self) -> sp.csr_matrix:
        """Symmetric weight matrix W as CSR (copy)."""
        return self._adj.copy()

    def undirected_edges(self):
        """Each edge once as (i, j, w) with i < j, in row-major order."""
        out = []
        for i in range(self.n_vertices):
            nbrs, ws = self.neighbors(i)
            for j, w in zip(nbrs, ws):
                if j > i:
                    out.append((i, int(j), float(w)))
        return out

    def __eq__(self, other):
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (
            self.vertex_ids == other.vertex_ids
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.weights, other.weights)
            and np.array_equal(self.mu, other.mu)
        )


def as_vertex_function(G: WeightedGraph, values) -> VertexFunction:
    """Validate and coerce ``values`` to a float64 array aligned with ``G``."""
    u = np.asarray(values, dtype=np.float64)
    if u.shape != (G.n_vertices,):
        raise DimensionMismatch(
            f"vertex function has shape {u.shape}, expected ({G.n_vertices},)"
        )
    if not np.all(np.isfinite(u)):
        raise NonFiniteValue("vertex function contains non-finite entries")
    return u


def build_graph(vertices, edges, measure) -> WeightedGraph:
    """Build a WeightedGraph from explicit data.

    vertices: iterable of ids (order fixes the storage order).
    edges: iterable of (a, b, w) with each undirected edge listed once.
    measure: mapping id -> mu, or sequence aligned with ``vertices``.
    """
    ids = list(vertices)
    if len(set(ids)) != len(ids):
        raise DuplicateEdge("duplicate vertex ids")
    index = {v: i for i, v in enumerate(ids)}
    n = len(ids)

    if isinstance(measure, dict):
        try:
            mu = np.array([float(measure[v]) for v in ids])
        except KeyError as e:
            raise UnknownVertex(f"measure missing vertex {e.args[0]!r}") from None
    else:
        mu = np.asarray(list(measure), dtype=np.float64)
        if mu.shape != (n,):
            raise DimensionMismatch("measure length does not match vertex count")
    if not np.all(np.isfinite(mu)) or np.any(mu <= 0.0):
        raise NonpositiveMeasure("vertex measure must be positive and finite")

    seen = set()
    rows, cols, vals = [], [], []
    for a, b, w in edges:
        if a not in index:
            raise UnknownVertex(f"edge endpoint {a!r} not a vertex")
        if b not in index:
            raise UnknownVertex(f"edge endpoint {b!r} not a vertex")
        i, j = index[a], index[b]
        if i == j:
            raise SelfLoop(f"self-loop at {a!r}")
        w = float(w)
        if not np.isfinite(w) or w <= 0.0:
            raise NonpositiveWeight(f"edge ({a!r},{b!r}) has weight {w}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise DuplicateEdge(f"edge ({a!r},{b!r}) listed twice")
        seen.add(key)
        rows += [i, j]
        cols += [j, i]
        vals += [w, w]

    order = np.lexsort((np.array(cols, dtype=np.int64), np.array(rows, dtype=np.int64))) \
        if rows else np.array([], dtype=np.int64)
    rows_a = np.array(rows, dtype=np.int64)[order] if rows else np.array([], dtype=np.int64)
    cols_a = np.array(cols, dtype=np.int64)[order] if rows else np.array([], dtype=np.int64)
    vals_a = np.array(vals, dtype=np.float64)[order] if rows else np.array([], dtype=np.float64)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, rows_a + 1, 1)
    indptr = np.cumsum(indptr)
    return WeightedGraph(ids, indptr, cols_a, vals_a, mu)


def generate_graph(family: str, *, n=None, dim=None, radius=None, branching=None,
                   depth=None, weight: float = 1.0, measure: float = 1.0) -> WeightedGraph:
    """Deterministically generate a graph from a named family.

    Families: ``path`` (n vertices), ``cycle`` (n >= 3), ``lattice_ball``
    (Z^dim ball of hop radius ``radius``), ``tree`` (full ``branching``-ary
    tree of given depth).  ``weight`` and ``measure`` are constants applied
    to every edge and vertex.  Vertex order is canonical per family, so the
    same parameters always reproduce the same graph; the first vertex is the
    natural base point (path end, cycle start, lattice center, tree root).
    """
    if not np.isfinite(weight) or weight <= 0.0:
        raise InvalidFamilyParams("weight must be positive")
    if not np.isfinite(measure) or measure <= 0.0:
        raise InvalidFamilyParams("measure must be positive")

    if family == "path":
        if n is None or int(n) < 1:
            raise InvalidFamilyParams("path needs n >= 1")
        n = int(n)
        ids = [f"v{i}" for i in range(n)]
        edges = [(f"v{i}", f"v{i+1}", weight) for i in range(n - 1)]
    elif family == "cycle":
        if n is None or int(n) < 3:
            raise InvalidFamilyParams("cycle needs n >= 3")
        n = int(n)
        ids = [f"v{i}" for i in range(n)]
        edges = [(f"v{i}", f"v{(i+1) % n}", weight) for i in range(n)]
    elif family == "lattice_ball":
        if dim is None or radius is None or int(dim) < 1 or int(radius) < 0:
            raise InvalidFamilyParams("lattice_ball needs dim >= 1 and radius >= 0")
        d, r = int(dim), int(radius)
        pts = [p for p in itertools.product(range(-r, r + 1), repeat=d)
               if sum(abs(c) for c in p) <= r]
        pts.sort(key=lambda p: (sum(abs(c) for c in p), p))
        ids = [",".join(str(c) for c in p) for p in pts]
        pset = {p: ids[k] for k, p in enumerate(pts)}
        edges = []
        for p in pts:
            for axis in range(d):
                q = tuple(c + (1 if k == axis else 0) for k, c in enumerate(p))
                if q in pset:
                    edges.append((pset[p], pset[q], weight))
    elif family == "tree":
        if branching is None or depth is None or int(branching) < 1 or int(depth) < 0:
            raise InvalidFamilyParams("tree needs branching >= 1 and depth >= 0")
        b, dep = int(branching), int(depth)
        ids = ["t"]
        edges = []
        frontier = ["t"]
        for _ in range(dep):
            nxt = []
            for parent in frontier:
                for k in range(b):
                    child = f"{parent}.{k}"
                    ids.append(child)
                    edges.append((parent, child, weight))
                    nxt.append(child)
            frontier = nxt
    else:
        raise InvalidFamilyParams(f"unknown family {family!r}")

    return build_graph(ids, edges, [measure] * len(ids))


# ------------------------------------------------------------- operators

def laplacian(G: WeightedGraph, u: VertexFunction) -> VertexFunction:
    """mu-Laplacian: (1/mu(x)) * sum_{y~x} w_xy (u(y) - u(x))."""
    u = as_vertex_function(G, u)
    return (G._adj @ u - G.weight_degree * u) / G.mu


def gamma(G: WeightedGraph, u: VertexFunction, v: VertexFunction) -> VertexFunction:
    """Gradient form (1/2mu(x)) * sum_{y~x} w_xy (u(y)-u(x)) (v(y)-v(x)).

    Evaluated edgewise, so gamma(G, u, u) is a sum of nonnegative terms and
    never goes negative through cancellation.
    """
    u = as_vertex_function(G, u)
    v = as_vertex_function(G, v)
    du = u[G.indices] - u[G._row]
    dv = v[G.indices] - v[G._row]
    per_vertex = np.bincount(G._row, weights=G.weights * du * dv, minlength=G.n_vertices)
    return per_vertex / (2.0 * G.mu)


def grad_norm(G: WeightedGraph, u: VertexFunction) -> VertexFunction:
    """Pointwise gradient length sqrt(gamma(u, u))."""
    return np.sqrt(gamma(G, u, u))


def integrate(G: WeightedGraph, g: VertexFunction) -> float:
    """Integral over V: sum_x mu(x) g(x)."""
    g = as_vertex_function(G, g)
    return float(np.dot(G.mu, g))


def norm_h(G: WeightedGraph, h: VertexFunction, u: VertexFunction) -> float:
    """Energy norm ( integral of |grad u|^2 + h u^2 dmu )^(1/2); needs h > 0.

    With h identically 1 this is the W^{1,2} norm.
    """
    h = as_vertex_function(G, h)
    if np.any(h <= 0.0):
        raise NonpositivePotential("norm_h needs h > 0 everywhere")
    u = as_vertex_function(G, u)
    return float(np.sqrt(integrate(G, gamma(G, u, u) + h * u * u)))


def hop_distances(G: WeightedGraph, source_id) -> np.ndarray:
    """Unweighted BFS hop distance from ``source_id``; -1 marks unreachable."""
    if source_id not in G.index:
        raise UnknownVertex(f"no vertex {source_id!r}")
    dist = np.full(G.n_vertices, -1, dtype=np.int64)
    s = G.index[source_id]
    dist[s] = 0
    q = deque([s])
    while q:
        x = q.popleft()
        nbrs, _ = G.neighbors(x)
        for y in nbrs:
            if dist[y] < 0:
                dist[y] = dist[x] + 1
                q.append(y)
    return dist


# ------------------------------------------------------------------ I/O

def graph_to_dict(G: WeightedGraph) -> dict:
    """JSON-ready dict: vertices in storage order, each edge listed once."""
    return {
        "vertices": [{"id": v, "mu": float(G.mu[i])} for i, v in enumerate(G.vertex_ids)],
        "edges": [
            {"a": G.vertex_ids[i], "b": G.vertex_ids[j], "w": w}
            for i, j, w in G.undirected_edges()
        ],
    }


def graph_from_dict(data: dict) -> WeightedGraph:
    ids = [v["id"] for v in data["vertices"]]
    measure = {v["id"]: v["mu"] for v in data["vertices"]}
    edges = [(e["a"], e["b"], e["w"]) for e in data["edges"]]
    return build_graph(ids, edges, measure)


def save_graph(G: WeightedGraph, path) -> None:
    with open(path, "w") as fh:
        json.dump(graph_to_dict(G), fh, indent=1)
        fh.write("\n")


def load_graph(path) -> WeightedGraph:
    with open(path) as fh:
        return graph_from_dict(json.load(fh))
