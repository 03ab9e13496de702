import numpy as np
import pytest

from graphpass import build_graph, generate_graph


def random_connected_graph(rng, n, w_range=(0.0, 2.0), mu_range=(0.5, 2.0)):
    """Random spanning tree plus extra edges; weights in (w_lo, w_hi]."""
    ids = [f"n{i}" for i in range(n)]
    edges = set()
    for i in range(1, n):
        j = int(rng.integers(0, i))
        edges.add((j, i))
    extra = int(rng.integers(0, max(1, n)))
    for _ in range(extra):
        i, j = rng.integers(0, n, size=2)
        i, j = int(min(i, j)), int(max(i, j))
        if i != j:
            edges.add((i, j))
    lo, hi = w_range
    edge_list = [
        (ids[i], ids[j], float(lo + (hi - lo) * (1.0 - rng.random())))
        for i, j in sorted(edges)
    ]
    mu = mu_range[0] + (mu_range[1] - mu_range[0]) * rng.random(n)
    return build_graph(ids, edge_list, mu)


@pytest.fixture
def rng():
    return np.random.default_rng(20240801)


@pytest.fixture
def single_vertex():
    return generate_graph("path", n=1)


@pytest.fixture
def path2():
    return generate_graph("path", n=2)
