import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import graphpass as gp
from graphpass.errors import (
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

from conftest import random_connected_graph


# ---------------------------------------------------------------- building

def test_build_minimal():
    G = gp.build_graph(["a", "b"], [("a", "b", 1.0)], {"a": 1.0, "b": 1.0})
    assert G.n_vertices == 2 and G.n_edges == 1
    assert G.mu_min == 1.0


def test_build_rejects_zero_weight():
    with pytest.raises(NonpositiveWeight):
        gp.build_graph(["a", "b"], [("a", "b", 0.0)], {"a": 1.0, "b": 1.0})


def test_build_rejects_zero_measure():
    with pytest.raises(NonpositiveMeasure):
        gp.build_graph(["a", "b"], [("a", "b", 1.0)], {"a": 0.0, "b": 1.0})


def test_build_rejects_unknown_vertex():
    with pytest.raises(UnknownVertex):
        gp.build_graph(["a", "b"], [("a", "c", 1.0)], {"a": 1.0, "b": 1.0})


def test_build_rejects_self_loop():
    with pytest.raises(SelfLoop):
        gp.build_graph(["a"], [("a", "a", 1.0)], {"a": 1.0})


def test_build_rejects_duplicate_edge_any_orientation():
    with pytest.raises(DuplicateEdge):
        gp.build_graph(["a", "b"], [("a", "b", 1.0), ("b", "a", 2.0)],
                       {"a": 1.0, "b": 1.0})


def test_adjacency_symmetric(rng):
    G = random_connected_graph(rng, 17)
    W = G.adjacency_matrix()
    assert (W != W.T).nnz == 0


# -------------------------------------------------------------- generation

def test_generate_path3():
    G = gp.generate_graph("path", n=3)
    assert G.n_vertices == 3 and G.n_edges == 2


def test_generate_lattice_ball_count_matches_enumeration():
    # independent oracle: brute-force count of |i| + |j| <= r
    for r in (0, 1, 2, 3):
        expected = sum(
            1 for i, j in itertools.product(range(-r, r + 1), repeat=2)
            if abs(i) + abs(j) <= r
        )
        G = gp.generate_graph("lattice_ball", dim=2, radius=r)
        assert G.n_vertices == expected
    assert gp.generate_graph("lattice_ball", dim=2, radius=2).n_vertices == 13


def test_generate_lattice_ball_center_first():
    G = gp.generate_graph("lattice_ball", dim=2, radius=2)
    assert G.vertex_ids[0] == "0,0"
    dist = gp.hop_distances(G, "0,0")
    assert dist.max() == 2


def test_generate_tree_degenerate():
    G = gp.generate_graph("tree", branching=2, depth=0)
    assert G.n_vertices == 1 and G.n_edges == 0


def test_generate_tree_counts():
    G = gp.generate_graph("tree", branching=2, depth=3)
    assert G.n_vertices == 15 and G.n_edges == 14


def test_generate_rejects_bad_params():
    with pytest.raises(InvalidFamilyParams):
        gp.generate_graph("path", n=0)
    with pytest.raises(InvalidFamilyParams):
        gp.generate_graph("cycle", n=2)
    with pytest.raises(InvalidFamilyParams):
        gp.generate_graph("lattice_ball", dim=0, radius=2)
    with pytest.raises(InvalidFamilyParams):
        gp.generate_graph("path", n=3, weight=0.0)
    with pytest.raises(InvalidFamilyParams):
        gp.generate_graph("nosuch", n=3)


# --------------------------------------------------------------- operators

def test_laplacian_of_constant_vanishes(rng):
    G = random_connected_graph(rng, 12)
    du = gp.laplacian(G, np.full(12, 3.7))
    np.testing.assert_allclose(du, 0.0, atol=1e-14)


def test_laplacian_path2_unit():
    G = gp.generate_graph("path", n=2)
    np.testing.assert_allclose(gp.laplacian(G, np.array([0.0, 1.0])),
                               [1.0, -1.0])


def test_laplacian_weighted():
    G = gp.build_graph(["a", "b"], [("a", "b", 2.0)], {"a": 4.0, "b": 1.0})
    np.testing.assert_allclose(gp.laplacian(G, np.array([0.0, 1.0])),
                               [0.5, -2.0])


def test_laplacian_dimension_mismatch():
    G = gp.generate_graph("path", n=2)
    with pytest.raises(DimensionMismatch):
        gp.laplacian(G, np.zeros(3))
    with pytest.raises(NonFiniteValue):
        gp.laplacian(G, np.array([0.0, np.nan]))


def test_gamma_path2():
    G = gp.generate_graph("path", n=2)
    u = np.array([0.0, 1.0])
    np.testing.assert_allclose(gp.gamma(G, u, u), [0.5, 0.5])


def test_gamma_symmetric(rng):
    G = random_connected_graph(rng, 15)
    u, v = rng.standard_normal(15), rng.standard_normal(15)
    np.testing.assert_allclose(gp.gamma(G, u, v), gp.gamma(G, v, u))


def test_grad_norm_examples():
    G = gp.generate_graph("path", n=2)
    u = np.array([0.0, 1.0])
    np.testing.assert_allclose(gp.grad_norm(G, u), [2 ** -0.5, 2 ** -0.5])
    np.testing.assert_allclose(gp.grad_norm(G, np.full(2, 5.0)), 0.0)


def test_grad_norm_squares_to_gamma(rng):
    G = random_connected_graph(rng, 20)
    u = rng.standard_normal(20)
    np.testing.assert_allclose(gp.grad_norm(G, u) ** 2, gp.gamma(G, u, u),
                               rtol=1e-13, atol=1e-15)


def test_integrate_examples():
    G5 = gp.generate_graph("path", n=5)
    assert gp.integrate(G5, np.ones(5)) == 5.0
    G = gp.build_graph(["a", "b"], [("a", "b", 1.0)], {"a": 2.0, "b": 3.0})
    assert gp.integrate(G, np.array([1.0, -1.0])) == -1.0
    assert gp.integrate(G, np.zeros(2)) == 0.0


def test_norm_h_examples():
    G1 = gp.generate_graph("path", n=1)
    assert gp.norm_h(G1, np.ones(1), np.ones(1)) == 1.0
    G2 = gp.generate_graph("path", n=2)
    # Dirichlet part 1 (from the grad_norm example) plus potential part 1
    np.testing.assert_allclose(
        gp.norm_h(G2, np.ones(2), np.array([0.0, 1.0])), np.sqrt(2.0)
    )
    assert gp.norm_h(G2, np.ones(2), np.zeros(2)) == 0.0
    with pytest.raises(NonpositivePotential):
        gp.norm_h(G2, np.array([1.0, 0.0]), np.ones(2))


def test_norm_h_squared_is_integral_identity(rng):
    G = random_connected_graph(rng, 14)
    h = 0.5 + rng.random(14)
    u = rng.standard_normal(14)
    lhs = gp.norm_h(G, h, u) ** 2
    rhs = gp.integrate(G, gp.gamma(G, u, u) + h * u * u)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12)


# -------------------------------------------------------------- invariants

@settings(max_examples=40, deadline=None)
@given(u=arrays(np.float64, 9, elements=st.floats(-100, 100)))
def test_divergence_theorem(u):
    G = gp.generate_graph("cycle", n=9, weight=1.3, measure=0.7)
    du = gp.laplacian(G, u)
    total = gp.integrate(G, du)
    scale = gp.integrate(G, np.abs(du))
    assert abs(total) <= 1e-12 * max(scale, 1e-30)


@settings(max_examples=40, deadline=None)
@given(
    u=arrays(np.float64, 5, elements=st.floats(-50, 50)),
    v=arrays(np.float64, 5, elements=st.floats(-50, 50)),
)
def test_greens_identity(u, v):
    G = gp.generate_graph("lattice_ball", dim=2, radius=1, weight=0.8, measure=1.9)
    lhs = gp.integrate(G, gp.gamma(G, u, v))
    rhs = -gp.integrate(G, v * gp.laplacian(G, u))
    assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), abs(rhs), 1e-30)


def test_greens_identity_random_graphs(rng):
    for _ in range(25):
        n = int(rng.integers(2, 30))
        G = random_connected_graph(rng, n)
        u, v = rng.standard_normal(n), rng.standard_normal(n)
        lhs = gp.integrate(G, gp.gamma(G, u, v))
        rhs = -gp.integrate(G, v * gp.laplacian(G, u))
        assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), abs(rhs), 1e-30)


def test_gamma_bilinear(rng):
    G = random_connected_graph(rng, 18)
    u, w, v = rng.standard_normal((3, 18))
    a, b = -1.7, 0.4
    np.testing.assert_allclose(
        gp.gamma(G, a * u + b * w, v),
        a * gp.gamma(G, u, v) + b * gp.gamma(G, w, v),
        rtol=1e-12, atol=1e-14,
    )


def test_embedding_inequalities(rng):
    for _ in range(50):
        n = int(rng.integers(1, 25))
        G = random_connected_graph(rng, n)
        u = 10.0 * rng.standard_normal(n)
        linf = np.max(np.abs(u))
        assert linf <= gp.integrate(G, np.abs(u)) / G.mu_min * (1 + 1e-12)
        assert linf <= np.sqrt(gp.integrate(G, u * u) / G.mu_min) * (1 + 1e-12)


def test_hop_distances_path():
    G = gp.generate_graph("path", n=4)
    np.testing.assert_array_equal(gp.hop_distances(G, "v1"), [1, 0, 1, 2])
    with pytest.raises(UnknownVertex):
        gp.hop_distances(G, "zz")


# -------------------------------------------------------------------- I/O

def test_json_round_trip_bit_exact(rng, tmp_path):
    G = random_connected_graph(rng, 23)
    path = tmp_path / "g.json"
    gp.save_graph(G, path)
    G2 = gp.load_graph(path)
    assert G2 == G
    # and through the dict layer
    assert gp.graph_from_dict(gp.graph_to_dict(G)) == G


def test_json_schema_shape(tmp_path):
    G = gp.generate_graph("path", n=2, weight=1.5, measure=2.0)
    path = tmp_path / "g.json"
    gp.save_graph(G, path)
    data = json.loads(path.read_text())
    assert data["vertices"] == [{"id": "v0", "mu": 2.0}, {"id": "v1", "mu": 2.0}]
    assert data["edges"] == [{"a": "v0", "b": "v1", "w": 1.5}]
