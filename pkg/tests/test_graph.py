import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from polyconsensus.graph import (DisconnectedGraphError, Graph, IidFailure, MarkovSwitch,
                                 complete_graph, default_radius, degrees, generate_rgg,
                                 is_connected, path_graph, sample_topology, topology_sequence)

from conftest import bfs_reachable, brute_edges


def test_default_radius_n50():
    assert default_radius(50) == pytest.approx(math.sqrt(math.log(50) / 50))
    assert default_radius(50) == pytest.approx(0.2797, abs=1e-4)


def test_two_nodes_large_radius_always_edge():
    for seed in range(20):
        g = generate_rgg(2, seed, radius=2.0)
        assert g.edge_set() == {(0, 1)}


def test_rgg_n30_seed7_connected_by_independent_bfs():
    g = generate_rgg(30, 7)
    assert bfs_reachable(30, g.edge_set()) == set(range(30))
    assert is_connected(g)


@given(st.integers(0, 2 ** 32 - 1), st.integers(5, 60))
def test_rgg_edges_are_exactly_close_pairs(seed, n):
    g = generate_rgg(n, seed)
    assert g.edge_set() == brute_edges(g.positions, default_radius(n))
    assert np.all((g.positions >= 0) & (g.positions < 1))


def test_rgg_tiny_radius_fails_with_diagnostic():
    with pytest.raises(DisconnectedGraphError, match="increase the radius"):
        generate_rgg(50, 0, radius=0.01, max_attempts=5)


def test_rgg_determinism():
    assert generate_rgg(40, 11) == generate_rgg(40, 11)
    assert generate_rgg(40, 11) != generate_rgg(40, 12)


def test_is_connected_examples():
    assert is_connected(path_graph(3))
    assert not is_connected(Graph(2, []))
    pos = np.random.default_rng(5).uniform(size=(50, 2))
    from polyconsensus.graph import _rgg_edges
    g = Graph(50, _rgg_edges(pos, 0.01), pos)
    assert not is_connected(g)
    assert len(bfs_reachable(50, g.edge_set())) < 50


@given(st.integers(1, 12), st.data())
def test_is_connected_matches_reference_bfs(n, data):
    pairs = list(itertools.combinations(range(n), 2))
    chosen = data.draw(st.lists(st.sampled_from(pairs), unique=True) if pairs else st.just([]))
    g = Graph(n, chosen)
    assert is_connected(g) == (len(bfs_reachable(n, chosen)) == n)


def test_degrees():
    np.testing.assert_array_equal(degrees(path_graph(3)), [1, 2, 1])
    np.testing.assert_array_equal(degrees(complete_graph(4)), [3, 3, 3, 3])
    g = generate_rgg(50, 3)
    assert degrees(g).sum() == 2 * g.num_edges
    recount = np.zeros(50, dtype=int)
    for i, j in g.edge_set():
        recount[i] += 1
        recount[j] += 1
    np.testing.assert_array_equal(degrees(g), recount)


@pytest.mark.parametrize("edges", [[(0, 0)], [(0, 1), (1, 0)], [(0, 3)], [(-1, 1)]])
def test_graph_rejects_invalid_edges(edges):
    with pytest.raises(ValueError):
        Graph(3, edges)


def test_graph_arrays_read_only():
    g = path_graph(4)
    with pytest.raises(ValueError):
        g.edges[0, 0] = 3


def test_iid_failure_validation():
    base = path_graph(3)
    with pytest.raises(ValueError, match="symmetric"):
        IidFailure(base, np.array([[0, .5, 0], [.4, 0, .5], [0, .5, 0]]))
    with pytest.raises(ValueError, match="realizable"):
        IidFailure(base, np.array([[0, .5, .5], [.5, 0, .5], [.5, .5, 0]]))
    with pytest.raises(ValueError, match="diagonal"):
        IidFailure(base, np.eye(3))
    with pytest.raises(ValueError):
        MarkovSwitch(1.5, 10)


def test_iid_extreme_probabilities():
    base = generate_rgg(20, 1)
    rng = np.random.default_rng(0)
    assert sample_topology(IidFailure.uniform(base, 1.0), None, rng) == base
    assert sample_topology(IidFailure.uniform(base, 0.0), None, rng).num_edges == 0


def test_iid_triangle_subset_frequencies():
    tri = complete_graph(3)
    model = IidFailure.uniform(tri, 0.5)
    rng = np.random.default_rng(2024)
    edges = tri.edges
    draws = 100_000
    # vectorized twin of sample_topology, checked against it on a prefix
    keep = rng.random((draws, 3)) < 0.5
    rng2 = np.random.default_rng(2024)
    for row in keep[:200]:
        g = sample_topology(model, None, rng2)
        assert g.edge_set() == {tuple(e) for e in edges[row]}
    codes = keep @ np.array([1, 2, 4])
    freq = np.bincount(codes, minlength=8) / draws
    np.testing.assert_allclose(freq, np.full(8, 1 / 8), atol=0.01)


@given(st.integers(0, 10 ** 6), st.floats(0, 1))
def test_iid_sample_is_subset(seed, p):
    base = generate_rgg(15, 4)
    g = sample_topology(IidFailure.uniform(base, p), None, seed)
    assert g.edge_set() <= base.edge_set()


def test_markov_switch_extremes():
    g0 = generate_rgg(20, 0)
    seq = list(topology_sequence(MarkovSwitch(0.0, 20), g0, 1, 30))
    assert all(g is g0 for g in seq)
    seq = list(topology_sequence(MarkovSwitch(1.0, 20), g0, 1, 30))
    assert seq[0] is g0
    assert all(a != b for a, b in zip(seq, seq[1:]))


def test_markov_switch_rate():
    g0 = generate_rgg(10, 0)
    seq = list(topology_sequence(MarkovSwitch(0.3, 10), g0, 9, 3001))
    changes = sum(a is not b for a, b in zip(seq, seq[1:]))
    assert changes / 3000 == pytest.approx(0.3, abs=0.03)


def test_dynamic_sequences_deterministic():
    base = generate_rgg(20, 2)
    m = IidFailure.uniform(base, 0.6)
    a = list(topology_sequence(m, None, 5, 10))
    b = list(topology_sequence(m, None, 5, 10))
    assert a == b
    ms = MarkovSwitch(0.5, 20)
    assert list(topology_sequence(ms, base, 5, 10)) == list(topology_sequence(ms, base, 5, 10))
