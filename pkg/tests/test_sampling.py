"""Hitting sets and the two-phase cluster decomposition."""
from __future__ import annotations

import numpy as np
import pytest

from apsp_approx import Graph, decompose, greedy_hitting_set, split_clusters
from oracles import check_decomposition, check_hitting_set, floyd_warshall


def random_graph(rng, n, p):
    mask = np.triu(rng.random((n, n)) < p, k=1)
    return Graph.from_edges(n, np.argwhere(mask))


def test_hitting_set_covers_high_degree_vertices():
    rng = np.random.default_rng(10)
    for trial in range(25):
        n = int(rng.integers(5, 80))
        g = random_graph(rng, n, float(rng.uniform(0.05, 0.4)))
        d = int(rng.integers(1, max(2, n // 2)))
        hs = greedy_hitting_set(g, d)
        assert check_hitting_set(g, hs.vertices, d), f"trial {trial}"


def test_hitting_set_size_bound():
    rng = np.random.default_rng(11)
    for trial in range(15):
        n = int(rng.integers(8, 80))
        g = random_graph(rng, n, 0.3)
        for d in (2, 4, 8):
            if d > n:
                continue
            hs = greedy_hitting_set(g, d)
            bound = 4.0 * n * np.log(max(n, 2)) / d
            assert hs.vertices.size <= bound, \
                f"trial {trial} d={d}: {hs.vertices.size} > {bound:.1f}"


def test_hitting_set_star_picks_single_leaf():
    g = Graph.from_edges(6, [(0, i) for i in range(1, 6)])
    hs = greedy_hitting_set(g, 3)
    assert hs.vertices.tolist() == [1]


def test_hitting_set_empty_when_no_high_degree():
    g = Graph.from_edges(4, [(0, 1), (2, 3)])
    assert greedy_hitting_set(g, 2).vertices.size == 0


def test_hitting_set_threshold_validation():
    g = Graph.from_edges(3, [(0, 1)])
    with pytest.raises(ValueError):
        greedy_hitting_set(g, 0)
    with pytest.raises(ValueError):
        greedy_hitting_set(g, 5)


def test_decomposition_invariants():
    rng = np.random.default_rng(12)
    for trial in range(25):
        n = int(rng.integers(5, 70))
        g = random_graph(rng, n, float(rng.uniform(0.05, 0.5)))
        d = int(rng.integers(1, 9))
        dec = decompose(g, d)
        exact = floyd_warshall(g)
        problems = check_decomposition(g, dec, d, exact)
        assert not problems, f"trial {trial} d={d}: {problems}"


def test_decomposition_dense_graph_single_cluster():
    g = Graph.from_edges(6, [(i, j) for i in range(6) for j in range(i + 1, 6)])
    dec = decompose(g, 3)
    assert len(dec.clusters) == 1
    assert dec.clusters[0].size == 6
    assert dec.remainder.size == 0


def test_decomposition_sparse_graph_all_remainder():
    g = Graph.from_edges(6, [(0, 1), (2, 3), (4, 5)])
    dec = decompose(g, 2)
    assert not dec.clusters
    assert dec.remainder.size == 6


def test_split_preserves_partition_and_size_window():
    rng = np.random.default_rng(13)
    for trial in range(20):
        n = int(rng.integers(10, 90))
        g = random_graph(rng, n, float(rng.uniform(0.1, 0.5)))
        d = int(rng.integers(1, 7))
        dec = split_clusters(decompose(g, d), d)
        exact = floyd_warshall(g)
        problems = check_decomposition(g, dec, d, exact)
        assert not problems, f"trial {trial} d={d}: {problems}"
        for c in dec.clusters:
            assert d < c.size <= 2 * (d + 1), \
                f"trial {trial}: split size {c.size} outside (d, 2(d+1)]"


def test_split_rejects_undersized_cluster():
    from apsp_approx import Decomposition
    dec = Decomposition(clusters=[np.arange(2)], remainder=np.arange(2, 4),
                        threshold=2)
    with pytest.raises(ValueError):
        split_clusters(dec, 2)
