"""Deterministic hitting sets and the constant-diameter cluster decomposition.

Both constructions are fully deterministic: the greedy hitting set breaks
ties by smallest vertex id, and the decomposition scans pivot candidates in
ascending id order, so identical inputs always produce identical outputs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import Graph


@dataclass
class HittingSet:
    """Vertex set S such that every vertex of degree ≥ threshold has a neighbor in S."""

    vertices: np.ndarray
    threshold: int

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.int64)


@dataclass
class Decomposition:
    """Disjoint clusters H_1..H_h plus remainder R partitioning V.

    Invariants (established by :func:`decompose`, checked in tests): cluster
    sizes exceed the threshold, weak diameter in the full graph is ≤ 4, and
    every remainder vertex has degree < threshold.
    """

    clusters: list[np.ndarray]
    remainder: np.ndarray
    threshold: int


def greedy_hitting_set(g: Graph, d: int) -> HittingSet:
    """Greedy dominating-style hitting set for the degree-≥d vertices.

    Repeatedly picks the vertex adjacent to the most still-uncovered
    degree-≥d vertices (smallest id on ties) until all are covered.  Each
    pick covers at least a d/n fraction of what remains, which keeps the
    size within the n·ln(n)/d regime tested against the 4·n·ln(n)/d bound.
    """
    if not 1 <= d <= max(g.n, 1):
        raise ValueError(f"hitting set threshold {d} out of range [1, n]")
    deg = g.degrees
    uncovered = (deg >= d).astype(np.int64)
    chosen = []
    adj = g.to_csr()
    while uncovered.any():
        cover_counts = adj.dot(uncovered)
        s = int(np.argmax(cover_counts))
        if cover_counts[s] == 0:
            raise AssertionError("uncovered degree->=d vertex with no neighbors")
        chosen.append(s)
        uncovered[g.neighbors(s)] = 0
    return HittingSet(vertices=np.sort(np.asarray(chosen, dtype=np.int64)),
                      threshold=d)


def decompose(g: Graph, d: int) -> Decomposition:
    """Two-phase clustering into size->d, weak-diameter-≤4 clusters plus R.

    Phase 1 repeatedly extracts the closed residual neighborhood of the
    smallest-id vertex whose residual degree (degree within the not-yet
    -removed set U) is at least d.  Phase 2 walks the phase-1 cores in
    creation order and absorbs their remaining residual neighbors.  What is
    left over forms R; every R vertex has full-graph degree < d.

    Residual degrees are maintained incrementally under deletions, and the
    pivot scan pointer only moves forward (residual degrees never grow), so
    the whole construction is O(n + m).
    """
    if d < 1:
        raise ValueError("decomposition threshold must be at least 1")
    n = g.n
    in_u = np.ones(n, dtype=bool)
    res_deg = g.degrees.copy()
    cores: list[np.ndarray] = []

    def remove(vertices):
        for v in vertices:
            in_u[v] = False
        for v in vertices:
            nbrs = g.neighbors(v)
            res_deg[nbrs[in_u[nbrs]]] -= 1

    # Phase 1: extract closed residual neighborhoods of high-residual-degree
    # pivots.  A vertex passed over (removed, or residual degree < d) can
    # never qualify later, so a single forward scan suffices.
    scan = 0
    while scan < n:
        if not in_u[scan] or res_deg[scan] < d:
            scan += 1
            continue
        u = scan
        nbrs = g.neighbors(u)
        members = np.concatenate([[u], nbrs[in_u[nbrs]]])
        remove(members)
        cores.append(np.sort(members))

    # Phase 2: absorb residual neighbors of each core, in order.
    clusters: list[np.ndarray] = []
    for core in cores:
        absorbed = []
        for v in core:
            nbrs = g.neighbors(v)
            hits = nbrs[in_u[nbrs]]
            if hits.size:
                absorbed.append(hits)
                in_u[hits] = False
        if absorbed:
            extra = np.unique(np.concatenate(absorbed))
            clusters.append(np.sort(np.concatenate([core, extra])))
        else:
            clusters.append(core)

    remainder = np.flatnonzero(in_u).astype(np.int64)
    return Decomposition(clusters=clusters, remainder=remainder, threshold=d)


def split_clusters(dec: Decomposition, d: int) -> Decomposition:
    """Split oversized clusters into balanced parts with sizes in (d, 2(d+1)].

    A cluster of size s becomes ⌊s/(d+1)⌋ contiguous near-equal parts; every
    part size then lies strictly above d and at most 2(d+1).  Weak diameter
    bounds survive because parts are subsets.
    """
    if d < 1:
        raise ValueError("split threshold must be at least 1")
    out: list[np.ndarray] = []
    for cluster in dec.clusters:
        s = cluster.size
        if s <= d:
            raise ValueError("cluster of size <= d cannot satisfy split bounds")
        parts = max(1, s // (d + 1))
        out.extend(np.array_split(cluster, parts))
    return Decomposition(clusters=out, remainder=dec.remainder, threshold=dec.threshold)
