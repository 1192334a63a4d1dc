"""Graph representation, exact searches, and degree-based restrictions.

Distances and estimates everywhere in this package are numpy int64 with a
dedicated infinity sentinel ``INF`` (the largest int64).  Arithmetic on
distances goes through :func:`sat_add`, which saturates at INF, so a sum
involving an unreachable pair can never wrap around.

BFS and Dijkstra run on scipy's compressed-sparse-graph routines; results are
converted back to exact int64 at the boundary.  All path sums handled here are
far below 2**53, so the float64 intermediate representation is exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

INF = np.int64(np.iinfo(np.int64).max)

# Sums at or above this threshold are treated as infinite.  Finite distance
# data stays below _FINITE_MAX, so one saturating addition cannot reach the
# int64 overflow region.
_SAT_CUT = np.int64(1) << 60
_FINITE_MAX = np.int64(1) << 52


def is_finite(x):
    """Elementwise test for finite (non-sentinel) distance values."""
    return np.asarray(x) < _SAT_CUT


def sat_add(a, b):
    """Elementwise a + b with saturation: any sum touching INF stays INF."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    out = np.where(is_finite(a) & is_finite(b), a + b, INF)
    return np.where(out >= _SAT_CUT, INF, out)


def _to_int_distances(float_dists):
    """Convert scipy's float distance output to int64 with INF sentinel."""
    arr = np.asarray(float_dists)
    out = np.full(arr.shape, INF, dtype=np.int64)
    finite = np.isfinite(arr)
    out[finite] = np.round(arr[finite]).astype(np.int64)
    return out


@dataclass
class Graph:
    """Immutable simple undirected unweighted graph in CSR adjacency form.

    ``indptr``/``indices`` store per-vertex sorted neighbor lists; every
    undirected edge appears in both endpoint lists, so ``indices`` has length
    2m.  Construct through :meth:`from_edges`, which symmetrizes, sorts,
    deduplicates, and drops self-loops.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    _csr: sp.csr_matrix | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.indptr = np.asarray(self.indptr, dtype=np.int64)
        self.indices = np.asarray(self.indices, dtype=np.int64)
        self.indptr.flags.writeable = False
        self.indices.flags.writeable = False

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        """Build a canonical graph from an iterable of (u, v) pairs.

        Self-loops are dropped silently; duplicate and reversed edges are
        deduplicated.  Raises ValueError for out-of-range vertex ids.
        """
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                       dtype=np.int64)
        if e.size == 0:
            e = e.reshape(0, 2)
        if e.ndim != 2 or e.shape[1] != 2:
            raise ValueError("edges must be pairs of vertex ids")
        if e.size and (e.min() < 0 or e.max() >= n):
            raise ValueError("edge endpoint out of range")
        e = e[e[:, 0] != e[:, 1]]
        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        uniq = np.unique(np.stack([lo, hi], axis=1), axis=0) if e.size else e
        both = np.concatenate([uniq, uniq[:, ::-1]], axis=0) if uniq.size else uniq
        if both.size:
            order = np.lexsort((both[:, 1], both[:, 0]))
            both = both[order]
            counts = np.bincount(both[:, 0], minlength=n)
        else:
            counts = np.zeros(n, dtype=np.int64)
        indptr = np.concatenate([[0], np.cumsum(counts)])
        indices = both[:, 1] if both.size else np.empty(0, dtype=np.int64)
        return cls(n=n, indptr=indptr, indices=indices)

    @property
    def m(self) -> int:
        """Number of undirected edges (each counted once)."""
        return self.indices.size // 2

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def edge_list(self) -> np.ndarray:
        """Return the m unique edges as an (m, 2) array with u < v."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        mask = src < self.indices
        return np.stack([src[mask], self.indices[mask]], axis=1)

    def to_csr(self) -> sp.csr_matrix:
        """Adjacency as a scipy CSR matrix of unit weights (cached)."""
        if self._csr is None:
            data = np.ones(self.indices.size, dtype=np.int8)
            self._csr = sp.csr_matrix(
                (data, self.indices.copy(), self.indptr.copy()), shape=(self.n, self.n)
            )
        return self._csr


@dataclass
class DistanceMatrix:
    """Rectangular table of distances/estimates labeled by vertex lists."""

    values: np.ndarray
    row_labels: np.ndarray
    col_labels: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.int64)
        self.row_labels = np.asarray(self.row_labels, dtype=np.int64)
        self.col_labels = np.asarray(self.col_labels, dtype=np.int64)
        if self.values.shape != (self.row_labels.size, self.col_labels.size):
            raise ValueError("distance matrix shape does not match labels")
        finite = is_finite(self.values)
        if finite.any() and self.values[finite].min() < 0:
            raise ValueError("negative distance entry")

    @property
    def shape(self):
        return self.values.shape


def square_distance_matrix(values: np.ndarray) -> DistanceMatrix:
    """Wrap an n x n value array as a V x V DistanceMatrix."""
    n = values.shape[0]
    labels = np.arange(n, dtype=np.int64)
    return DistanceMatrix(values=values, row_labels=labels, col_labels=labels)


@dataclass
class VirtualEdgeList:
    """Weighted edges from a single (implicit) source vertex.

    Entries with INF weight are tolerated and skipped wherever the list is
    materialized into a search graph.
    """

    targets: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.targets = np.asarray(self.targets, dtype=np.int64)
        self.weights = np.asarray(self.weights, dtype=np.int64)
        if self.targets.shape != self.weights.shape or self.targets.ndim != 1:
            raise ValueError("virtual edge targets/weights must be parallel 1-d arrays")
        if self.weights.size and self.weights.min() < 0:
            raise ValueError("negative virtual edge weight")


def bfs_from(g: Graph, s: int) -> np.ndarray:
    """Exact unweighted distances from s to every vertex (INF if unreachable)."""
    if not 0 <= s < g.n:
        raise ValueError(f"invalid source vertex {s}")
    dists = csgraph.dijkstra(g.to_csr(), directed=True, unweighted=True, indices=[s])
    return _to_int_distances(dists[0])


def multi_bfs(g: Graph, sources) -> DistanceMatrix:
    """Stack of BFS rows, one per source, as a |sources| x n DistanceMatrix."""
    src = np.asarray(sources, dtype=np.int64).reshape(-1)
    if src.size and (src.min() < 0 or src.max() >= g.n):
        raise ValueError("invalid source vertex in multi_bfs")
    if np.unique(src).size != src.size:
        raise ValueError("multi_bfs sources must be distinct")
    if src.size == 0:
        values = np.empty((0, g.n), dtype=np.int64)
    else:
        dists = csgraph.dijkstra(g.to_csr(), directed=True, unweighted=True, indices=src)
        values = _to_int_distances(dists)
    return DistanceMatrix(values=values, row_labels=src,
                          col_labels=np.arange(g.n, dtype=np.int64))


# Largest edge weight dijkstra_overlay accepts; keeps n * max_weight well
# below 2**53 so float64 path sums stay exact.
_MAX_OVERLAY_WEIGHT = np.int64(1) << 39


def _min_dedup_coo(rows, cols, weights, n):
    """CSR from COO triples, resolving duplicate (row, col) cells by minimum."""
    if rows.size == 0:
        return sp.csr_matrix((n, n))
    key = rows * n + cols
    order = np.argsort(key, kind="stable")
    key, rows, cols, weights = key[order], rows[order], cols[order], weights[order]
    starts = np.concatenate([[0], np.flatnonzero(np.diff(key)) + 1])
    w = np.minimum.reduceat(weights, starts)
    return sp.csr_matrix((w.astype(np.float64), (rows[starts], cols[starts])),
                         shape=(n, n))


def dijkstra_overlay(edges, n: int, source: int,
                     virtual: VirtualEdgeList | None = None) -> np.ndarray:
    """Exact single-source distances on (edges ∪ virtual edges from source).

    Parameters
    ----------
    edges : array-like of (u, v, w) rows
        Undirected nonnegative-integer-weighted edges.
    n : int
        Vertex count.
    source : int
        Source vertex; virtual edges attach here only.
    virtual : VirtualEdgeList, optional
        Extra weighted edges out of the source; INF-weight entries skipped.

    Returns
    -------
    np.ndarray
        int64 row of length n; INF for unreachable vertices.
    """
    if not 0 <= source < n:
        raise ValueError(f"invalid source vertex {source}")
    e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                   dtype=np.int64)
    if e.size == 0:
        e = e.reshape(0, 3)
    if e.ndim != 2 or e.shape[1] != 3:
        raise ValueError("edges must be (u, v, w) triples")
    if e.size:
        if e[:, :2].min() < 0 or e[:, :2].max() >= n:
            raise ValueError("edge endpoint out of range")
        if e[:, 2].min() < 0:
            raise ValueError("negative edge weight")
        if e[:, 2].max() > _MAX_OVERLAY_WEIGHT:
            raise ValueError("edge weight too large for exact search")
    rows = [e[:, 0], e[:, 1]]
    cols = [e[:, 1], e[:, 0]]
    wts = [e[:, 2], e[:, 2]]
    if virtual is not None and virtual.targets.size:
        keep = is_finite(virtual.weights)
        vt, vw = virtual.targets[keep], virtual.weights[keep]
        if vt.size and (vt.min() < 0 or vt.max() >= n):
            raise ValueError("virtual edge target out of range")
        if vw.size and vw.max() > _MAX_OVERLAY_WEIGHT:
            raise ValueError("virtual edge weight too large for exact search")
        src = np.full(vt.shape, source, dtype=np.int64)
        rows += [src, vt]
        cols += [vt, src]
        wts += [vw, vw]
    mat = _min_dedup_coo(np.concatenate(rows), np.concatenate(cols),
                         np.concatenate(wts), n)
    dists = csgraph.dijkstra(mat, directed=True, indices=[source])
    return _to_int_distances(dists[0])


def restrict_to_max_degree(g: Graph, cap: int) -> Graph:
    """Induced subgraph on vertices of degree ≤ cap, with vertex ids preserved.

    Removed vertices stay in the vertex set as isolates so that labels remain
    globally consistent across degree classes.
    """
    if cap < 0:
        raise ValueError("degree cap must be nonnegative")
    deg = g.degrees
    e = g.edge_list()
    keep = (deg[e[:, 0]] <= cap) & (deg[e[:, 1]] <= cap)
    return Graph.from_edges(g.n, e[keep])


def low_degree_edge_subgraph(g: Graph, d: int) -> Graph:
    """Subgraph keeping exactly the edges with an endpoint of degree ≤ d.

    Vertices of degree ≤ d retain every incident edge, hence their full
    degree; the edge count is at most d·n.
    """
    if d < 1:
        raise ValueError("degree bound must be at least 1")
    deg = g.degrees
    e = g.edge_list()
    keep = (deg[e[:, 0]] <= d) | (deg[e[:, 1]] <= d)
    return Graph.from_edges(g.n, e[keep])
