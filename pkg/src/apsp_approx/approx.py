"""Additive-approximation APSP algorithms and their degree-class drivers.

Estimates are square int64 matrices with the package INF sentinel, wrapped in
:class:`~apsp_approx.graphs.DistanceMatrix` at the public boundary.  Every
routine maintains the one-sided invariant that an estimate is the length of a
real walk (or INF), so outputs never undercut true distances; the upper
bounds (+2, +2k, degree-class-conditional) come from the hitting-set and
cluster arguments implemented below.

Performance note: all per-source Dijkstra sweeps ("descending rounds" and the
remainder-set extension) are batched into a single sparse search per sweep by
attaching one ghost node per source whose outgoing edges are that source's
virtual estimate edges.  Ghost nodes have no incoming edges, so per-source
results are identical to running :func:`~apsp_approx.graphs.dijkstra_overlay`
one source at a time (a property the tests check directly).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from .graphs import (INF, DistanceMatrix, Graph, VirtualEdgeList, bfs_from,
                     dijkstra_overlay, is_finite, low_degree_edge_subgraph,
                     multi_bfs, square_distance_matrix, _to_int_distances)
from .matmul import ClassicalCostModel, MMCostModel, predict_cost
from .minplus import GroupedInstance, minplus_grouped, minplus_shifted
from .sampling import decompose, greedy_hitting_set, split_clusters

# Weak diameter of decomposition clusters; bounds the per-row spread of the
# d[S, H_i] matrices fed to the structured min-plus products.
_CLUSTER_RANGE = 4


def exact_apsp_oracle(g: Graph) -> DistanceMatrix:
    """Exact all-pairs distances via one BFS per vertex."""
    return multi_bfs(g, np.arange(g.n, dtype=np.int64))


def _empty_estimates(n: int) -> np.ndarray:
    est = np.full((n, n), INF, dtype=np.int64)
    if n:
        np.fill_diagonal(est, 0)
    return est


def _symmetrize(est: np.ndarray) -> np.ndarray:
    return np.minimum(est, est.T)


def _batched_overlay_rows(n: int, base_edges: np.ndarray, sources: np.ndarray,
                          virtual_rows: np.ndarray,
                          target_mask: np.ndarray | None = None) -> np.ndarray:
    """Per-source overlay Dijkstra rows, batched through ghost sources.

    Ghost node n+i carries source i's virtual edges (finite entries of
    ``virtual_rows[i]``, optionally masked); base edges are undirected unit
    edges shared by all sources.  Returns int64 distance rows over the real
    vertices.
    """
    n_src = len(sources)
    if n_src == 0:
        return np.empty((0, n), dtype=np.int64)
    rows = []
    cols = []
    data = []
    if base_edges.size:
        # Canonicalize and deduplicate: the COO constructor sums duplicate
        # entries, so an edge listed in both orientations (e.g. two covering
        # shortcuts picking each other) would otherwise get weight 2.
        norm = np.unique(np.sort(base_edges, axis=1), axis=0)
        u, v = norm[:, 0], norm[:, 1]
        rows += [u, v]
        cols += [v, u]
        data += [np.ones(u.size), np.ones(u.size)]
    finite = is_finite(virtual_rows)
    if target_mask is not None:
        finite = finite & target_mask[None, :]
    # The explicit zero-cost ghost->source edge below must stay the only
    # (ghost, source) entry: the COO constructor sums duplicates.
    finite[np.arange(n_src), np.asarray(sources)] = False
    ghost_ids, targets = np.nonzero(finite)
    rows.append(ghost_ids + n)
    cols.append(targets)
    data.append(virtual_rows[ghost_ids, targets].astype(np.float64))
    # Ghost must also reach its own source at zero cost even if the source's
    # estimate row is empty.
    rows.append(np.arange(n_src) + n)
    cols.append(np.asarray(sources))
    data.append(np.zeros(n_src))
    mat = sp.csr_matrix((np.concatenate(data),
                         (np.concatenate(rows), np.concatenate(cols))),
                        shape=(n + n_src, n + n_src))
    dists = csgraph.dijkstra(mat, directed=True,
                             indices=np.arange(n_src) + n)
    return _to_int_distances(dists[:, :n])


def _round_edge_set(g: Graph, high_threshold: int, cover: np.ndarray) -> np.ndarray:
    """Edges for one descending round: all edges next to a low-degree vertex,
    plus one edge from every high-degree vertex to its smallest cover neighbor."""
    deg = g.degrees
    e = g.edge_list()
    low = deg < high_threshold
    kept = e[low[e[:, 0]] | low[e[:, 1]]] if e.size else e.reshape(0, 2)
    in_cover = np.zeros(g.n, dtype=bool)
    in_cover[cover] = True
    shortcuts = []
    for v in np.flatnonzero(~low):
        nbrs = g.neighbors(v)
        hits = nbrs[in_cover[nbrs]]
        if hits.size == 0:
            raise AssertionError("high-degree vertex left uncovered in round edges")
        shortcuts.append((v, hits[0]))
    if shortcuts:
        kept = np.concatenate([kept, np.asarray(shortcuts, dtype=np.int64)])
    return kept


def _descending_round(g: Graph, est: np.ndarray, sources: np.ndarray,
                      high_threshold: int, cover: np.ndarray):
    """One Dijkstra sweep out of ``sources`` over the round's edge set, using
    current estimates as virtual edges; updates est rows in place."""
    edges = _round_edge_set(g, high_threshold, cover)
    rows = _batched_overlay_rows(g.n, edges, sources, est[sources])
    est[sources] = np.minimum(est[sources], rows)


def dhz_default_thresholds(n: int, m: int, k: int) -> list[int]:
    """Degree thresholds d_0..d_k balancing round costs: d_i = ⌈(m/n)^(i/(k+1))⌉."""
    ratio = m / n if n else 1.0
    out = [1]
    for i in range(1, k + 1):
        out.append(max(1, math.ceil(ratio ** (i / (k + 1)) - 1e-9)))
    return out


def dhz_sparse_apsp(g: Graph, k: int, thresholds=None) -> DistanceMatrix:
    """+2k-approximate APSP via degree thresholds and descending searches.

    Exact BFS runs from a hitting set of the top threshold; k descending
    rounds then search out of progressively larger (lower-threshold) source
    sets over edge sets that keep every edge next to a low-degree vertex plus
    one covering shortcut per high-degree vertex, splicing in current
    estimates as virtual edges.  After the level-i round, sources know every
    distance within +2(k−i); level 0 covers all of V.
    """
    if k < 1:
        raise ValueError(f"invalid k {k} (need k >= 1)")
    n = g.n
    est = _empty_estimates(n)
    if n == 0:
        return square_distance_matrix(est)
    if thresholds is None:
        thresholds = dhz_default_thresholds(n, g.m, k)
    thresholds = [int(t) for t in thresholds]
    if len(thresholds) != k + 1 or thresholds[0] != 1:
        raise ValueError("need k+1 thresholds starting at d_0 = 1")
    if any(a > b for a, b in zip(thresholds, thresholds[1:])):
        raise ValueError("thresholds must be non-decreasing")
    if any(t < 1 or t > n for t in thresholds):
        raise ValueError("thresholds out of range")

    sets: list[np.ndarray] = [np.arange(n, dtype=np.int64)]
    for i in range(1, k + 1):
        sets.append(greedy_hitting_set(g, thresholds[i]).vertices)

    if sets[k].size:
        exact_rows = multi_bfs(g, sets[k]).values
        est[sets[k]] = np.minimum(est[sets[k]], exact_rows)
    est = _symmetrize(est)
    for i in range(k - 1, -1, -1):
        _descending_round(g, est, sets[i], thresholds[i + 1], sets[i + 1])
        est = _symmetrize(est)
    np.fill_diagonal(est, 0)
    return square_distance_matrix(est)


def sparse_restricted_apsp(g: Graph, d: int, k: int) -> DistanceMatrix:
    """dhz_sparse_apsp on the subgraph of edges next to degree-≤d vertices.

    Never underestimates distances in g; pairs with a shortest path through
    degree-≤d vertices only keep the +2k guarantee.
    """
    if d < 1:
        raise ValueError("degree bound must be at least 1")
    return dhz_sparse_apsp(low_degree_edge_subgraph(g, d), k)


def _r_incident_edges(g: Graph, r_mask: np.ndarray) -> np.ndarray:
    e = g.edge_list()
    if e.size == 0:
        return e.reshape(0, 2)
    return e[r_mask[e[:, 0]] | r_mask[e[:, 1]]]


def extend_to_all(g: Graph, source: int, r_vertices, known_row, d: int) -> np.ndarray:
    """Extend a source's estimates from V∖R to all of V.

    Runs Dijkstra from the source over the edges incident to R plus virtual
    edges weighted by the known estimates (INF entries skipped); entries of
    ``known_row`` at R positions are ignored.  Degrees inside R must be < d.
    """
    r = np.asarray(r_vertices, dtype=np.int64)
    r_mask = np.zeros(g.n, dtype=bool)
    r_mask[r] = True
    if r.size and g.degrees[r].max() >= d:
        raise ValueError("remainder set contains a vertex of degree >= d")
    known_row = np.asarray(known_row, dtype=np.int64)
    targets = np.flatnonzero(~r_mask)
    virtual = VirtualEdgeList(targets=targets, weights=known_row[targets])
    edges = _r_incident_edges(g, r_mask)
    weighted = np.concatenate([edges, np.ones((edges.shape[0], 1), dtype=np.int64)],
                              axis=1)
    dist = dijkstra_overlay(weighted, g.n, source, virtual)
    out = dist.copy()
    out[targets] = np.minimum(out[targets], known_row[targets])
    out[source] = 0
    return out


def _extend_rows_batched(g: Graph, r_mask: np.ndarray, sources: np.ndarray,
                         known_rows: np.ndarray) -> np.ndarray:
    """Batched extend_to_all over many sources (same R, shared edge base)."""
    edges = _r_incident_edges(g, r_mask)
    rows = _batched_overlay_rows(g.n, edges, sources, known_rows,
                                 target_mask=~r_mask)
    keep = ~r_mask
    rows[:, keep] = np.minimum(rows[:, keep], np.where(
        is_finite(known_rows[:, keep]), known_rows[:, keep], INF))
    rows[np.arange(len(sources)), sources] = 0
    return rows


def _cluster_products(dvs: np.ndarray, rows_of: np.ndarray,
                      clusters: list[np.ndarray], est: np.ndarray):
    """Per-cluster structured min-plus: est[:, H] = min_s d(row,s) + d(s,H)."""
    a = dvs.T[rows_of] if rows_of is not None else dvs.T
    for members in clusters:
        block = minplus_shifted(a, dvs[:, members], _CLUSTER_RANGE)
        est[:, members] = np.minimum(est[:, members], block)


def plus2_percluster(g: Graph, D: int, d: int) -> DistanceMatrix:
    """+2 estimates for the degree class [D, 2D] via per-cluster products.

    Hitting-set BFS gives d[S, V]; the threshold-d decomposition groups the
    targets into weak-diameter-4 clusters; each cluster's estimates are the
    structured min-plus of d[V, S] with d[S, H]; the low-degree remainder is
    absorbed by the extension sweep.  For every pair, the result is between
    d(u,v) and d_D(u,v) + 2, where d_D is the class-restricted walk length.
    """
    if not 1 <= d < D:
        raise ValueError(f"need 1 <= d < D, got d={d}, D={D}")
    n = g.n
    est = _empty_estimates(n)
    if n == 0:
        return square_distance_matrix(est)
    hs = greedy_hitting_set(g, min(D, n)).vertices
    if hs.size == 0:
        return square_distance_matrix(est)
    dvs = multi_bfs(g, hs).values
    dec = split_clusters(decompose(g, d), d)
    _cluster_products(dvs, None, dec.clusters, est)
    np.fill_diagonal(est, 0)
    r_mask = np.zeros(n, dtype=bool)
    r_mask[dec.remainder] = True
    all_sources = np.arange(n, dtype=np.int64)
    est = np.minimum(est, _extend_rows_batched(g, r_mask, all_sources, est))
    np.fill_diagonal(est, 0)
    return square_distance_matrix(est)


def plus2_grouped(g: Graph, D: int, d: int, q: int = 1, seed: int = 0) -> DistanceMatrix:
    """+2 estimates for the degree class [D, 2D] via one grouped product.

    Same contract as :func:`plus2_percluster`; the per-cluster products are
    replaced by a single grouped mod-prime min-plus over the padded cluster
    blocks, followed by two extension sweeps: cluster×cluster → cluster×V,
    transposed by symmetry, then V×V.
    """
    if not 1 <= d < D:
        raise ValueError(f"need 1 <= d < D, got d={d}, D={D}")
    if q < 1:
        raise ValueError("q must be at least 1")
    n = g.n
    est = _empty_estimates(n)
    if n == 0:
        return square_distance_matrix(est)
    hs = greedy_hitting_set(g, min(D, n)).vertices
    if hs.size == 0:
        return square_distance_matrix(est)
    dvs = multi_bfs(g, hs).values
    dec = split_clusters(decompose(g, d), d)
    members = np.concatenate(dec.clusters) if dec.clusters else \
        np.empty(0, dtype=np.int64)

    if members.size:
        pad = max(c.size for c in dec.clusters)
        padded = []
        real = []
        for c in dec.clusters:
            padded.append(np.concatenate([c, np.full(pad - c.size, c[0])]))
            real.append(np.concatenate([np.ones(c.size, bool),
                                        np.zeros(pad - c.size, bool)]))
        padded = np.concatenate(padded)
        real = np.concatenate(real)
        inst = GroupedInstance(a=dvs[:, padded].T, b=dvs[:, padded],
                               group_size=pad, range_bound=_CLUSTER_RANGE, q=q)
        prod = minplus_grouped(inst, seed=seed)
        core = prod[np.ix_(real, real)]
        est[np.ix_(members, members)] = np.minimum(
            est[np.ix_(members, members)], core)

    np.fill_diagonal(est, 0)
    r_mask = np.zeros(n, dtype=bool)
    r_mask[dec.remainder] = True
    if members.size:
        ext = _extend_rows_batched(g, r_mask, members, est[members])
        est[members] = np.minimum(est[members], ext)
        est = _symmetrize(est)
    all_sources = np.arange(n, dtype=np.int64)
    est = np.minimum(est, _extend_rows_batched(g, r_mask, all_sources, est))
    np.fill_diagonal(est, 0)
    return square_distance_matrix(est)


def plus2_from_subset(g: Graph, subset, D: int, d: int) -> DistanceMatrix:
    """+2 class estimates with rows restricted to a vertex subset U.

    Identical pipeline to :func:`plus2_percluster` with the row space cut to
    U; returns a |U| × n DistanceMatrix labeled by U.
    """
    if not 1 <= d < D:
        raise ValueError(f"need 1 <= d < D, got d={d}, D={D}")
    u = np.asarray(subset, dtype=np.int64)
    n = g.n
    if u.size and (u.min() < 0 or u.max() >= n):
        raise ValueError("subset vertex out of range")
    est = np.full((u.size, n), INF, dtype=np.int64)
    est[np.arange(u.size), u] = 0
    cols = np.arange(n, dtype=np.int64)
    if n == 0 or u.size == 0:
        return DistanceMatrix(values=est, row_labels=u, col_labels=cols)
    hs = greedy_hitting_set(g, min(D, n)).vertices
    if hs.size:
        dvs = multi_bfs(g, hs).values
        dec = split_clusters(decompose(g, d), d)
        _cluster_products(dvs, u, dec.clusters, est)
        est[np.arange(u.size), u] = 0
        r_mask = np.zeros(n, dtype=bool)
        r_mask[dec.remainder] = True
        est = np.minimum(est, _extend_rows_batched(g, r_mask, u, est))
        est[np.arange(u.size), u] = 0
    return DistanceMatrix(values=est, row_labels=u, col_labels=cols)


def generalize_to_k(g: Graph, subset, delta: int, estimates, k: int,
                    D: int) -> DistanceMatrix:
    """Grow +2 estimates on U×V into +2k estimates on V×V.

    U must hit the neighborhoods of all degree-≥δ vertices and carry
    class-+2 estimates.  Descending rounds with thresholds d_i = ⌈δ^(i/(k−1))⌉
    (d_{k−1} = δ, S_{k−1} = U, S_0 = V) add 2 per level: after the level-i
    sweep every source in S_i is within +2(k−i) for class-certified pairs.
    """
    if k < 2:
        raise ValueError(f"invalid k {k} (generalization needs k >= 2)")
    if delta < 1:
        raise ValueError("delta must be at least 1")
    n = g.n
    u = np.asarray(subset, dtype=np.int64)
    est = _empty_estimates(n)
    if n == 0:
        return square_distance_matrix(est)
    est_u = estimates.values if isinstance(estimates, DistanceMatrix) else \
        np.asarray(estimates, dtype=np.int64)
    if est_u.shape != (u.size, n):
        raise ValueError("estimate rows do not match the subset")
    in_u = np.zeros(n, dtype=bool)
    in_u[u] = True
    covered = g.to_csr().dot(in_u.astype(np.int64)) > 0
    if np.any((g.degrees >= delta) & ~covered):
        raise ValueError("subset misses the neighborhood of a degree->=delta vertex")
    if u.size:
        est[u] = np.minimum(est[u], est_u)
        est = _symmetrize(est)

    thresholds = [max(1, math.ceil(delta ** (i / (k - 1)) - 1e-9))
                  for i in range(k)]
    sets: list[np.ndarray] = [np.arange(n, dtype=np.int64)]
    for i in range(1, k - 1):
        sets.append(greedy_hitting_set(g, min(thresholds[i], max(n, 1))).vertices)
    sets.append(u)

    for i in range(k - 2, -1, -1):
        _descending_round(g, est, sets[i], thresholds[i + 1], sets[i + 1])
        est = _symmetrize(est)
    np.fill_diagonal(est, 0)
    return square_distance_matrix(est)


# ---------------------------------------------------------------------------
# Parameter policy and drivers
# ---------------------------------------------------------------------------

@dataclass
class AlgoParams:
    """Optional fixed parameter overrides for the degree-class drivers."""

    D: int | None = None
    d: int | None = None
    q: int | None = None
    delta: int | None = None


@dataclass
class ParameterPolicy:
    """Chooses per-class parameters and the sparse-vs-matrix branch.

    Exponent formulas follow the classical-ω parameterization (d and q from
    (n/D) powers for +2; δ = D^((k−1)/(k+1)), d = D^(k/(k+1)) for +2k, which
    reproduce the crossover exponents at the critical class).  Branch costs
    are leading-order surrogates with the matrix-product term delegated to
    the cost model, so lowering ω shifts the crossover toward smaller D.
    Every field of ``overrides`` replaces the corresponding computed value.
    """

    model: MMCostModel = field(default_factory=ClassicalCostModel)
    overrides: AlgoParams = field(default_factory=AlgoParams)

    def effective_omega(self) -> float:
        probe = predict_cost(self.model, 1024.0, 1024.0, 1024.0)
        return float(np.clip(math.log(max(probe, 2.0)) / math.log(1024.0), 2.0, 3.0))

    def plus2_class_params(self, n: int, D: int):
        """(d, q) for the +2 matrix branch at class D, or None if infeasible."""
        omega = self.effective_omega()
        d = self.overrides.d
        if d is None:
            e_d = (omega - 1.0) / (5.0 - omega)
            d = max(2, math.ceil((n / D) ** e_d))
        d = min(d, D - 1)
        if d < 1:
            return None
        q = self.overrides.q
        if q is None:
            e_q = (3.0 - omega) / 2.0
            q = max(1, round((n / max(D * d, 1)) ** e_q))
        if q < 1:
            return None
        return int(d), int(q)

    def plus2k_class_params(self, D: int, k: int):
        """(d, delta) for the +2k matrix branch at class D, or None."""
        delta = self.overrides.delta
        if delta is None:
            delta = max(1, min(D, math.ceil(D ** ((k - 1.0) / (k + 1.0)) - 1e-9)))
        d = self.overrides.d
        if d is None:
            d = max(2, math.ceil(D ** (k / (k + 1.0)) - 1e-9))
        d = min(d, D - 1)
        if d < 1 or d >= D or not 1 <= delta <= D:
            return None
        return int(d), int(delta)

    def sparse_cost(self, n: int, D: int, k: int) -> float:
        return n * n * (2.0 * D) ** (1.0 / (k + 1.0))

    def plus2_matrix_cost(self, n: int, D: int, d: int, q: int) -> float:
        mm = predict_cost(self.model, n, max(n / D, 1.0), d)
        return n * n * d + (n / d) * mm

    def plus2k_matrix_cost(self, n: int, D: int, d: int, delta: int, k: int) -> float:
        gen = n * n * delta ** (1.0 / (k - 1.0))
        mm = predict_cost(self.model, max(n / delta, 1.0), max(n / D, 1.0), d)
        return gen + (n / max(delta * d, 1)) * mm

    def use_matrix_branch(self, n: int, D: int, k: int, params) -> bool:
        if params is None:
            return False
        if k == 1:
            d, q = params
            matrix = self.plus2_matrix_cost(n, D, d, q)
        else:
            d, delta = params
            matrix = self.plus2k_matrix_cost(n, D, d, delta, k)
        return matrix < self.sparse_cost(n, D, k)


def _degree_classes(n: int, override_d: int | None) -> list[int]:
    if override_d is not None:
        return [int(override_d)]
    if n <= 0:
        return []
    top = 2 ** math.ceil(math.log2(n)) if n > 1 else 1
    vals = []
    v = 1
    while v <= top:
        vals.append(v)
        v *= 2
    return vals


def plus2_apsp(g: Graph, policy: ParameterPolicy | None = None, seed: int = 0,
               variant: str = "grouped") -> DistanceMatrix:
    """+2-approximate APSP: combine degree classes D, picking per class the
    cheaper of the sparse branch and the cluster matrix branch.

    Every pair's true shortest path has some maximum degree, which lands in a
    class [D, 2D]; the edge subgraph of edges next to degree-≤2D vertices
    preserves both that path and the in-class degrees, so the class run
    certifies the pair within +2.  The entrywise minimum across classes never
    underestimates, so the final matrix is a +2 approximation everywhere.
    """
    if variant not in ("grouped", "percluster"):
        raise ValueError(f"unknown plus2 variant {variant!r}")
    policy = policy or ParameterPolicy()
    n = g.n
    est = _empty_estimates(n)
    deg = g.degrees
    for D in _degree_classes(n, policy.overrides.D):
        forced = policy.overrides.D is not None
        if not forced and not ((deg >= D) & (deg <= 2 * D)).any():
            continue
        params = policy.plus2_class_params(n, D)
        if policy.use_matrix_branch(n, D, 1, params):
            g_d = low_degree_edge_subgraph(g, 2 * D)
            d, q = params
            if variant == "grouped":
                class_est = plus2_grouped(g_d, D, d, q, seed).values
            else:
                class_est = plus2_percluster(g_d, D, d).values
        else:
            class_est = sparse_restricted_apsp(g, 2 * D, 1).values
        est = np.minimum(est, class_est)
    est = _symmetrize(est)
    np.fill_diagonal(est, 0)
    return square_distance_matrix(est)


def plus2k_apsp(g: Graph, k: int, policy: ParameterPolicy | None = None,
                seed: int = 0) -> DistanceMatrix:
    """+2k-approximate APSP (k ≥ 2): degree classes with a sparse branch or a
    subset-restricted +2 pipeline grown to +2k by descending rounds."""
    if k < 2:
        raise ValueError(f"invalid k {k} (need k >= 2; use plus2_apsp for +2)")
    policy = policy or ParameterPolicy()
    n = g.n
    est = _empty_estimates(n)
    deg = g.degrees
    for D in _degree_classes(n, policy.overrides.D):
        forced = policy.overrides.D is not None
        if not forced and not ((deg >= D) & (deg <= 2 * D)).any():
            continue
        params = policy.plus2k_class_params(D, k)
        if policy.use_matrix_branch(n, D, k, params):
            d, delta = params
            g_d = low_degree_edge_subgraph(g, 2 * D)
            subset = greedy_hitting_set(g_d, min(delta, max(g_d.n, 1))).vertices
            est_u = plus2_from_subset(g_d, subset, D, d)
            class_est = generalize_to_k(g_d, subset, delta, est_u, k, D).values
        else:
            class_est = sparse_restricted_apsp(g, 2 * D, k).values
        est = np.minimum(est, class_est)
    est = _symmetrize(est)
    np.fill_diagonal(est, 0)
    return square_distance_matrix(est)
