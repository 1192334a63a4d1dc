"""Additive-approximation all-pairs shortest paths on unweighted graphs.

Public surface: graph containers and searches, the degree decomposition and
hitting-set samplers, structured min-plus products, the +2 / +2k pipelines
with their degree-class drivers, and the generation/verification harness.
"""
from .graphs import (INF, DistanceMatrix, Graph, VirtualEdgeList, bfs_from,
                     dijkstra_overlay, is_finite, low_degree_edge_subgraph,
                     multi_bfs, restrict_to_max_degree, sat_add,
                     square_distance_matrix)
from .sampling import (Decomposition, HittingSet, decompose,
                       greedy_hitting_set, split_clusters)
from .matmul import (BoolMatrix, ClassicalCostModel, MMCostModel,
                     TableCostModel, WideIntMatrix, bool_mm, int_mm,
                     monomial_matrix, predict_cost, wideint_mm)
from .minplus import (GroupedInstance, GroupedStats, QuotientRemainder,
                      RoundStats, build_quotient_remainder, minplus_bounded,
                      minplus_bruteforce, minplus_grouped, minplus_shifted,
                      prime_window)
from .approx import (AlgoParams, ParameterPolicy, dhz_sparse_apsp,
                     exact_apsp_oracle, extend_to_all, generalize_to_k,
                     plus2_apsp, plus2_from_subset, plus2_grouped,
                     plus2_percluster, plus2k_apsp, sparse_restricted_apsp)
from .harness import (ErrorReport, GenSpec, generate, load_edge_list,
                      load_estimates, save_edge_list, save_estimates, verify)
from .cli import run_cli

__version__ = "0.1.0"

__all__ = [
    "INF", "DistanceMatrix", "Graph", "VirtualEdgeList", "bfs_from",
    "dijkstra_overlay", "is_finite", "low_degree_edge_subgraph", "multi_bfs",
    "restrict_to_max_degree", "sat_add", "square_distance_matrix",
    "Decomposition", "HittingSet", "decompose", "greedy_hitting_set",
    "split_clusters",
    "BoolMatrix", "ClassicalCostModel", "MMCostModel", "TableCostModel",
    "WideIntMatrix", "bool_mm", "int_mm", "monomial_matrix", "predict_cost",
    "wideint_mm",
    "GroupedInstance", "GroupedStats", "QuotientRemainder", "RoundStats",
    "build_quotient_remainder", "minplus_bounded", "minplus_bruteforce",
    "minplus_grouped", "minplus_shifted", "prime_window",
    "AlgoParams", "ParameterPolicy", "dhz_sparse_apsp", "exact_apsp_oracle",
    "extend_to_all", "generalize_to_k", "plus2_apsp", "plus2_from_subset",
    "plus2_grouped", "plus2_percluster", "plus2k_apsp",
    "sparse_restricted_apsp",
    "ErrorReport", "GenSpec", "generate", "load_edge_list", "load_estimates",
    "save_edge_list", "save_estimates", "verify",
    "run_cli",
]
