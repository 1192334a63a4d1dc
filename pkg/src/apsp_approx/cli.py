"""Command-line entry points.

``apsp run`` executes an algorithm on a loaded or generated graph and can
verify the result against the exact BFS oracle; ``apsp verify`` checks a
saved estimate matrix.  Exit status: 0 on success (no violations when
verification ran), 1 when verification found violations, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import sys
import time

from .approx import (AlgoParams, ParameterPolicy, dhz_sparse_apsp,
                     exact_apsp_oracle, plus2_apsp, plus2k_apsp)
from .harness import (CSV_HEADER, GenSpec, generate, load_edge_list,
                      load_estimates, save_edge_list, save_estimates, verify)
from .matmul import ClassicalCostModel

_ALGOS = ("exact", "dhz", "plus2-warmup", "plus2-fast", "plus2k")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="apsp",
        description="Additive-approximation all-pairs shortest paths.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an algorithm on a graph")
    run.add_argument("--algo", required=True, choices=_ALGOS)
    run.add_argument("--k", type=int, default=None,
                     help="approximation level (dhz: k>=1, plus2k: k>=2)")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="edge-list file")
    src.add_argument("--gen", help="generator spec, e.g. er:n=300,p=0.1,seed=1")
    run.add_argument("--seed", type=int, default=0,
                     help="seed for randomized internals")
    run.add_argument("--verify", action="store_true",
                     help="check output against the exact BFS oracle")
    run.add_argument("--force", action="store_true",
                     help="allow oracle verification beyond n=2000")
    run.add_argument("--report", metavar="FILE.csv",
                     help="append a CSV result row (implies verification)")
    run.add_argument("--output", metavar="FILE.csv",
                     help="write the estimate matrix (INF for unreachable)")
    run.add_argument("--save-graph", metavar="FILE",
                     help="write the (generated) graph as an edge list")
    run.add_argument("--omega", type=float, default=3.0,
                     help="matrix-multiplication exponent for the cost policy")
    run.add_argument("--D", type=int, default=None,
                     help="fix the degree class (skip the class sweep)")
    run.add_argument("--d", type=int, default=None,
                     help="fix the decomposition threshold")
    run.add_argument("--q", type=int, default=None,
                     help="fix the group count of the structured product")
    run.add_argument("--delta", type=int, default=None,
                     help="fix the subset threshold for plus2k")

    chk = sub.add_parser("verify", help="verify a saved estimate matrix")
    chk.add_argument("--input", required=True, help="edge-list file")
    chk.add_argument("--estimates", required=True, help="estimate CSV file")
    chk.add_argument("--bound", required=True, type=int,
                     help="allowed additive error")
    chk.add_argument("--force", action="store_true",
                     help="allow oracle verification beyond n=2000")
    return parser


def _load_graph(args, parser):
    if args.input:
        try:
            return load_edge_list(args.input), f"file:{args.input}"
        except (OSError, ValueError) as exc:
            parser.error(f"cannot load {args.input}: {exc}")
    try:
        spec = GenSpec.parse(args.gen)
        return generate(spec), str(spec)
    except ValueError as exc:
        parser.error(f"bad generator spec: {exc}")


def _run(args, parser) -> int:
    g, source_desc = _load_graph(args, parser)
    algo = args.algo
    if algo == "dhz":
        k = 1 if args.k is None else args.k
        if k < 1:
            parser.error("dhz needs --k >= 1")
    elif algo == "plus2k":
        k = args.k
        if k is None or k < 2:
            parser.error("plus2k needs --k >= 2")
    else:
        if args.k is not None:
            parser.error(f"--k does not apply to --algo {algo}")
        k = 0 if algo == "exact" else 1

    policy = ParameterPolicy(
        model=ClassicalCostModel(omega=args.omega),
        overrides=AlgoParams(D=args.D, d=args.d, q=args.q, delta=args.delta))

    start = time.perf_counter()
    if algo == "exact":
        result = exact_apsp_oracle(g)
    elif algo == "dhz":
        result = dhz_sparse_apsp(g, k)
    elif algo == "plus2-warmup":
        result = plus2_apsp(g, policy, seed=args.seed, variant="percluster")
    elif algo == "plus2-fast":
        result = plus2_apsp(g, policy, seed=args.seed, variant="grouped")
    else:
        result = plus2k_apsp(g, k, policy, seed=args.seed)
    wall_ms = (time.perf_counter() - start) * 1000.0

    if args.save_graph:
        save_edge_list(g, args.save_graph)
    if args.output:
        save_estimates(result, args.output)

    print(f"{algo}: n={g.n} m={g.m} graph={source_desc} wall_ms={wall_ms:.1f}")
    if not (args.verify or args.report):
        return 0

    bound = 2 * k
    try:
        report = verify(g, result, bound, force=args.force)
    except ValueError as exc:
        parser.error(str(exc))
    report.algo = algo
    report.params = source_desc.replace(",", ";")
    report.k = k
    report.wall_ms = wall_ms
    print(f"verify: bound={bound} max_error={report.max_error} "
          f"mean_error={report.mean_error:.4f} violations={report.violations} "
          f"pairs={report.pairs_checked}")
    if args.report:
        _append_report(args.report, report)
    return 0 if report.passed else 1


def _append_report(path: str, report):
    try:
        with open(path) as fh:
            has_header = fh.readline().strip() == CSV_HEADER
    except OSError:
        has_header = False
    with open(path, "a") as fh:
        if not has_header:
            fh.write(CSV_HEADER + "\n")
        fh.write(report.csv_row() + "\n")


def _verify_cmd(args, parser) -> int:
    try:
        g = load_edge_list(args.input)
        est = load_estimates(args.estimates)
    except (OSError, ValueError) as exc:
        parser.error(str(exc))
    try:
        report = verify(g, est, args.bound, force=args.force)
    except ValueError as exc:
        parser.error(str(exc))
    print(f"verify: bound={args.bound} max_error={report.max_error} "
          f"mean_error={report.mean_error:.4f} violations={report.violations} "
          f"pairs={report.pairs_checked}")
    return 0 if report.passed else 1


def run_cli(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "run":
        return _run(args, parser)
    return _verify_cmd(args, parser)


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
