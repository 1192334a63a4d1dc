"""Generator specs, serialization round trips, the verifier, and the CLI."""
from __future__ import annotations

import numpy as np
import pytest

from apsp_approx import INF, Graph, exact_apsp_oracle, is_finite
from apsp_approx.cli import run_cli
from apsp_approx.harness import (CSV_HEADER, ErrorReport, GenSpec, generate,
                                 load_edge_list, load_estimates,
                                 save_edge_list, save_estimates, verify)
from oracles import floyd_warshall


# ---------------------------------------------------------------------------
# Generator specs
# ---------------------------------------------------------------------------

def test_genspec_parse_and_roundtrip():
    spec = GenSpec.parse("er:n=30,p=0.15,seed=3")
    assert (spec.family, spec.n) == ("er", 30)
    assert spec.params == {"p": 0.15, "seed": 3}
    assert GenSpec.parse(str(spec)) == spec
    # aliases normalize to the canonical family name
    assert GenSpec.parse("erdos-renyi:n=5").family == "er"
    assert GenSpec.parse("random-regular:n=8,r=3").family == "regular"


@pytest.mark.parametrize("bad", [
    "blob:n=3",          # unknown family
    "er:p=0.1",          # missing n
    "er:n=5,p0.1",       # malformed key=value pair
    "path:n=5,p=0.3",    # parameter the family does not take
])
def test_genspec_rejects(bad):
    with pytest.raises(ValueError):
        GenSpec.parse(bad)


def test_generate_family_shapes():
    path = generate("path:n=6")
    assert path.m == 5 and list(path.degrees[[0, 3, 5]]) == [1, 2, 1]
    star = generate("star:n=7")
    assert star.degrees[0] == 6 and (star.degrees[1:] == 1).all()
    assert generate("complete:n=6").m == 15
    tree = generate("tree:n=20,seed=2")
    assert tree.m == 19
    assert is_finite(exact_apsp_oracle(tree).values).all()
    reg = generate("regular:n=10,r=3,seed=1")
    assert (reg.degrees == 3).all()
    assert generate("er:n=12,p=0,seed=0").m == 0
    assert generate("er:n=12,p=1,seed=0").m == 12 * 11 // 2


def test_generate_planted_structure():
    g = generate("planted:n=10,c=2,p_in=1,p_out=0,seed=0")
    dist = floyd_warshall(g)
    blocks = np.arange(10) // 5
    same = blocks[:, None] == blocks[None, :]
    assert is_finite(dist[same]).all()
    assert not is_finite(dist[~same]).any()


def test_generate_determinism_and_errors():
    a, b = generate("er:n=25,p=0.2,seed=7"), generate("er:n=25,p=0.2,seed=7")
    assert np.array_equal(a.edge_list(), b.edge_list())
    c = generate("er:n=25,p=0.2,seed=8")
    assert not np.array_equal(a.edge_list(), c.edge_list())
    with pytest.raises(ValueError):
        generate("regular:n=5,r=3")      # n*r odd
    with pytest.raises(ValueError):
        generate("er:n=5,p=1.5")


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def test_edge_list_roundtrip(tmp_path):
    rng = np.random.default_rng(50)
    mask = np.triu(rng.random((30, 30)) < 0.2, k=1)
    g = Graph.from_edges(30, np.argwhere(mask))
    path = tmp_path / "g.txt"
    save_edge_list(g, str(path))
    assert path.read_text().startswith("# n=30\n")
    back = load_edge_list(str(path))
    assert back.n == g.n and np.array_equal(back.edge_list(), g.edge_list())


def test_edge_list_header_optional_and_comments(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("# a comment\n0 1\n\n# another\n2 1\n")
    g = load_edge_list(str(path))
    assert g.n == 3 and g.m == 2          # n inferred from the largest id
    empty = tmp_path / "empty.txt"
    empty.write_text("")
    assert load_edge_list(str(empty)).n == 0


@pytest.mark.parametrize("content,fragment", [
    ("0 x\n", "non-integer"),
    ("0 1 2\n", "expected 'u v'"),
    ("-1 2\n", "negative"),
    ("# n=2\n0 5\n", ">= declared"),
])
def test_edge_list_load_errors(tmp_path, content, fragment):
    path = tmp_path / "bad.txt"
    path.write_text(content)
    with pytest.raises(ValueError, match=fragment):
        load_edge_list(str(path))


def test_edge_list_error_carries_line_number(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("0 1\n1 2\noops here\n")
    with pytest.raises(ValueError, match=":3:"):
        load_edge_list(str(path))


def test_estimates_roundtrip(tmp_path):
    est = np.array([[0, 3, INF], [3, 0, 7], [INF, 7, 0]], dtype=np.int64)
    path = tmp_path / "est.csv"
    save_estimates(est, str(path))
    assert "INF" in path.read_text()
    assert np.array_equal(load_estimates(str(path)), est)


def test_estimates_load_errors(tmp_path):
    ragged = tmp_path / "ragged.csv"
    ragged.write_text("0,1\n2\n")
    with pytest.raises(ValueError, match="ragged"):
        load_estimates(str(ragged))
    junk = tmp_path / "junk.csv"
    junk.write_text("0,about\n")
    with pytest.raises(ValueError, match="non-integer"):
        load_estimates(str(junk))


# ---------------------------------------------------------------------------
# Verifier
# ---------------------------------------------------------------------------

@pytest.fixture
def small_graph():
    rng = np.random.default_rng(51)
    mask = np.triu(rng.random((20, 20)) < 0.15, k=1)
    return Graph.from_edges(20, np.argwhere(mask))


def test_verify_exact_estimates(small_graph):
    exact = exact_apsp_oracle(small_graph).values
    rep = verify(small_graph, exact, 2)
    assert rep.passed and rep.max_error == 0 and rep.mean_error == 0.0
    assert rep.err_hist == [400, 0, 0, 0] and rep.pairs_checked == 400
    assert rep.k == 1 and rep.n == 20


def test_verify_buckets_shifted_estimates(small_graph):
    exact = exact_apsp_oracle(small_graph).values
    fin = is_finite(exact)
    off = fin & ~np.eye(20, dtype=bool)
    est = exact.copy()
    est[off] += 1
    rep = verify(small_graph, est, 2)
    assert rep.passed and rep.max_error == 1
    assert rep.err_hist[1] == int(off.sum())
    assert rep.err_hist[0] == 400 - int(off.sum())


def test_verify_flags_violations(small_graph):
    exact = exact_apsp_oracle(small_graph).values
    u, v = small_graph.edge_list()[0]
    under = exact.copy()
    under[u, v] = 0                      # undershoot on one ordered pair
    assert verify(small_graph, under, 2).violations == 1
    over = exact.copy()
    over[u, v] = exact[u, v] + 3         # past the +2 bound
    rep = verify(small_graph, over, 2)
    assert rep.violations == 1 and rep.max_error == 3
    inf_mismatch = exact.copy()
    inf_mismatch[u, v] = INF
    assert verify(small_graph, inf_mismatch, 2).violations == 1


def test_verify_agreeing_unreachable_pairs_pass():
    g = Graph.from_edges(4, [(0, 1), (2, 3)])   # two components
    rep = verify(g, exact_apsp_oracle(g).values, 0)
    assert rep.passed and rep.err_hist[0] == 16


def test_verify_input_checks(small_graph):
    exact = exact_apsp_oracle(small_graph).values
    with pytest.raises(ValueError, match="bound"):
        verify(small_graph, exact, -1)
    with pytest.raises(ValueError, match="shape"):
        verify(small_graph, exact[:5], 2)


def test_verify_size_guard_and_force():
    big = Graph.from_edges(2001, np.empty((0, 2), dtype=np.int64))
    zeros = np.zeros((2001, 2001), dtype=np.int64)
    with pytest.raises(ValueError, match="force"):
        verify(big, zeros, 2)
    rep = verify(big, zeros, 2, force=True)
    assert rep.violations == 2001 * 2000  # claims reachability that is not there


def test_error_report_csv_row():
    rep = ErrorReport(algo="dhz", n=10, m=20, params="er:n=10;p=0.5", k=2,
                      max_error=3, mean_error=0.25, err_hist=[90, 5, 4, 0, 0, 1],
                      pairs_checked=100, violations=1, wall_ms=12.3456)
    assert rep.csv_row() == \
        "dhz,10,20,er:n=10;p=0.5,2,3,0.250000,90|5|4|0|0|1,100,1,12.346"
    assert not rep.passed
    assert len(CSV_HEADER.split(",")) == len(rep.csv_row().split(","))


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def test_cli_run_and_verify_ok(capsys):
    assert run_cli(["run", "--algo", "exact",
                    "--gen", "er:n=30,p=0.2,seed=1", "--verify"]) == 0
    out = capsys.readouterr().out
    assert "exact: n=30" in out and "violations=0" in out


@pytest.mark.parametrize("argv", [
    ["run", "--algo", "dhz", "--k", "2", "--gen", "er:n=40,p=0.1,seed=2"],
    ["run", "--algo", "plus2-warmup", "--gen", "er:n=35,p=0.3,seed=3"],
    ["run", "--algo", "plus2-fast", "--gen", "regular:n=30,r=4,seed=4"],
    ["run", "--algo", "plus2-fast", "--omega", "2.1",
     "--gen", "er:n=30,p=0.5,seed=5"],
    ["run", "--algo", "plus2k", "--k", "2", "--gen", "planted:n=40,c=4,seed=6"],
])
def test_cli_algos_verify_clean(argv, capsys):
    assert run_cli(argv + ["--verify"]) == 0
    assert "violations=0" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["run", "--algo", "plus2k", "--gen", "path:n=5"],            # missing k
    ["run", "--algo", "plus2k", "--k", "1", "--gen", "path:n=5"],
    ["run", "--algo", "dhz", "--k", "0", "--gen", "path:n=5"],
    ["run", "--algo", "exact", "--k", "2", "--gen", "path:n=5"],
    ["run", "--algo", "exact"],                                  # no graph source
    ["run", "--algo", "exact", "--gen", "path:n=5", "--input", "x"],
    ["run", "--algo", "nope", "--gen", "path:n=5"],
    ["run", "--algo", "exact", "--gen", "wat:n=5"],
    ["run", "--algo", "exact", "--input", "/nonexistent/file"],
    ["verify", "--input", "/nonexistent/file", "--estimates", "x",
     "--bound", "2"],
])
def test_cli_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        run_cli(argv)
    assert exc.value.code == 2
    capsys.readouterr()


def test_cli_artifact_roundtrip(tmp_path, capsys):
    graph_file = str(tmp_path / "g.txt")
    est_file = str(tmp_path / "est.csv")
    report_file = str(tmp_path / "report.csv")
    argv = ["run", "--algo", "plus2-fast", "--gen", "er:n=40,p=0.15,seed=9",
            "--save-graph", graph_file, "--output", est_file,
            "--report", report_file]
    assert run_cli(argv) == 0
    assert run_cli(argv) == 0            # appending must not duplicate header
    lines = (tmp_path / "report.csv").read_text().strip().splitlines()
    assert lines[0] == CSV_HEADER and len(lines) == 3
    assert lines[1].startswith("plus2-fast,40,")

    # the saved artifacts replay through the verify subcommand
    assert run_cli(["verify", "--input", graph_file,
                    "--estimates", est_file, "--bound", "2"]) == 0
    capsys.readouterr()

    # tamper with one entry: a direct edge reported as distance 0
    g = load_edge_list(graph_file)
    est = load_estimates(est_file)
    u, v = g.edge_list()[0]
    est[u, v] = 0
    save_estimates(est, est_file)
    assert run_cli(["verify", "--input", graph_file,
                    "--estimates", est_file, "--bound", "2"]) == 1
    assert "violations=1" in capsys.readouterr().out


def test_cli_forced_class_runs(capsys):
    argv = ["run", "--algo", "plus2-warmup", "--gen", "er:n=30,p=0.3,seed=3",
            "--D", "8", "--d", "3"]
    assert run_cli(argv) == 0
    assert "plus2-warmup: n=30" in capsys.readouterr().out
