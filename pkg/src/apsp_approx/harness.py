"""Instance generation, edge-list/estimate serialization, and verification.

The verifier compares an estimate matrix against the exact BFS oracle and
classifies every ordered pair into an additive-error bucket 0..bound or the
violation bucket (undershoot, overshoot past the bound, or finite/INF
mismatch).  Unreachable pairs that both sides agree on count as error 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graphs import INF, DistanceMatrix, Graph, is_finite

CSV_HEADER = ("algo,n,m,params,k,max_error,mean_error,err_hist,"
              "pairs_checked,violations,wall_ms")

# Canonical family names and accepted aliases for generator specs.
_FAMILIES = {
    "er": "er", "erdos-renyi": "er",
    "regular": "regular", "random-regular": "regular",
    "planted": "planted", "planted-clusters": "planted",
    "path": "path", "star": "star", "complete": "complete",
    "tree": "tree",
}
_FAMILY_PARAMS = {
    "er": {"p", "seed"},
    "regular": {"r", "seed"},
    "planted": {"c", "p_in", "p_out", "seed"},
    "path": set(), "star": set(), "complete": set(),
    "tree": {"seed"},
}


@dataclass
class ErrorReport:
    """One verification or run record; serializes to one CSV row."""

    algo: str = ""
    n: int = 0
    m: int = 0
    params: str = ""
    k: int = 0
    max_error: int = 0
    mean_error: float = 0.0
    err_hist: list[int] = field(default_factory=list)
    pairs_checked: int = 0
    violations: int = 0
    wall_ms: float = 0.0

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def csv_row(self) -> str:
        hist = "|".join(str(int(c)) for c in self.err_hist)
        return ",".join([
            self.algo, str(self.n), str(self.m), self.params, str(self.k),
            str(self.max_error), f"{self.mean_error:.6f}", hist,
            str(self.pairs_checked), str(self.violations),
            f"{self.wall_ms:.3f}",
        ])


def verify(g: Graph, estimates, bound: int, force: bool = False) -> ErrorReport:
    """Check estimates against the exact oracle within an additive bound.

    Buckets: index e in 0..bound counts ordered pairs with estimate − distance
    = e (agreeing-unreachable pairs land in bucket 0); the final bucket counts
    violations.  Refuses n > 2000 unless forced (the oracle is n BFS runs).
    """
    from .approx import exact_apsp_oracle

    if bound < 0:
        raise ValueError("bound must be non-negative")
    if g.n > 2000 and not force:
        raise ValueError(
            f"refusing exact-oracle verification for n={g.n} > 2000; "
            "pass force=True (CLI: --force) to override")
    est = estimates.values if isinstance(estimates, DistanceMatrix) else \
        np.asarray(estimates, dtype=np.int64)
    if est.shape != (g.n, g.n):
        raise ValueError(f"estimate shape {est.shape} does not match n={g.n}")
    exact = exact_apsp_oracle(g).values
    fin_est, fin_ex = is_finite(est), is_finite(exact)
    both_fin = fin_est & fin_ex
    both_inf = ~fin_est & ~fin_ex
    err = np.where(both_fin, est - exact, 0)
    in_range = both_fin & (err >= 0) & (err <= bound)
    hist = np.bincount(err[in_range], minlength=bound + 1).astype(np.int64)
    hist[0] += int(both_inf.sum())
    violations = int(g.n * g.n - int(hist.sum()))
    overshoot = err[both_fin & (err >= 0)]
    max_error = int(overshoot.max()) if overshoot.size else 0
    counted = int(hist.sum())
    mean_error = float((hist * np.arange(bound + 1)).sum() / counted) if counted else 0.0
    return ErrorReport(n=g.n, m=g.m, k=bound // 2, max_error=max_error,
                       mean_error=mean_error,
                       err_hist=[int(c) for c in hist] + [violations],
                       pairs_checked=g.n * g.n, violations=violations)


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

@dataclass
class GenSpec:
    """Parsed generator spec, e.g. ``er:n=300,p=0.1,seed=1``."""

    family: str
    n: int
    params: dict

    @classmethod
    def parse(cls, text: str) -> "GenSpec":
        head, _, rest = text.partition(":")
        family = _FAMILIES.get(head.strip().lower())
        if family is None:
            raise ValueError(f"unknown graph family {head!r}")
        kv = {}
        for item in filter(None, (p.strip() for p in rest.split(","))):
            key, sep, val = item.partition("=")
            if not sep:
                raise ValueError(f"malformed generator parameter {item!r}")
            kv[key.strip()] = val.strip()
        if "n" not in kv:
            raise ValueError("generator spec needs n=<size>")
        n = int(kv.pop("n"))
        allowed = _FAMILY_PARAMS[family]
        params = {}
        for key, val in kv.items():
            if key not in allowed:
                raise ValueError(f"family {family!r} does not take {key!r}")
            params[key] = float(val) if key.startswith("p") else int(val)
        return cls(family=family, n=n, params=params)

    def __str__(self) -> str:
        parts = [f"n={self.n}"] + [f"{k}={self.params[k]}"
                                   for k in sorted(self.params)]
        return f"{self.family}:{','.join(parts)}"


def generate(spec) -> Graph:
    """Build a graph from a GenSpec or spec string (seeded, deterministic)."""
    if isinstance(spec, str):
        spec = GenSpec.parse(spec)
    n = spec.n
    if n < 0:
        raise ValueError("n must be non-negative")
    p = spec.params
    rng = np.random.default_rng(int(p.get("seed", 0)))
    fam = spec.family
    if fam == "er":
        prob = float(p.get("p", 0.1))
        if not 0.0 <= prob <= 1.0:
            raise ValueError("edge probability must lie in [0, 1]")
        mask = np.triu(rng.random((n, n)) < prob, k=1)
        edges = np.argwhere(mask)
    elif fam == "complete":
        edges = np.argwhere(np.triu(np.ones((n, n), dtype=bool), k=1))
    elif fam == "path":
        i = np.arange(n - 1)
        edges = np.column_stack([i, i + 1]) if n > 1 else np.empty((0, 2), int)
    elif fam == "star":
        i = np.arange(1, n)
        edges = np.column_stack([np.zeros_like(i), i]) if n > 1 else \
            np.empty((0, 2), int)
    elif fam == "tree":
        if n > 1:
            child = np.arange(1, n)
            parent = np.array([rng.integers(0, i) for i in range(1, n)])
            edges = np.column_stack([parent, child])
        else:
            edges = np.empty((0, 2), int)
    elif fam == "regular":
        import networkx as nx
        r = int(p.get("r", 3))
        if n * r % 2 or r >= n:
            raise ValueError(f"no {r}-regular graph on {n} vertices")
        gnx = nx.random_regular_graph(r, n, seed=int(p.get("seed", 0)))
        edges = np.asarray(list(gnx.edges), dtype=np.int64).reshape(-1, 2)
    elif fam == "planted":
        c = max(1, int(p.get("c", 4)))
        p_in = float(p.get("p_in", 0.8))
        p_out = float(p.get("p_out", min(1.0, 2.0 / n) if n else 0.0))
        label = (np.arange(n) * c) // max(n, 1)
        same = label[:, None] == label[None, :]
        prob = np.where(same, p_in, p_out)
        mask = np.triu(rng.random((n, n)) < prob, k=1)
        edges = np.argwhere(mask)
    else:  # pragma: no cover - family table is closed
        raise ValueError(f"unknown family {fam!r}")
    return Graph.from_edges(n, edges)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def save_edge_list(g: Graph, path: str):
    """Write ``# n=N`` then one ``u v`` line per edge (u < v)."""
    with open(path, "w") as fh:
        fh.write(f"# n={g.n}\n")
        for u, v in g.edge_list():
            fh.write(f"{u} {v}\n")


def load_edge_list(path: str) -> Graph:
    """Read an edge list; ``# n=N`` header optional, other ``#`` lines ignored."""
    n_declared = None
    edges = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("n=") and n_declared is None:
                    try:
                        n_declared = int(body[2:])
                    except ValueError as exc:
                        raise ValueError(
                            f"{path}:{lineno}: bad header {line!r}") from exc
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(
                    f"{path}:{lineno}: expected 'u v', got {line!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise ValueError(
                    f"{path}:{lineno}: non-integer endpoint in {line!r}") from exc
            if u < 0 or v < 0:
                raise ValueError(f"{path}:{lineno}: negative vertex id")
            edges.append((u, v))
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    n = n_declared if n_declared is not None else \
        (int(e.max()) + 1 if e.size else 0)
    if e.size and e.max() >= n:
        raise ValueError(f"{path}: vertex id {int(e.max())} >= declared n={n}")
    return Graph.from_edges(n, e)


def save_estimates(estimates, path: str):
    """Write an estimate matrix as CSV with ``INF`` for unreachable pairs."""
    est = estimates.values if isinstance(estimates, DistanceMatrix) else \
        np.asarray(estimates, dtype=np.int64)
    with open(path, "w") as fh:
        for row in est:
            fh.write(",".join("INF" if not is_finite(v) else str(int(v))
                              for v in row) + "\n")


def load_estimates(path: str) -> np.ndarray:
    """Read a CSV estimate matrix written by :func:`save_estimates`."""
    rows = []
    width = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                row = [INF if tok.strip() == "INF" else int(tok)
                       for tok in line.split(",")]
            except ValueError as exc:
                raise ValueError(
                    f"{path}:{lineno}: non-integer estimate entry") from exc
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise ValueError(
                    f"{path}:{lineno}: ragged row ({len(row)} != {width})")
            rows.append(row)
    if not rows:
        return np.empty((0, 0), dtype=np.int64)
    return np.asarray(rows, dtype=np.int64)
