"""Shared builders for tropical-product test instances."""
from __future__ import annotations

import numpy as np

from apsp_approx import INF, GroupedInstance, prime_window


def random_with_inf(rng, shape, lo=0, hi=30, p_inf=0.25):
    vals = rng.integers(lo, hi, size=shape)
    return np.where(rng.random(shape) < p_inf, INF, vals)


def random_grouped(rng, h1, d, s, h3, limit, q=1, lo=-15, hi=40, p_inf=0.2):
    """Random instance satisfying the block invariants: per (group, k) either
    absent everywhere or present everywhere with spread <= limit."""
    a = np.full((h1 * d, s), INF, dtype=np.int64)
    for gi in range(h1):
        for k in range(s):
            if rng.random() < p_inf:
                continue
            base = int(rng.integers(lo, hi))
            a[gi * d:(gi + 1) * d, k] = base + rng.integers(0, limit + 1, size=d)
    b = np.full((s, h3 * d), INF, dtype=np.int64)
    for gj in range(h3):
        for k in range(s):
            if rng.random() < p_inf:
                continue
            base = int(rng.integers(lo, hi))
            b[k, gj * d:(gj + 1) * d] = base + rng.integers(0, limit + 1, size=d)
    return GroupedInstance(a=a, b=b, group_size=d, range_bound=limit, q=q)


def deferral_instance():
    """Single-block instance engineered so one residue class drowns in false
    positives: ten quotient differences equal to a window prime force the
    block past the q=16 budget of 8, leaving only the brute-force fallback."""
    limit = 4
    target = 211
    quots = np.array([0] + [target] * 10 + [1] * 5, dtype=np.int64)
    a = (limit * quots).reshape(1, -1)
    b = np.zeros((16, 1), dtype=np.int64)
    inst = GroupedInstance(a=a, b=b, group_size=1, range_bound=limit, q=16)
    window = prime_window(inst.q, int(a.max()))
    assert target in window.tolist()
    seed = next(s for s in range(1000)
                if int(np.random.default_rng(s).choice(window)) == target)
    return inst, seed, target
