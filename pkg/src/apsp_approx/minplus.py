"""(min,+)-product routines: brute force, bounded-entry, shift-reduced, and
grouped mod-prime.

Matrices here are plain int64 arrays with the package INF sentinel; finite
entries may be negative where noted.  ``minplus_grouped`` is Las Vegas: the
random prime draws affect only running time, never the output, because every
candidate surviving false-positive subtraction is re-derived from exact
quotient/remainder data and any group pair that exhausts its budget falls
back to brute force.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graphs import INF, is_finite, sat_add
from .matmul import (BoolMatrix, bool_mm, monomial_matrix, monomial_pack_base,
                     monomial_row_counts, radix_bits_for, wideint_mm)

# Internal stand-in for INF during vectorized minimization: large enough to
# dominate every finite sum, small enough that one addition cannot overflow.
_BIG = np.int64(1) << 58
_BIG_CUT = np.int64(1) << 56
_MAX_MAGNITUDE = np.int64(1) << 52


def _as_matrix(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.int64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-d matrix")
    finite = is_finite(arr)
    if finite.any() and np.abs(arr[finite]).max() > _MAX_MAGNITUDE:
        raise ValueError(f"{name} has finite entries too large in magnitude")
    return arr


def minplus_bruteforce(a, b) -> np.ndarray:
    """Exact tropical product C[i,j] = min_k A[i,k] + B[k,j], INF-aware."""
    a = _as_matrix(a, "A")
    b = _as_matrix(b, "B")
    if a.shape[1] != b.shape[0]:
        raise ValueError("minplus dimension mismatch")
    n1, s = a.shape
    n3 = b.shape[1]
    out = np.full((n1, n3), INF, dtype=np.int64)
    if s == 0 or n1 == 0 or n3 == 0:
        return out
    af = np.where(is_finite(a), a, _BIG)
    bf = np.where(is_finite(b), b, _BIG)
    chunk = max(1, (1 << 22) // max(s * n3, 1))
    for lo in range(0, n1, chunk):
        hi = min(lo + chunk, n1)
        sums = af[lo:hi, :, None] + bf[None, :, :]
        out[lo:hi] = sums.min(axis=1)
    out[out >= _BIG_CUT] = INF
    return out


def _validate_bounded(mat: np.ndarray, limit: int, name: str):
    finite = is_finite(mat)
    vals = mat[finite]
    if vals.size and (vals.min() < 0 or vals.max() > limit):
        raise ValueError(f"{name} entry outside [0, {limit}]")


def minplus_bounded(a, b, limit: int, backend: str = "boolean") -> np.ndarray:
    """Tropical product for entries in {0..L, INF}, via boolean products.

    The default backend accumulates, for each target sum s in ascending
    order, the OR over a+b=s of bool_mm(indicator(A=a), indicator(B=b)); the
    first s whose bit is set is the tropical minimum.  The "packed" backend
    routes the same contract through wide-integer monomial products (digit
    radix per the anti-carry rule) and exists as a cross-check.
    """
    a = _as_matrix(a, "A")
    b = _as_matrix(b, "B")
    if a.shape[1] != b.shape[0]:
        raise ValueError("minplus dimension mismatch")
    if limit < 0:
        raise ValueError("entry bound must be nonnegative")
    _validate_bounded(a, limit, "A")
    _validate_bounded(b, limit, "B")
    n1, s = a.shape
    n3 = b.shape[1]
    out = np.full((n1, n3), INF, dtype=np.int64)
    if s == 0 or n1 == 0 or n3 == 0:
        return out

    if backend == "packed":
        bits = radix_bits_for(s)
        codes_a = np.where(is_finite(a), a, -1)
        codes_b = np.where(is_finite(b), b, -1)
        prod = wideint_mm(monomial_matrix(codes_a, bits), monomial_matrix(codes_b, bits))
        digit_mask = (1 << bits) - 1
        for i in range(n1):
            for j in range(n3):
                x = int(prod.entries[i, j])
                for pos in range(2 * limit + 1):
                    if (x >> (bits * pos)) & digit_mask:
                        out[i, j] = pos
                        break
        return out
    if backend != "boolean":
        raise ValueError(f"unknown minplus_bounded backend {backend!r}")

    a_ind = [BoolMatrix.from_dense(a == v) for v in range(limit + 1)]
    b_ind = [BoolMatrix.from_dense(b == v) for v in range(limit + 1)]
    a_any = [m.bits.any() for m in a_ind]
    b_any = [m.bits.any() for m in b_ind]
    unresolved = np.ones((n1, n3), dtype=bool)
    for target in range(2 * limit + 1):
        hit = np.zeros((n1, n3), dtype=bool)
        for av in range(max(0, target - limit), min(limit, target) + 1):
            bv = target - av
            if a_any[av] and b_any[bv]:
                hit |= bool_mm(a_ind[av], b_ind[bv]).to_dense()
        newly = hit & unresolved
        out[newly] = target
        unresolved &= ~newly
        if not unresolved.any():
            break
    return out


def minplus_shifted(a, b, limit: int) -> np.ndarray:
    """Tropical product where B has per-row range ≤ L and A is arbitrary.

    Reduction: subtract per-row minima Δ_k from B, add them to A's columns,
    clamp A entries more than L above their row minimum to INF (they can
    never win), and finish with the bounded product; row minima are added
    back at the end.  Exactness follows because A[i,k]+B[k,j] =
    (A[i,k]+Δ_k) + (B[k,j]−Δ_k) for every k.
    """
    a = _as_matrix(a, "A")
    b = _as_matrix(b, "B")
    if a.shape[1] != b.shape[0]:
        raise ValueError("minplus dimension mismatch")
    if limit < 0:
        raise ValueError("range bound must be nonnegative")
    n1, s = a.shape
    n3 = b.shape[1]
    if s == 0 or n1 == 0 or n3 == 0:
        return np.full((n1, n3), INF, dtype=np.int64)

    finite_b = is_finite(b)
    live = finite_b.any(axis=1)
    if np.logical_and(live, ~finite_b.all(axis=1)).any():
        raise ValueError("B row mixes finite and INF entries (row range exceeded)")
    if not live.any():
        return np.full((n1, n3), INF, dtype=np.int64)
    bv = b[live]
    delta = bv.min(axis=1)
    if (bv.max(axis=1) - delta > limit).any():
        raise ValueError("B per-row range exceeds the declared bound")
    b_shift = bv - delta[:, None]

    a_shift = sat_add(a[:, live], delta[None, :])
    af = np.where(is_finite(a_shift), a_shift, _BIG)
    row_min = af.min(axis=1)
    rel = af - row_min[:, None]
    a_clamped = np.where(is_finite(a_shift) & (rel <= limit), rel, INF)
    bounded = minplus_bounded(a_clamped, b_shift, limit)
    return sat_add(bounded, row_min[:, None])


# ---------------------------------------------------------------------------
# Grouped mod-prime product
# ---------------------------------------------------------------------------

@dataclass
class GroupedInstance:
    """A (h1·d × s) and B (s × h3·d) with contiguous size-d groups of range ≤ L.

    Within every row group of A (column group of B) and every inner index k,
    entries are either all INF or all finite with spread ≤ L.  q ≥ 1 tunes
    the prime window (larger primes thin out false positives).
    """

    a: np.ndarray
    b: np.ndarray
    group_size: int
    range_bound: int
    q: int = 1

    def __post_init__(self):
        self.a = _as_matrix(self.a, "A")
        self.b = _as_matrix(self.b, "B")
        d, limit = self.group_size, self.range_bound
        if d < 1:
            raise ValueError("group size must be at least 1")
        if limit < 1:
            raise ValueError("range bound must be at least 1")
        if self.q < 1:
            raise ValueError("prime-density parameter q must be at least 1")
        if self.a.shape[1] != self.b.shape[0]:
            raise ValueError("inner dimensions disagree")
        if self.a.shape[0] % d or self.b.shape[1] % d:
            raise ValueError("matrix side not divisible by the group size")
        self._check_groups(
            self.a.reshape(self.a.shape[0] // d, d, self.a.shape[1]),
            "A row group")
        self._check_groups(
            self.b.T.reshape(self.b.shape[1] // d, d, self.b.shape[0]),
            "B column group")

    def _check_groups(self, grouped: np.ndarray, what: str):
        finite = is_finite(grouped)
        counts = finite.sum(axis=1)
        if ((counts > 0) & (counts < self.group_size)).any():
            raise ValueError(f"{what} mixes finite and INF entries")
        vals = np.where(finite, grouped, 0)
        spread = np.where(counts == self.group_size,
                          vals.max(axis=1) - vals.min(axis=1), 0)
        if spread.size and spread.max() > self.range_bound:
            raise ValueError(f"{what} spread exceeds the range bound")

    @property
    def num_row_groups(self) -> int:
        return self.a.shape[0] // self.group_size

    @property
    def num_col_groups(self) -> int:
        return self.b.shape[1] // self.group_size


@dataclass
class QuotientRemainder:
    """Coarse ⌊min/L⌋ group quotients, bounded remainders, and coarse product.

    a = L·a_quot[group] + a_rem with 0 ≤ a_rem < 2L (likewise b), and the
    coarse product c_coarse sandwiches the true product:
    0 ≤ C − L·c_coarse < 4L on finite entries.
    """

    a_quot: np.ndarray
    a_rem: np.ndarray
    b_quot: np.ndarray
    b_rem: np.ndarray
    c_coarse: np.ndarray


def _quotient_remainder_1d(mat: np.ndarray, d: int, limit: int):
    """Group-quotient/remainder along axis 0 groups of a (h·d, s) matrix."""
    h = mat.shape[0] // d
    s = mat.shape[1]
    finite = is_finite(mat)
    grouped = np.where(finite, mat, _BIG).reshape(h, d, s)
    gmin = grouped.min(axis=1)
    alive = gmin < _BIG_CUT
    quot = np.where(alive, np.floor_divide(np.where(alive, gmin, 0), limit), INF)
    quot_safe = np.repeat(np.where(alive, quot, 0), d, axis=0)
    rem = np.where(finite, mat - limit * quot_safe, INF)
    live_rem = rem[finite]
    if live_rem.size and (live_rem.min() < 0 or live_rem.max() >= 2 * limit):
        raise AssertionError("remainder left [0, 2L) — grouped invariants violated")
    return quot, rem


def build_quotient_remainder(inst: GroupedInstance) -> QuotientRemainder:
    """Quotient/remainder matrices and the brute-force coarse product C'."""
    d, limit = inst.group_size, inst.range_bound
    a_quot, a_rem = _quotient_remainder_1d(inst.a, d, limit)
    b_quot_t, b_rem_t = _quotient_remainder_1d(inst.b.T.copy(), d, limit)
    c_coarse = minplus_bruteforce(a_quot, b_quot_t.T)
    return QuotientRemainder(a_quot=a_quot, a_rem=a_rem,
                             b_quot=b_quot_t.T.copy(), b_rem=b_rem_t.T.copy(),
                             c_coarse=c_coarse)


def _primes_up_to(n: int) -> np.ndarray:
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(n ** 0.5) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return np.flatnonzero(sieve)


def prime_window(q: int, magnitude: int) -> np.ndarray:
    """Primes eligible for the grouped product's modulus.

    The window is [q·w0, 2·q·w0] with w0 = ⌈log₂(2U+1)⌉, clamped upward so
    that every candidate exceeds 7 (the seven decode residues must stay
    distinct mod p); it is never empty by Bertrand's postulate.
    """
    if q < 1:
        raise ValueError("q must be at least 1")
    w0 = max(1, math.ceil(math.log2(2 * max(1, magnitude) + 1)))
    lo = max(11, q * w0)
    hi = max(2 * q * w0, 2 * lo)
    primes = _primes_up_to(hi)
    return primes[(primes >= lo) & (primes <= hi)]


@dataclass
class RoundStats:
    """Diagnostics for one prime round of the grouped product."""

    prime: int
    resolved: int
    deferred: list[tuple[int, int]]
    fp_total: int
    fp_indices: dict | None = None


@dataclass
class GroupedStats:
    rounds: list[RoundStats] = field(default_factory=list)
    fallback_pairs: list[tuple[int, int]] = field(default_factory=list)


_RESIDUES = np.arange(-3, 4)


def minplus_grouped(inst: GroupedInstance, seed: int = 0,
                    return_stats: bool = False):
    """Exact tropical product of a GroupedInstance via the mod-prime encoding.

    Pipeline: coarse product C' over group quotients; monomial codes
    (quotient mod p, remainder) packed into digit positions; one digit
    histogram per output row; per group pair, candidates live in the seven
    residue classes C'+r mod p, false positives (congruent triples whose
    integer difference is not r) are counted exactly with small products and
    subtracted; surviving digits decode to L·(C'+r) + remainder-sum and the
    minimum is exact.  Group pairs whose false-positive load exceeds
    8·⌈s/q⌉ defer to the next prime; after max(1, ⌈2·log₂ h⌉) rounds the
    leftovers are resolved by brute force.  Output is exact for every seed.
    """
    d, limit, q = inst.group_size, inst.range_bound, inst.q
    a, b = inst.a, inst.b
    n1, s = a.shape
    n3 = b.shape[1]
    h1, h3 = inst.num_row_groups, inst.num_col_groups
    stats = GroupedStats()
    out = np.full((n1, n3), INF, dtype=np.int64)
    if n1 == 0 or n3 == 0:
        return (out, stats) if return_stats else out

    qr = build_quotient_remainder(inst)
    coarse = qr.c_coarse
    active = is_finite(coarse)
    if s == 0 or not active.any():
        return (out, stats) if return_stats else out

    finite_a = is_finite(a)
    finite_b = is_finite(b)
    magnitude = 1
    if finite_a.any():
        magnitude = max(magnitude, int(np.abs(a[finite_a]).max()))
    if finite_b.any():
        magnitude = max(magnitude, int(np.abs(b[finite_b]).max()))

    rng = np.random.default_rng(seed)
    window = prime_window(q, magnitude)
    budget = 8 * ((s + q - 1) // q)
    n_rounds = max(1, math.ceil(2 * math.log2(max(h1, h3, 1)))) \
        if max(h1, h3) > 1 else 1
    n_y = 4 * limit - 1
    collect_detail = s * h1 * h3 * d * d <= 200_000
    cell_base = (np.arange(d)[:, None, None] * d + np.arange(d)[None, None, :])

    for _ in range(n_rounds):
        if not active.any():
            break
        p = int(rng.choice(window))
        width = 4 * limit + 1
        slot = 2 * p * width
        max_code = p * width - 1

        a_mod = np.where(is_finite(qr.a_quot), np.where(is_finite(qr.a_quot), qr.a_quot, 0) % p, -1)
        b_mod = np.where(is_finite(qr.b_quot), np.where(is_finite(qr.b_quot), qr.b_quot, 0) % p, -1)
        codes_a = np.where(finite_a,
                           np.repeat(a_mod, d, axis=0) * width + np.where(finite_a, qr.a_rem, 0),
                           -1)
        codes_b = np.where(finite_b,
                           np.repeat(b_mod, d, axis=1) * width + np.where(finite_b, qr.b_rem, 0),
                           -1)
        base, spill = monomial_pack_base(codes_b, slot)
        zero_cell = spill + max_code + 1

        round_resolved = 0
        round_deferred: list[tuple[int, int]] = []
        round_fp_total = 0
        fp_indices: dict = {} if collect_detail else None

        for gi in range(h1):
            live_cols = np.flatnonzero(active[gi])
            if live_cols.size == 0:
                continue
            rows = slice(gi * d, (gi + 1) * d)

            # Residue targets and gather positions for this row group.
            t_r = np.where(active[gi][:, None],
                           (coarse[gi][:, None] + _RESIDUES[None, :]) % p, 0)
            xsums = np.stack([t_r, t_r + p], axis=-1)            # (h3, 7, 2)
            valid_x = xsums <= 2 * (p - 1)
            col_ids = np.arange(n3) // d
            pos = (slot * np.arange(n3)[:, None, None, None]
                   + xsums[col_ids][:, :, :, None] * width
                   + np.arange(n_y)[None, None, None, :])
            pos = np.where(valid_x[col_ids][:, :, :, None], pos, zero_cell)

            hist = np.empty((d, n3, 7, n_y), dtype=np.int64)
            for li in range(d):
                counts = monomial_row_counts(base, codes_a[gi * d + li], spill, max_code)
                hist[li] = counts[pos].sum(axis=2)

            # False positives per column group: congruent mod p but not the
            # exact residue.
            aq_row = qr.a_quot[gi]
            x_sum = sat_add(aq_row[:, None], qr.b_quot)            # (s, h3)
            valid_k = is_finite(x_sum)
            xs_safe = np.where(valid_k, x_sum, 0)
            c_safe = np.where(active[gi], coarse[gi], 0)
            diff = np.where(valid_k, xs_safe - c_safe[None, :], -1)
            diff_mod = np.where(valid_k, np.where(valid_k, diff, 0) % p, -1)

            fp_masks = []
            for r in _RESIDUES:
                member = valid_k & (diff_mod == r % p)
                fp_masks.append(member & (diff != r))
            fp_stack = np.stack(fp_masks, axis=0)                  # (7, s, h3)
            fp_per_col = fp_stack.sum(axis=(0, 1))                 # (h3,)

            block_hist = hist.reshape(d, h3, d, 7, n_y)
            for gj in live_cols:
                n_fp = int(fp_per_col[gj])
                round_fp_total += n_fp
                if n_fp > budget:
                    round_deferred.append((gi, gj))
                    continue
                cols = slice(gj * d, (gj + 1) * d)
                h_block = block_hist[:, gj].copy()                 # (d, d, 7, n_y)
                if n_fp:
                    r_idx, ks = np.nonzero(fp_stack[:, :, gj])
                    if collect_detail:
                        for ri in range(7):
                            sel = ks[r_idx == ri]
                            if sel.size:
                                fp_indices[(gi, gj, int(_RESIDUES[ri]))] = sel.copy()
                    ya = qr.a_rem[rows][:, ks]                     # (d, |F|)
                    yb = qr.b_rem[ks][:, cols]                     # (|F|, d)
                    fp_pos = ((cell_base * 7 + r_idx[None, :, None]) * n_y
                              + ya[:, :, None] + yb[None, :, :])
                    fp_counts = np.bincount(fp_pos.ravel(),
                                            minlength=d * d * 7 * n_y)
                    h_block -= fp_counts.reshape(d, d, 7, n_y)
                if (h_block < 0).any():
                    raise AssertionError("false-positive subtraction went negative")
                values = (limit * (coarse[gi, gj] + _RESIDUES[:, None])
                          + np.arange(n_y)[None, :])               # (7, n_y)
                cand = np.where(h_block > 0, values[None, None], _BIG).min(axis=(2, 3))
                if (cand >= _BIG_CUT).any():
                    raise AssertionError("no surviving candidate for a finite block")
                out[rows, cols] = cand
                active[gi, gj] = False
                round_resolved += 1

        stats.rounds.append(RoundStats(prime=p, resolved=round_resolved,
                                       deferred=round_deferred,
                                       fp_total=round_fp_total,
                                       fp_indices=fp_indices))

    for gi, gj in np.argwhere(active):
        rows = slice(gi * d, (gi + 1) * d)
        cols = slice(gj * d, (gj + 1) * d)
        out[rows, cols] = minplus_bruteforce(a[rows], b[:, cols])
        stats.fallback_pairs.append((int(gi), int(gj)))

    return (out, stats) if return_stats else out
