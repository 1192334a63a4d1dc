"""Matrix-multiplication substrate: bit-packed boolean products, machine-word
integer products, arbitrary-precision products, and a pluggable cost model.

The boolean kernel packs 64 columns per uint64 word and is the practical
stand-in for fast matrix multiplication at desk scale.  The wide-integer
routines carry packed-polynomial encodings: a monomial with exponent code e
becomes the integer 2**(b·e), products accumulate per-digit witness counts,
and the radix 2**b is chosen so counts (bounded by the inner dimension) can
never carry into the next position.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


# ---------------------------------------------------------------------------
# Boolean matrices
# ---------------------------------------------------------------------------

@dataclass
class BoolMatrix:
    """Dense 0/1 matrix stored as packed uint64 words, 64 columns per word."""

    rows: int
    cols: int
    bits: np.ndarray

    def __post_init__(self):
        words = (self.cols + 63) // 64
        if self.bits.shape != (self.rows, words):
            raise ValueError("packed bit storage inconsistent with dimensions")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BoolMatrix":
        words = (cols + 63) // 64
        return cls(rows, cols, np.zeros((rows, words), dtype=np.uint64))

    @classmethod
    def from_dense(cls, arr) -> "BoolMatrix":
        arr = np.asarray(arr, dtype=bool)
        if arr.ndim != 2:
            raise ValueError("dense input must be 2-d")
        rows, cols = arr.shape
        words = (cols + 63) // 64
        padded = np.zeros((rows, words * 64), dtype=np.uint8)
        padded[:, :cols] = arr
        # Pack little-endian within each word: column c sits at bit c % 64.
        chunks = padded.reshape(rows, words, 8, 8)
        packed_bytes = np.packbits(chunks, axis=-1, bitorder="little").reshape(rows, words * 8)
        bits = packed_bytes.view(np.uint64) if packed_bytes.size else \
            np.zeros((rows, words), dtype=np.uint64)
        return cls(rows, cols, np.ascontiguousarray(bits.reshape(rows, words)))

    def to_dense(self) -> np.ndarray:
        if self.rows == 0 or self.cols == 0:
            return np.zeros((self.rows, self.cols), dtype=bool)
        as_bytes = self.bits.view(np.uint8).reshape(self.rows, -1)
        dense = np.unpackbits(as_bytes, axis=1, bitorder="little")
        return dense[:, :self.cols].astype(bool)


def bool_mm(a: BoolMatrix, b: BoolMatrix) -> BoolMatrix:
    """Boolean product: C[i,j] = OR_k (A[i,k] AND B[k,j]), bit-exact.

    Word-level kernel: for every inner index k present in a row of A, the
    packed k-th row of B is OR-ed into the output row.  The loop runs over
    whichever of (inner dim, output rows) is smaller.
    """
    if a.cols != b.rows:
        raise ValueError(f"inner dimensions disagree: {a.cols} vs {b.rows}")
    out = BoolMatrix.zeros(a.rows, b.cols)
    if a.rows == 0 or b.cols == 0 or a.cols == 0:
        return out
    a_dense = a.to_dense()
    if a.cols <= a.rows:
        for k in range(a.cols):
            col = a_dense[:, k]
            if col.any():
                np.bitwise_or(out.bits, b.bits[k], out=out.bits, where=col[:, None])
    else:
        for i in range(a.rows):
            ks = np.flatnonzero(a_dense[i])
            if ks.size:
                out.bits[i] = np.bitwise_or.reduce(b.bits[ks], axis=0)
    return out


# ---------------------------------------------------------------------------
# Machine-word integer matrices
# ---------------------------------------------------------------------------

def int_mm(a, b, entry_bound: int | None = None) -> np.ndarray:
    """Exact int64 matrix product with overflow guarding.

    If ``entry_bound`` is declared, every entry magnitude must be ≤ the bound
    and inner_dim·bound² must fit int64; otherwise the same check runs against
    the actual entry maxima.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ValueError("int_mm dimension mismatch")
    inner = a.shape[1]
    max_a = int(np.abs(a).max()) if a.size else 0
    max_b = int(np.abs(b).max()) if b.size else 0
    if entry_bound is not None:
        if max(max_a, max_b) > entry_bound:
            raise ValueError("entry exceeds declared bound")
        max_a = max_b = entry_bound
    if inner and inner * max_a * max_b >= 2 ** 62:
        raise ValueError("declared bounds do not fit the int64 accumulator")
    return a @ b


# ---------------------------------------------------------------------------
# Arbitrary-precision matrices
# ---------------------------------------------------------------------------

@dataclass
class WideIntMatrix:
    """Matrix of nonnegative arbitrary-precision integers.

    ``max_bits`` is the caller-declared bit-length limit; construction
    validates every entry against it.
    """

    rows: int
    cols: int
    entries: np.ndarray
    max_bits: int

    def __post_init__(self):
        if self.entries.shape != (self.rows, self.cols):
            raise ValueError("entry array inconsistent with dimensions")
        for row in self.entries:
            for x in row:
                if x < 0:
                    raise ValueError("wide-integer entries must be nonnegative")
                if int(x).bit_length() > self.max_bits:
                    raise ValueError("entry exceeds declared bit-length limit")

    @classmethod
    def from_ints(cls, values, max_bits: int | None = None) -> "WideIntMatrix":
        arr = np.empty((len(values), len(values[0]) if values else 0), dtype=object)
        for i, row in enumerate(values):
            for j, x in enumerate(row):
                arr[i, j] = int(x)
        if max_bits is None:
            max_bits = max((int(x).bit_length() for row in values for x in row),
                           default=0)
        return cls(len(values), arr.shape[1], arr, max_bits)


def wideint_mm(a: WideIntMatrix, b: WideIntMatrix) -> WideIntMatrix:
    """Exact ring product over arbitrary-precision integers."""
    if a.cols != b.rows:
        raise ValueError(f"inner dimensions disagree: {a.cols} vs {b.rows}")
    if a.rows and b.cols and a.cols:
        prod = np.dot(a.entries, b.entries)
    else:
        prod = np.zeros((a.rows, b.cols), dtype=object)
        for i in range(a.rows):
            for j in range(b.cols):
                prod[i, j] = 0
    limit = a.max_bits + b.max_bits + max(1, a.cols).bit_length() + 1
    return WideIntMatrix(a.rows, b.cols, prod, limit)


def radix_bits_for(inner_dim: int) -> int:
    """Bits per packed digit: the radix is the smallest power of two > inner_dim,
    so per-position witness counts (≤ inner_dim) never carry."""
    return max(1, int(inner_dim).bit_length())


def monomial_matrix(codes, radix_bits: int) -> WideIntMatrix:
    """Encode exponent codes as packed monomials 2**(radix_bits·code).

    Code −1 marks an absent entry and becomes 0.
    """
    codes = np.asarray(codes, dtype=np.int64)
    max_code = int(codes.max()) if codes.size else 0
    vals = np.empty(codes.shape, dtype=object)
    for i in range(codes.shape[0]):
        for j in range(codes.shape[1]):
            c = codes[i, j]
            vals[i, j] = 0 if c < 0 else (1 << (radix_bits * int(c)))
    return WideIntMatrix(codes.shape[0], codes.shape[1], vals,
                         max_bits=radix_bits * max(max_code, 0) + 1)


def monomial_pack_base(codes_b, slot: int):
    """Digit positions of B's monomials packed column-major: slot·j + code.

    ``codes_b`` is (s, n3) with −1 marking absent entries; those map to the
    spill region starting at slot·n3 so their counts never touch real
    positions.  Returns (base positions, spill start).
    """
    codes_b = np.asarray(codes_b, dtype=np.int64)
    if codes_b.size and codes_b.max() >= slot:
        raise ValueError("code exceeds digit slot")
    n3 = codes_b.shape[1]
    spill = slot * n3
    base = slot * np.arange(n3, dtype=np.int64)[None, :] + codes_b
    base[codes_b < 0] = spill
    return base, spill


def monomial_row_counts(base, codes_a_row, spill: int, max_code: int) -> np.ndarray:
    """Digit (witness-count) array of one row of the packed monomial product.

    Equals the digits of the corresponding :func:`wideint_mm` row on the
    monomial encodings, computed directly as a histogram: every (k, j) pair
    with both codes present contributes one witness at position
    base[k, j] + codes_a_row[k].  Cells at or beyond ``spill`` hold spill
    from absent entries; the final cell is always zero (safe gather target).
    """
    codes_a_row = np.asarray(codes_a_row, dtype=np.int64)
    length = spill + max_code + 2
    active = codes_a_row >= 0
    if not active.any():
        return np.zeros(length, dtype=np.int64)
    pos = base[active] + codes_a_row[active, None]
    return np.bincount(pos.ravel(), minlength=length)


# ---------------------------------------------------------------------------
# Cost models
# ---------------------------------------------------------------------------

@dataclass
class ClassicalCostModel:
    """Cost surrogate MM(n1,n2,n3) = n1·n2·n3 / min(dims)^(3−ω).

    ω = 3 gives the plain classical product count; smaller ω mimics square
    fast multiplication applied blockwise (e.g. MM(n, n/D, n) = n^ω·D^(2−ω)).
    """

    omega: float = 3.0

    def predict(self, n1: float, n2: float, n3: float) -> float:
        small = max(1.0, min(n1, n2, n3))
        return float(n1) * float(n2) * float(n3) / small ** (3.0 - self.omega)


@dataclass
class TableCostModel:
    """Cost from a grid of multiplication exponents ω(1, b, c).

    Dimensions are sorted descending and normalized so the largest is the
    base n; b and c are the log-ratios of the other two.  The exponent is
    bilinearly interpolated over the (b, c) grid (exact at grid points) and
    the cost is n**ω.  Grids must be ascending; monotonicity of the table is
    the caller's responsibility.
    """

    b_grid: np.ndarray
    c_grid: np.ndarray
    omegas: np.ndarray

    def __post_init__(self):
        self.b_grid = np.asarray(self.b_grid, dtype=np.float64)
        self.c_grid = np.asarray(self.c_grid, dtype=np.float64)
        self.omegas = np.asarray(self.omegas, dtype=np.float64)
        if self.omegas.shape != (self.b_grid.size, self.c_grid.size):
            raise ValueError("exponent table inconsistent with grids")

    @staticmethod
    def _interp1(grid: np.ndarray, x: float):
        x = float(np.clip(x, grid[0], grid[-1]))
        if grid.size == 1:
            return 0, 0, 0.0
        i = int(np.clip(np.searchsorted(grid, x, side="right") - 1, 0, grid.size - 2))
        span = grid[i + 1] - grid[i]
        t = 0.0 if span == 0 else (x - grid[i]) / span
        return i, i + 1, t

    def predict(self, n1: float, n2: float, n3: float) -> float:
        dims = sorted((float(n1), float(n2), float(n3)), reverse=True)
        if dims[0] <= 1.0:
            return dims[0] * dims[1] * dims[2]
        base = dims[0]
        b = math.log(max(dims[1], 1.0)) / math.log(base)
        c = math.log(max(dims[2], 1.0)) / math.log(base)
        i0, i1, tb = self._interp1(self.b_grid, b)
        j0, j1, tc = self._interp1(self.c_grid, c)
        om = ((1 - tb) * (1 - tc) * self.omegas[i0, j0]
              + tb * (1 - tc) * self.omegas[i1, j0]
              + (1 - tb) * tc * self.omegas[i0, j1]
              + tb * tc * self.omegas[i1, j1])
        return base ** om


MMCostModel = ClassicalCostModel | TableCostModel


def predict_cost(model: MMCostModel, n1, n2, n3) -> float:
    """Predicted cost of multiplying (n1 × n2) by (n2 × n3)."""
    if min(n1, n2, n3) < 0:
        raise ValueError("dimensions must be nonnegative")
    return model.predict(n1, n2, n3)
