"""Dense bit-matrix linear algebra over GF(2).

Rows are stored as Python ints used as bitsets: bit ``j`` of ``rows[i]`` is
the entry at ``(i, j)``. Indices are zero-based throughout this module.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from typing import TYPE_CHECKING

import numpy as np

from mbqcorder.exceptions import Infeasible, Singular

if TYPE_CHECKING:
    from numpy.typing import ArrayLike


def _mask(ncols: int) -> int:
    return (1 << ncols) - 1


def popcount(x: int) -> int:
    return bin(x).count("1")


def bits_to_int(bits: Iterable[int]) -> int:
    """Pack a 0/1 sequence into an int, element ``j`` going to bit ``j``."""
    out = 0
    for j, b in enumerate(bits):
        if b & 1:
            out |= 1 << j
    return out


def int_to_bits(x: int, length: int) -> tuple[int, ...]:
    return tuple((x >> j) & 1 for j in range(length))


class BitMatrix:
    """Immutable ``nrows x ncols`` matrix over GF(2).

    Construct from nested 0/1 sequences, from a numpy array with
    :meth:`from_array`, or from packed rows with :meth:`from_ints`.
    """

    __slots__ = ("_rows", "_ncols")

    def __init__(self, rows: Sequence[Sequence[int]] = (), ncols: int | None = None) -> None:
        rows = [list(r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged rows")
        self._rows = tuple(bits_to_int(r) for r in rows)
        self._ncols = ncols

    @classmethod
    def from_ints(cls, rows: Iterable[int], ncols: int) -> BitMatrix:
        obj = cls.__new__(cls)
        m = _mask(ncols)
        obj._rows = tuple(int(r) & m for r in rows)
        obj._ncols = ncols
        return obj

    @classmethod
    def from_array(cls, arr: ArrayLike) -> BitMatrix:
        a = np.asarray(arr, dtype=np.int64) & 1
        if a.ndim != 2:
            raise ValueError("expected a 2-d array")
        return cls.from_ints((bits_to_int(row) for row in a), a.shape[1])

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> BitMatrix:
        return cls.from_ints([0] * nrows, ncols)

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls.from_ints([1 << i for i in range(n)], n)

    @classmethod
    def column(cls, bits: Sequence[int]) -> BitMatrix:
        return cls.from_ints([b & 1 for b in bits], 1)

    @classmethod
    def row(cls, bits: Sequence[int]) -> BitMatrix:
        return cls.from_ints([bits_to_int(bits)], len(bits))

    # -- basic accessors ---------------------------------------------------

    @property
    def nrows(self) -> int:
        return len(self._rows)

    @property
    def ncols(self) -> int:
        return self._ncols

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self._rows), self._ncols)

    @property
    def rows(self) -> tuple[int, ...]:
        """Packed rows."""
        return self._rows

    def __getitem__(self, idx: tuple[int, int]) -> int:
        i, j = idx
        if not (0 <= i < self.nrows and 0 <= j < self._ncols):
            raise IndexError(f"entry {idx} outside shape {self.shape}")
        return (self._rows[i] >> j) & 1

    def row_bits(self, i: int) -> tuple[int, ...]:
        return int_to_bits(self._rows[i], self._ncols)

    def col_bits(self, j: int) -> tuple[int, ...]:
        if not 0 <= j < self._ncols:
            raise IndexError(j)
        return tuple((r >> j) & 1 for r in self._rows)

    def col_int(self, j: int) -> int:
        """Column ``j`` packed as an int (bit ``i`` = row ``i``)."""
        return bits_to_int(self.col_bits(j))

    def to_array(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.uint8)
        for i, r in enumerate(self._rows):
            for j in range(self._ncols):
                out[i, j] = (r >> j) & 1
        return out

    def to_lists(self) -> list[list[int]]:
        return [list(self.row_bits(i)) for i in range(self.nrows)]

    def is_zero(self) -> bool:
        return not any(self._rows)

    def diagonal(self) -> tuple[int, ...]:
        return tuple(self[i, i] for i in range(min(self.shape)))

    # -- construction helpers ---------------------------------------------

    def with_entry(self, i: int, j: int, value: int) -> BitMatrix:
        rows = list(self._rows)
        if value & 1:
            rows[i] |= 1 << j
        else:
            rows[i] &= ~(1 << j)
        return BitMatrix.from_ints(rows, self._ncols)

    def submatrix(self, rows: Sequence[int] | None = None, cols: Sequence[int] | None = None) -> BitMatrix:
        """Select rows and columns (in the order given)."""
        sel_rows = self._rows if rows is None else tuple(self._rows[i] for i in rows)
        if cols is None:
            return BitMatrix.from_ints(sel_rows, self._ncols)
        packed = []
        for r in sel_rows:
            x = 0
            for k, j in enumerate(cols):
                if (r >> j) & 1:
                    x |= 1 << k
            packed.append(x)
        return BitMatrix.from_ints(packed, len(cols))

    def hstack(self, other: BitMatrix) -> BitMatrix:
        if self.nrows != other.nrows:
            raise ValueError("hstack: row counts differ")
        return BitMatrix.from_ints(
            (a | (b << self._ncols) for a, b in zip(self._rows, other._rows)),
            self._ncols + other._ncols,
        )

    def vstack(self, other: BitMatrix) -> BitMatrix:
        if self._ncols != other._ncols:
            raise ValueError("vstack: column counts differ")
        return BitMatrix.from_ints(self._rows + other._rows, self._ncols)

    @property
    def T(self) -> BitMatrix:  # noqa: N802
        return BitMatrix.from_ints((self.col_int(j) for j in range(self._ncols)), self.nrows)

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: BitMatrix) -> BitMatrix:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return BitMatrix.from_ints((a ^ b for a, b in zip(self._rows, other._rows)), self._ncols)

    __xor__ = __add__
    __sub__ = __add__

    def __matmul__(self, other: BitMatrix) -> BitMatrix:
        if self._ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        orows = other._rows
        out = []
        for r in self._rows:
            acc = 0
            j = 0
            while r:
                if r & 1:
                    acc ^= orows[j]
                r >>= 1
                j += 1
            out.append(acc)
        return BitMatrix.from_ints(out, other._ncols)

    def apply(self, vec: int) -> int:
        """Matrix-vector product with a packed column vector."""
        out = 0
        for i, r in enumerate(self._rows):
            if popcount(r & vec) & 1:
                out |= 1 << i
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self._ncols == other._ncols and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self._rows, self._ncols))

    def __repr__(self) -> str:
        return f"BitMatrix({self.to_lists()!r}, ncols={self._ncols})"

    def __str__(self) -> str:
        return "\n".join(self.row_strings())

    def row_strings(self) -> list[str]:
        return ["".join(str(b) for b in self.row_bits(i)) for i in range(self.nrows)]


def rref(m: BitMatrix) -> tuple[BitMatrix, BitMatrix, list[int]]:
    """Reduced row-echelon form.

    Returns ``(R, L, pivots)`` with ``L @ m == R``, ``L`` invertible, and the
    pivot columns in increasing order. Pivots are taken greedily from the
    leftmost column, with the topmost available row as pivot row.
    """
    nrows, ncols = m.shape
    work = list(m.rows)
    ops = [1 << i for i in range(nrows)]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        bit = 1 << c
        p = next((k for k in range(r, nrows) if work[k] & bit), None)
        if p is None:
            continue
        work[r], work[p] = work[p], work[r]
        ops[r], ops[p] = ops[p], ops[r]
        for k in range(nrows):
            if k != r and work[k] & bit:
                work[k] ^= work[r]
                ops[k] ^= ops[r]
        pivots.append(c)
        r += 1
    return BitMatrix.from_ints(work, ncols), BitMatrix.from_ints(ops, nrows), pivots


def rank(m: BitMatrix) -> int:
    return len(rref(m)[2])


def invert(m: BitMatrix) -> BitMatrix:
    """Inverse of a square matrix; raises :class:`Singular`."""
    n, nc = m.shape
    if n != nc:
        raise ValueError(f"invert needs a square matrix, got {m.shape}")
    _, ops, pivots = rref(m)
    if len(pivots) != n:
        raise Singular(f"matrix of shape {m.shape} has rank {len(pivots)}")
    return ops


def solve(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """Some ``X`` with ``a @ X == b``; raises :class:`Infeasible` if none exists.

    Free variables are set to zero.
    """
    if a.nrows != b.nrows:
        raise ValueError("solve: row counts differ")
    r, ops, pivots = rref(a)
    lb = ops @ b
    k = len(pivots)
    if any(lb.rows[k:]):
        raise Infeasible("right-hand side is not in the column space")
    x = [0] * a.ncols
    for i, c in enumerate(pivots):
        x[c] = lb.rows[i]
    return BitMatrix.from_ints(x, b.ncols)


def independent_columns(m: BitMatrix, candidates: Sequence[int] | None = None) -> list[int]:
    """Greedy leftmost maximal independent subset of the candidate columns."""
    cols = list(range(m.ncols)) if candidates is None else list(candidates)
    _, _, pivots = rref(m.submatrix(cols=cols))
    return [cols[p] for p in pivots]


def independent_rows(m: BitMatrix, candidates: Sequence[int] | None = None) -> list[int]:
    """Greedy topmost maximal independent subset of the candidate rows."""
    return independent_columns(m.T, candidates)


def row_space_equal(a: BitMatrix, b: BitMatrix) -> bool:
    if a.ncols != b.ncols:
        return False
    ra = rank(a)
    return ra == rank(b) and rank(a.vstack(b)) == ra


def in_row_space(vec: int, m: BitMatrix) -> bool:
    return rank(m.vstack(BitMatrix.from_ints([vec], m.ncols))) == rank(m)


def random_matrix(nrows: int, ncols: int, rng: np.random.Generator) -> BitMatrix:
    return BitMatrix.from_array(rng.integers(0, 2, size=(nrows, ncols)))


def random_invertible(n: int, rng: np.random.Generator) -> BitMatrix:
    while True:
        m = random_matrix(n, n, rng)
        if rank(m) == n:
            return m
