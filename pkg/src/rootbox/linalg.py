"""Interval and point matrices: interval matmul, midpoints, Gauss-Jordan inverse.

The Gauss-Jordan inverse operates on plain real matrices only; its output
is used as an approximate preconditioner, so no interval elimination is
needed.  Sizes in this package stay small (n <= 9), hence naive loops.
"""

from __future__ import annotations

from dataclasses import dataclass

from .interval import Interval

__all__ = [
    "IntervalMatrix",
    "PointMatrix",
    "Singular",
    "imatmul",
    "imatvec",
    "mid_matrix",
    "gauss_jordan_inverse",
    "gauss_jordan_inverse_batch",
]

PIVOT_EPSILON = 1e-12  # relative to the largest input magnitude


class Singular(ValueError):
    """All candidate pivots in some column are negligibly small."""


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class IntervalMatrix:
    rows: int
    cols: int
    entries: tuple[Interval, ...]  # row-major

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise DimensionError("entry count != rows*cols")

    @classmethod
    def from_rows(cls, rows) -> "IntervalMatrix":
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise DimensionError("ragged rows")
        return cls(len(rows), ncols, tuple(iv for r in rows for iv in r))

    @classmethod
    def from_point(cls, m: "PointMatrix") -> "IntervalMatrix":
        return cls(m.rows, m.cols, tuple(Interval(v, v) for v in m.entries))

    @classmethod
    def identity(cls, n: int) -> "IntervalMatrix":
        one = Interval(1.0, 1.0)
        zero = Interval(0.0, 0.0)
        return cls(n, n, tuple(one if i == j else zero for i in range(n) for j in range(n)))

    def at(self, i: int, j: int) -> Interval:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[Interval, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]


@dataclass(frozen=True)
class PointMatrix:
    rows: int
    cols: int
    entries: tuple[float, ...]  # row-major

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise DimensionError("entry count != rows*cols")
        if any(v != v for v in self.entries):
            raise ValueError("NaN entry in point matrix")

    @classmethod
    def from_rows(cls, rows) -> "PointMatrix":
        rows = [list(map(float, r)) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise DimensionError("ragged rows")
        return cls(len(rows), ncols, tuple(v for r in rows for v in r))

    @classmethod
    def identity(cls, n: int) -> "PointMatrix":
        return cls(n, n, tuple(1.0 if i == j else 0.0 for i in range(n) for j in range(n)))

    def at(self, i: int, j: int) -> float:
        return self.entries[i * self.cols + j]

    def to_rows(self) -> list[list[float]]:
        return [list(self.entries[i * self.cols:(i + 1) * self.cols]) for i in range(self.rows)]


def imatmul(a: IntervalMatrix, b: IntervalMatrix) -> IntervalMatrix:
    """Interval matrix product; contains A'B' for all A' in a, B' in b."""
    if a.cols != b.rows:
        raise DimensionError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    out = []
    for i in range(a.rows):
        arow = a.row(i)
        for j in range(b.cols):
            acc = Interval(0.0, 0.0)
            for u in range(a.cols):
                acc = acc + arow[u] * b.at(u, j)
            out.append(acc)
    return IntervalMatrix(a.rows, b.cols, tuple(out))


def imatvec(a: IntervalMatrix, v) -> tuple[Interval, ...]:
    """Interval matrix-vector product."""
    v = tuple(v)
    if a.cols != len(v):
        raise DimensionError(f"cannot apply {a.rows}x{a.cols} to vector of {len(v)}")
    out = []
    for i in range(a.rows):
        arow = a.row(i)
        acc = Interval(0.0, 0.0)
        for u in range(a.cols):
            acc = acc + arow[u] * v[u]
        out.append(acc)
    return tuple(out)


def mid_matrix(a: IntervalMatrix) -> PointMatrix:
    """Elementwise midpoints."""
    return PointMatrix(a.rows, a.cols, tuple(iv.mid for iv in a.entries))


def gauss_jordan_inverse(a: PointMatrix) -> PointMatrix:
    """Invert a square point matrix by Gauss-Jordan with column-max pivoting.

    Augments [A | I], for each column picks the row with the largest
    absolute entry at or below the diagonal, swaps, normalizes the pivot
    row, and eliminates the column from every other row; the right half is
    then the inverse.  Raises Singular when the best available pivot is
    below PIVOT_EPSILON relative to the largest input entry.
    """
    if a.rows != a.cols:
        raise DimensionError("matrix must be square")
    n = a.rows
    scale = max((abs(v) for v in a.entries), default=0.0)
    if scale == 0.0:
        raise Singular("zero matrix")
    threshold = PIVOT_EPSILON * scale
    c = [list(a.entries[i * n:(i + 1) * n]) + [1.0 if j == i else 0.0 for j in range(n)]
         for i in range(n)]
    for k in range(n):
        pivot_row = max(range(k, n), key=lambda r: abs(c[r][k]))
        pivot = c[pivot_row][k]
        if abs(pivot) < threshold:
            raise Singular(f"pivot {pivot!r} in column {k} below threshold")
        if pivot_row != k:
            c[k], c[pivot_row] = c[pivot_row], c[k]
        inv = 1.0 / pivot
        for j in range(k, 2 * n):
            c[k][j] *= inv
        for i in range(n):
            if i == k:
                continue
            f = c[i][k]
            if f != 0.0:
                for j in range(k, 2 * n):
                    c[i][j] -= f * c[k][j]
    return PointMatrix(n, n, tuple(c[i][n + j] for i in range(n) for j in range(n)))


def gauss_jordan_inverse_batch(mats):
    """Gauss-Jordan inverse of a stack of square matrices, shape (m, n, n).

    Same algorithm and arithmetic as gauss_jordan_inverse, vectorized over
    the first axis.  Returns (inverses, singular_mask); rows flagged
    singular hold garbage and must be ignored by the caller.
    """
    import numpy as np

    mats = np.asarray(mats, dtype=np.float64)
    m, n, n2 = mats.shape
    if n != n2:
        raise DimensionError("matrices must be square")
    scale = np.abs(mats).reshape(m, -1).max(axis=1)
    singular = scale == 0.0
    threshold = PIVOT_EPSILON * scale
    c = np.concatenate([mats.copy(), np.broadcast_to(np.eye(n), (m, n, n)).copy()], axis=2)
    rows = np.arange(m)
    for k in range(n):
        col = np.abs(c[:, k:, k])
        rel = col.argmax(axis=1)
        pivot_row = rel + k
        pivot = c[rows, pivot_row, k]
        singular = singular | (np.abs(pivot) < threshold)
        swap = pivot_row != k
        if swap.any():
            sw = np.nonzero(swap)[0]
            tmp = c[sw, k, :].copy()
            c[sw, k, :] = c[sw, pivot_row[sw], :]
            c[sw, pivot_row[sw], :] = tmp
        pivot = c[:, k, k]
        safe_pivot = np.where(singular | (pivot == 0.0), 1.0, pivot)
        inv = 1.0 / safe_pivot
        c[:, k, k:] *= inv[:, None]
        f = c[:, :, k].copy()
        f[:, k] = 0.0
        prod = f[:, :, None] * c[:, k, None, k:]
        prod = np.where(f[:, :, None] == 0.0, 0.0, prod)  # match the scalar f==0 skip
        c[:, :, k:] -= prod
    return c[:, :, n:], singular
