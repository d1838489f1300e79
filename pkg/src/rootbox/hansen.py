"""Hansen-Sengupta contractor and the Krawczyk operator.

One call runs a single componentwise interval Gauss-Seidel sweep of the
midpoint-preconditioned system, using extended interval division where the
diagonal contains zero.  Outcomes:

* ``empty``   - the box provably contains no root of the system;
* ``boxes``   - one box (contracted), or two when extended division split a
  component and both pieces met the input (at most one fork per sweep;
  later splits in the same sweep are hulled);
* ``skipped`` - the midpoint Jacobian was numerically singular, no
  information; the caller keeps the box unchanged.

A single output box lying strictly inside the input box certifies that the
box contains a root (existence_certified).
"""

from __future__ import annotations

from dataclasses import dataclass

from .interval import Interval, div_extended
from .linalg import IntervalMatrix, Singular, gauss_jordan_inverse, imatmul, imatvec, mid_matrix
from .poly import Box, PolySystem

__all__ = ["ContractionOutcome", "contract", "krawczyk"]


@dataclass(frozen=True)
class ContractionOutcome:
    kind: str  # 'empty' | 'boxes' | 'skipped'
    boxes: tuple[Box, ...] = ()
    existence_certified: bool = False

    @property
    def is_empty(self) -> bool:
        return self.kind == "empty"

    @property
    def is_skipped(self) -> bool:
        return self.kind == "skipped"

    def surviving_boxes(self, original: Box) -> tuple[Box, ...]:
        """Boxes the caller should keep processing."""
        if self.kind == "empty":
            return ()
        if self.kind == "skipped":
            return (original,)
        return self.boxes


_EMPTY = ContractionOutcome("empty")
_SKIPPED = ContractionOutcome("skipped")


def _precondition(s: PolySystem, jac, b: Box):
    """Common setup: returns (x, g, M) or None when the midpoint Jacobian
    is singular.  g = A*F(x) and M = A*J(X) with A the approximate inverse
    of the midpoint of J(X)."""
    n = s.dimension
    jx = IntervalMatrix(
        n, n, tuple(jac[i][j].eval_interval(b) for i in range(n) for j in range(n))
    )
    jc = mid_matrix(jx)
    try:
        a = gauss_jordan_inverse(jc)
    except Singular:
        return None
    a_iv = IntervalMatrix.from_point(a)
    x = b.midpoint()
    fx = tuple(p.eval_point(x) for p in s.polynomials)
    g = imatvec(a_iv, fx)
    m = imatmul(a_iv, jx)
    return x, g, m


def contract(s: PolySystem, jac, b: Box) -> ContractionOutcome:
    """One Hansen-Sengupta sweep over the box.

    jac is the symbolic Jacobian from PolySystem.jacobian(); passing it in
    keeps repeated calls cheap.
    """
    if not b.is_bounded:
        raise ValueError("box must be bounded")
    n = s.dimension
    pre = _precondition(s, jac, b)
    if pre is None:
        return _SKIPPED
    x, g, m = pre

    current: list[Interval] = list(b.intervals)
    fork: tuple[int, Interval, Interval] | None = None

    for i in range(n):
        xi = x[i]
        p = -g[i]
        for j in range(n):
            if j == i:
                continue
            mij = m.at(i, j)
            if mij.lo == 0.0 and mij.hi == 0.0:
                continue
            p = p - mij * (current[j] - Interval(x[j], x[j]))
        div = div_extended(p, m.at(i, i))
        if div.is_empty:
            # zero diagonal with p bounded away from zero: no root possible
            return _EMPTY
        if div.kind == "whole":
            continue  # no constraint on this component
        xi_iv = Interval(xi, xi)
        pieces = []
        for q in div.parts:
            y = xi_iv + q
            cut = y.intersect(current[i])
            if cut is not None:
                pieces.append(cut)
        if not pieces:
            return _EMPTY
        if len(pieces) == 1:
            current[i] = pieces[0]
        elif fork is None:
            fork = (i, pieces[0], pieces[1])
            current[i] = pieces[0].hull(pieces[1])
        else:
            # one fork per sweep: keep the hull, the gap survives via the
            # fork already taken
            current[i] = pieces[0].hull(pieces[1])

    if fork is None:
        out = Box(tuple(current))
        certified = b.strictly_contains(out)
        return ContractionOutcome("boxes", (out,), certified)
    i, lo_piece, hi_piece = fork
    left = list(current)
    right = list(current)
    left[i] = lo_piece
    right[i] = hi_piece
    return ContractionOutcome("boxes", (Box(tuple(left)), Box(tuple(right))), False)


def krawczyk(s: PolySystem, jac, b: Box) -> Box | None:
    """Krawczyk operator K(X) intersected with X.

    Returns None when the midpoint Jacobian is singular (no information)
    or when the intersection is empty (the box contains no root).  Used
    for cross-validation and statistics, not in the main solve loop.
    """
    if not b.is_bounded:
        raise ValueError("box must be bounded")
    n = s.dimension
    pre = _precondition(s, jac, b)
    if pre is None:
        return None
    x, g, m = pre

    # K_i = x_i - g_i + sum_j (I - M)_ij (X_j - x_j)
    out: list[Interval] = []
    for i in range(n):
        acc = Interval(x[i], x[i]) - g[i]
        for j in range(n):
            eye = Interval(1.0, 1.0) if i == j else Interval(0.0, 0.0)
            coeff = eye - m.at(i, j)
            if coeff.lo == 0.0 and coeff.hi == 0.0:
                continue
            acc = acc + coeff * (b[j] - Interval(x[j], x[j]))
        cut = acc.intersect(b[i])
        if cut is None:
            return None
        out.append(cut)
    return Box(tuple(out))
