"""Closed interval arithmetic with guaranteed outward rounding.

Every operation returns an interval that contains the exact real result for
all choices of operands inside the inputs (the inclusion property).  Bounds
are IEEE doubles.  Directed rounding is obtained portably: each bound is
computed in round-to-nearest together with its exact floating-point error
(two_sum / two_prod error-free transformations) and is stepped one unit in
the last place outward only when the error term shows the rounded value lies
on the unsafe side.  Bounds are therefore correctly rounded wherever the
error term is trustworthy, and at most one representable step wide of the
exact value otherwise.

Division for divisors that contain zero is handled by ``div_extended``,
which implements the Hanson/Kahan extension (half-infinite intervals, their
disjoint union, or the whole line) and never fails.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

__all__ = [
    "Interval",
    "ExtendedDivResult",
    "IntervalError",
    "OrderViolation",
    "InvalidBound",
    "ZeroInDivisor",
    "UnboundedInterval",
    "parse_interval",
]

_INF = math.inf
_MAXF = sys.float_info.max
_SPLITTER = 134217729.0  # 2**27 + 1, Veltkamp splitting constant
_TINY = 2.0 ** -970      # below this magnitude product errors may be inexact
_BIG = 2.0 ** 995        # above this magnitude Veltkamp splitting may overflow


class IntervalError(ValueError):
    """Base class for interval domain errors."""


class OrderViolation(IntervalError):
    """Lower bound exceeds upper bound."""


class InvalidBound(IntervalError):
    """A bound is NaN."""


class ZeroInDivisor(IntervalError):
    """recip() called with a divisor containing zero."""


class UnboundedInterval(IntervalError):
    """Operation requires finite bounds."""


# ---------------------------------------------------------------------------
# directed scalar arithmetic


def _add_rd(a: float, b: float) -> float:
    """Largest double <= a+b (one step below at worst)."""
    s = a + b
    if s == -_INF:
        return s
    if s == _INF:
        return s if (a == _INF or b == _INF) else _MAXF
    if s != s:  # inf + -inf; callers avoid this, stay safe
        return -_INF
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    if err < 0:
        return math.nextafter(s, -_INF)
    return s


def _add_ru(a: float, b: float) -> float:
    """Smallest double >= a+b (one step above at worst)."""
    s = a + b
    if s == _INF:
        return s
    if s == -_INF:
        return s if (a == -_INF or b == -_INF) else -_MAXF
    if s != s:
        return _INF
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    if err > 0:
        return math.nextafter(s, _INF)
    return s


def _prod_err(a: float, b: float, p: float) -> float:
    """Exact error of p = fl(a*b); NaN when not computable."""
    if abs(a) > _BIG or abs(b) > _BIG or abs(p) < _TINY:
        return math.nan
    ah = _SPLITTER * a
    ah = ah - (ah - a)
    al = a - ah
    bh = _SPLITTER * b
    bh = bh - (bh - b)
    bl = b - bh
    return ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _mul_rd(a: float, b: float) -> float:
    if a == 0.0 or b == 0.0:
        return 0.0  # covers 0 * inf, which must act as 0 here
    p = a * b
    if p == -_INF:
        return p
    if p == _INF:
        return p if (math.isinf(a) or math.isinf(b)) else _MAXF
    err = _prod_err(a, b, p)
    if not err >= 0.0:  # err < 0 or NaN: step down
        return math.nextafter(p, -_INF)
    return p


def _mul_ru(a: float, b: float) -> float:
    if a == 0.0 or b == 0.0:
        return 0.0
    p = a * b
    if p == _INF:
        return p
    if p == -_INF:
        return p if (math.isinf(a) or math.isinf(b)) else -_MAXF
    err = _prod_err(a, b, p)
    if not err <= 0.0:
        return math.nextafter(p, _INF)
    return p


def _div_err_sign(a: float, b: float, q: float) -> float:
    """Sign of the exact error a/b - q, or NaN if not computable.

    Uses the exact residual a - q*b: a/b - q = (a - q*b)/b.
    """
    if math.isinf(a) or math.isinf(b) or math.isinf(q):
        return math.nan
    p = q * b
    if abs(q) > _BIG or abs(b) > _BIG or (p != 0.0 and abs(p) < _TINY):
        return math.nan
    err = _prod_err(q, b, p)
    if err != err:
        return math.nan
    d = a - p  # exact: p is within one rounding of a (Sterbenz)
    r = d - err  # a - q*b, exactly, when |d| dominates |err|
    return math.copysign(1.0, r / b) if r != 0.0 else 0.0


def _div_rd(a: float, b: float) -> float:
    if a == 0.0:
        return 0.0
    if math.isinf(a) and not math.isinf(b):
        return a if (a < 0) == (b < 0) or a > 0 else -_INF
    q = a / b
    if q == -_INF:
        return q
    if q == _INF:
        return q if math.isinf(a) else _MAXF
    if q != q:
        return -_INF
    s = _div_err_sign(a, b, q)
    if not s >= 0.0:
        return math.nextafter(q, -_INF)
    return q


def _div_ru(a: float, b: float) -> float:
    if a == 0.0:
        return 0.0
    if math.isinf(a) and not math.isinf(b):
        return a if a > 0 or (a < 0) == (b < 0) else _INF
    q = a / b
    if q == _INF:
        return q
    if q == -_INF:
        return q if math.isinf(a) else -_MAXF
    if q != q:
        return _INF
    s = _div_err_sign(a, b, q)
    if not s <= 0.0:
        return math.nextafter(q, _INF)
    return q


def _pow_chain_rd(t: float, k: int) -> float:
    """Underestimate of t**k for t >= 0 via a directed multiplication chain."""
    r = t
    for _ in range(k - 1):
        r = _mul_rd(r, t)
    return r


def _pow_chain_ru(t: float, k: int) -> float:
    r = t
    for _ in range(k - 1):
        r = _mul_ru(r, t)
    return r


def _fmt_bound(v: float) -> str:
    if v == _INF:
        return "inf"
    if v == -_INF:
        return "-inf"
    return repr(v)


# ---------------------------------------------------------------------------


class Interval:
    """Closed interval [lo, hi]; bounds may be -inf/+inf, never NaN.

    Construction is exact (no rounding is applied to the given bounds) and
    rejects lo > hi and NaN bounds.  Instances are immutable and hashable;
    all arithmetic is pure, so intervals can be shared freely between
    workers.
    """

    __slots__ = ("lo", "hi")

    lo: float
    hi: float

    def __init__(self, lo: float, hi: float) -> None:
        lo = float(lo)
        hi = float(hi)
        if lo != lo or hi != hi:
            raise InvalidBound(f"NaN bound in [{lo}, {hi}]")
        if lo > hi:
            raise OrderViolation(f"lower bound {lo!r} exceeds upper bound {hi!r}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("Interval is immutable")

    def __repr__(self) -> str:
        return f"[{_fmt_bound(self.lo)},{_fmt_bound(self.hi)}]"

    __str__ = __repr__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Interval):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self) -> int:
        return hash((self.lo, self.hi))

    # -- queries ------------------------------------------------------------

    @property
    def is_bounded(self) -> bool:
        return not (math.isinf(self.lo) or math.isinf(self.hi))

    @property
    def is_degenerate(self) -> bool:
        return self.lo == self.hi

    @property
    def mid(self) -> float:
        """A representable point inside the interval nearest the midpoint."""
        if not self.is_bounded:
            raise UnboundedInterval(f"midpoint of {self}")
        m = 0.5 * (self.lo + self.hi)
        if math.isinf(m):
            m = 0.5 * self.lo + 0.5 * self.hi
        if m < self.lo:
            return self.lo
        if m > self.hi:
            return self.hi
        return m

    @property
    def width(self) -> float:
        """Outward-rounded hi - lo."""
        if not self.is_bounded:
            raise UnboundedInterval(f"width of {self}")
        return _add_ru(self.hi, -self.lo)

    @property
    def rad(self) -> float:
        """Outward-rounded half-width."""
        w = self.width
        r = 0.5 * w
        if _add_ru(r, r) < w:
            r = math.nextafter(r, _INF)
        return r

    def contains(self, value: float) -> bool:
        return self.lo <= value <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def strictly_contains(self, other: "Interval") -> bool:
        return self.lo < other.lo and other.hi < self.hi

    # -- arithmetic -----------------------------------------------------------

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(_add_rd(self.lo, other.lo), _add_ru(self.hi, other.hi))

    def __sub__(self, other: "Interval") -> "Interval":
        return Interval(_add_rd(self.lo, -other.hi), _add_ru(self.hi, -other.lo))

    def __mul__(self, other: "Interval") -> "Interval":
        xl, xh, yl, yh = self.lo, self.hi, other.lo, other.hi
        lo = min(_mul_rd(xl, yl), _mul_rd(xl, yh), _mul_rd(xh, yl), _mul_rd(xh, yh))
        hi = max(_mul_ru(xl, yl), _mul_ru(xl, yh), _mul_ru(xh, yl), _mul_ru(xh, yh))
        return Interval(lo, hi)

    def __pow__(self, k: int) -> "Interval":
        if k < 0 or k != int(k):
            raise ValueError("exponent must be a non-negative integer")
        k = int(k)
        if k == 0:
            return Interval(1.0, 1.0)
        if k == 1:
            return self
        if k % 2 == 0:
            if self.contains_zero():
                mag_lo = 0.0
            else:
                mag_lo = min(abs(self.lo), abs(self.hi))
            mag_hi = max(abs(self.lo), abs(self.hi))
            return Interval(_pow_chain_rd(mag_lo, k), _pow_chain_ru(mag_hi, k))
        lo = _pow_chain_rd(self.lo, k) if self.lo >= 0 else -_pow_chain_ru(-self.lo, k)
        hi = _pow_chain_ru(self.hi, k) if self.hi >= 0 else -_pow_chain_rd(-self.hi, k)
        return Interval(lo, hi)

    def recip(self) -> "Interval":
        """Outward-rounded 1/x; requires 0 not in x."""
        if self.contains_zero():
            raise ZeroInDivisor(f"0 in divisor {self}; use div_extended")
        return Interval(_div_rd(1.0, self.hi), _div_ru(1.0, self.lo))

    def __truediv__(self, other: "Interval") -> "Interval":
        return self * other.recip()

    # -- lattice --------------------------------------------------------------

    def intersect(self, other: "Interval") -> "Interval | None":
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            return None
        return Interval(lo, hi)

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))


@dataclass(frozen=True)
class ExtendedDivResult:
    """Result of extended interval division.

    kind is one of ``empty``, ``single``, ``split``, ``whole``.  ``parts``
    holds zero, one or two intervals; for ``split`` the two parts are
    disjoint and each unbounded on one side; ``whole`` carries the single
    interval [-inf, inf].
    """

    kind: str
    parts: tuple[Interval, ...]

    @property
    def is_empty(self) -> bool:
        return self.kind == "empty"

    def __iter__(self):
        return iter(self.parts)


_EMPTY_DIV = ExtendedDivResult("empty", ())
_WHOLE_DIV = ExtendedDivResult("whole", (Interval(-_INF, _INF),))


def div_extended(x: Interval, y: Interval) -> ExtendedDivResult:
    """Total division: the set {a/b : a in x, b in y, b != 0}, outer-rounded.

    For 0 not in y this is the single interval x * recip(y), bound for
    bound.  For divisors containing zero it follows the Hanson/Kahan
    case table.  A degenerate divisor [0,0] yields the empty set unless x
    also contains 0, in which case the quotient is unconstrained (whole
    line); returning Split/Whole instead of an error keeps contractors
    total.
    """
    if not y.contains_zero():
        return ExtendedDivResult("single", (x * y.recip(),))
    if y.lo == 0.0 and y.hi == 0.0:
        return _WHOLE_DIV if x.contains_zero() else _EMPTY_DIV
    if x.lo < 0.0 < x.hi:
        return _WHOLE_DIV
    if x.lo == 0.0 and x.hi == 0.0:
        # 0/y with 0 in y, y != [0,0]: quotient is 0 for every nonzero b
        return ExtendedDivResult("single", (Interval(0.0, 0.0),))
    if x.hi <= 0.0:
        if y.lo == 0.0:  # y = [0, +]
            return ExtendedDivResult("single", (Interval(-_INF, _div_ru(x.hi, y.hi)),))
        if y.hi == 0.0:  # y = [-, 0]
            return ExtendedDivResult("single", (Interval(_div_rd(x.hi, y.lo), _INF),))
        a = _div_ru(x.hi, y.hi)  # upper end of the negative-side piece
        b = _div_rd(x.hi, y.lo)  # lower end of the positive-side piece
        if a >= b:
            return _WHOLE_DIV
        return ExtendedDivResult("split", (Interval(-_INF, a), Interval(b, _INF)))
    # x.lo >= 0, x != [0,0]
    if y.lo == 0.0:
        return ExtendedDivResult("single", (Interval(_div_rd(x.lo, y.hi), _INF),))
    if y.hi == 0.0:
        return ExtendedDivResult("single", (Interval(-_INF, _div_ru(x.lo, y.lo)),))
    a = _div_ru(x.lo, y.lo)
    b = _div_rd(x.lo, y.hi)
    if a >= b:
        return _WHOLE_DIV
    return ExtendedDivResult("split", (Interval(-_INF, a), Interval(b, _INF)))


def parse_interval(text: str) -> Interval:
    """Parse the text form ``[lo,hi]`` produced by str(Interval)."""
    t = text.strip()
    if not (t.startswith("[") and t.endswith("]")):
        raise IntervalError(f"malformed interval text {text!r}")
    body = t[1:-1]
    parts = body.split(",")
    if len(parts) != 2:
        raise IntervalError(f"malformed interval text {text!r}")
    try:
        lo = float(parts[0])
        hi = float(parts[1])
    except ValueError as exc:
        raise IntervalError(f"malformed interval text {text!r}") from exc
    return Interval(lo, hi)
