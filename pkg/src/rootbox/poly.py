"""Polynomial systems: representation, parsing, interval evaluation, Jacobian.

A Polynomial is a canonically ordered list of monomials (graded-lex,
descending) with double coefficients and non-negative integer exponents.
Expression expansion during parsing is done in exact rational arithmetic;
each combined coefficient is converted to the nearest double once, so all
later interval evaluation is outward-correct relative to the parsed
coefficients.

The system file grammar (UTF-8, line oriented, ``#`` comments):

    vars: x y
    init: x in [-2,2]; y in [-2,2]
    eq: x^2 + y^2 - 2
    eq: x - y = 0

Implicit multiplication is not allowed; exponents are non-negative integer
literals.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction

from .interval import Interval

__all__ = [
    "Monomial",
    "Polynomial",
    "PolySystem",
    "Box",
    "parse_system",
    "print_system",
    "SystemSyntaxError",
    "UnknownVariable",
    "DimensionMismatch",
]


class SystemSyntaxError(ValueError):
    """Malformed system text; carries 1-based line and column."""

    def __init__(self, message: str, line: int, col: int) -> None:
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


class UnknownVariable(SystemSyntaxError):
    pass


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Monomial:
    """coeff * prod(x_j ** exps[j]); exps length equals system dimension."""

    coeff: float
    exps: tuple[int, ...]

    @property
    def degree(self) -> int:
        return sum(self.exps)


def _canon_key(exps: tuple[int, ...]):
    return (sum(exps), exps)


@dataclass(frozen=True)
class Box:
    """Ordered tuple of intervals: a candidate solution region."""

    intervals: tuple[Interval, ...]

    @classmethod
    def of(cls, *intervals: Interval) -> "Box":
        return cls(tuple(intervals))

    @classmethod
    def from_point(cls, point) -> "Box":
        return cls(tuple(Interval(float(v), float(v)) for v in point))

    @classmethod
    def from_bounds(cls, los, his) -> "Box":
        return cls(tuple(Interval(lo, hi) for lo, hi in zip(los, his)))

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def __getitem__(self, i: int) -> Interval:
        return self.intervals[i]

    @property
    def dimension(self) -> int:
        return len(self.intervals)

    @property
    def is_bounded(self) -> bool:
        return all(iv.is_bounded for iv in self.intervals)

    def max_width(self) -> float:
        return max(iv.width for iv in self.intervals)

    def midpoint(self) -> tuple[float, ...]:
        return tuple(iv.mid for iv in self.intervals)

    def contains_point(self, point) -> bool:
        return all(iv.contains(float(v)) for iv, v in zip(self.intervals, point))

    def contains_box(self, other: "Box") -> bool:
        return all(a.contains_interval(b) for a, b in zip(self.intervals, other.intervals))

    def strictly_contains(self, other: "Box") -> bool:
        return all(a.strictly_contains(b) for a, b in zip(self.intervals, other.intervals))

    def replace(self, i: int, iv: Interval) -> "Box":
        parts = list(self.intervals)
        parts[i] = iv
        return Box(tuple(parts))

    def sort_key(self):
        return tuple(iv.lo for iv in self.intervals) + tuple(iv.hi for iv in self.intervals)

    def __str__(self) -> str:
        return " x ".join(str(iv) for iv in self.intervals)


class Polynomial:
    """Multivariate polynomial in canonical combined form.

    Monomials are unique per exponent vector and kept in descending
    graded-lex order so evaluation and printing are deterministic.
    """

    __slots__ = ("monomials", "dimension")

    def __init__(self, monomials, dimension: int) -> None:
        combined: dict[tuple[int, ...], float] = {}
        for m in monomials:
            if len(m.exps) != dimension:
                raise DimensionMismatch(
                    f"monomial arity {len(m.exps)} != dimension {dimension}"
                )
            if m.coeff == 0.0:
                continue
            if m.exps in combined:
                raise ValueError(f"duplicate exponent vector {m.exps}")
            combined[m.exps] = float(m.coeff)
        order = sorted(combined, key=_canon_key, reverse=True)
        self.monomials = tuple(Monomial(combined[e], e) for e in order)
        self.dimension = dimension

    @classmethod
    def from_dict(cls, coeffs: dict[tuple[int, ...], float], dimension: int) -> "Polynomial":
        return cls((Monomial(c, e) for e, c in coeffs.items()), dimension)

    @classmethod
    def zero(cls, dimension: int) -> "Polynomial":
        return cls((), dimension)

    @property
    def is_zero(self) -> bool:
        return not self.monomials

    @property
    def degree(self) -> int:
        return max((m.degree for m in self.monomials), default=0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.dimension == other.dimension and self.monomials == other.monomials

    def __hash__(self) -> int:
        return hash((self.dimension, self.monomials))

    def eval_interval(self, box: Box) -> Interval:
        """Interval enclosure of the range over the box.

        Direct monomial-by-monomial evaluation: interval powers per
        variable (with even-power tightening), interval products across
        variables in index order, interval sum in canonical order.
        """
        if box.dimension != self.dimension:
            raise DimensionMismatch(f"box dimension {box.dimension} != {self.dimension}")
        acc = Interval(0.0, 0.0)
        for m in self.monomials:
            term = Interval(m.coeff, m.coeff)
            for j, e in enumerate(m.exps):
                if e:
                    term = term * (box[j] ** e)
            acc = acc + term
        return acc

    def eval_point(self, point) -> Interval:
        """Thin-interval enclosure of the exact value at a point."""
        return self.eval_interval(Box.from_point(point))

    def differentiate(self, var_index: int) -> "Polynomial":
        """Exact symbolic partial derivative with respect to one variable."""
        if not 0 <= var_index < self.dimension:
            raise IndexError(f"variable index {var_index} out of range")
        out: dict[tuple[int, ...], float] = {}
        for m in self.monomials:
            e = m.exps[var_index]
            if e == 0:
                continue
            exps = list(m.exps)
            exps[var_index] = e - 1
            out[tuple(exps)] = float(Fraction(m.coeff) * e)
        return Polynomial.from_dict(out, self.dimension)

    def to_text(self, var_names) -> str:
        if not self.monomials:
            return "0"
        parts: list[str] = []
        for i, m in enumerate(self.monomials):
            factors = [
                f"{var_names[j]}^{e}" if e > 1 else var_names[j]
                for j, e in enumerate(m.exps)
                if e
            ]
            c = abs(m.coeff)
            body = "*".join(factors)
            if not factors:
                text = _fmt_coeff(c)
            elif c == 1.0:
                text = body
            else:
                text = f"{_fmt_coeff(c)}*{body}"
            if i == 0:
                parts.append(text if m.coeff >= 0 else f"-{text}")
            else:
                parts.append(f"+ {text}" if m.coeff >= 0 else f"- {text}")
        return " ".join(parts)

    def __repr__(self) -> str:
        names = [f"x{i + 1}" for i in range(self.dimension)]
        return f"Polynomial({self.to_text(names)})"


def _fmt_coeff(c: float) -> str:
    if c == int(c) and abs(c) < 1e16:
        return str(int(c))
    return repr(c)


class PolySystem:
    """Square polynomial system with its initial search box."""

    __slots__ = ("name", "var_names", "polynomials", "initial_box", "source_equations", "_jac")

    def __init__(self, polynomials, var_names, initial_box: Box,
                 name: str = "", source_equations=()) -> None:
        self.polynomials = tuple(polynomials)
        self.var_names = tuple(var_names)
        self.initial_box = initial_box
        self.name = name
        self.source_equations = tuple(source_equations)
        if len(self.polynomials) != len(self.var_names):
            raise DimensionMismatch(
                f"{len(self.polynomials)} equations for {len(self.var_names)} variables"
            )
        if initial_box.dimension != len(self.var_names):
            raise DimensionMismatch("initial box dimension != variable count")
        if not initial_box.is_bounded:
            raise ValueError("initial box must be bounded")
        self._jac = None

    @property
    def dimension(self) -> int:
        return len(self.var_names)

    def jacobian(self):
        """n x n matrix of symbolic partials; computed once and cached."""
        if self._jac is None:
            self._jac = tuple(
                tuple(p.differentiate(j) for j in range(self.dimension))
                for p in self.polynomials
            )
        return self._jac

    def __repr__(self) -> str:
        return f"PolySystem({self.name or '?'}, n={self.dimension})"


# ---------------------------------------------------------------------------
# parsing


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*^()=]))"
)


def _tokenize(text: str, line_no: int, col0: int):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise SystemSyntaxError(
                f"unexpected character {text[pos:].strip()[0]!r}",
                line_no, col0 + pos + 1,
            )
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), col0 + m.start(kind) + 1))
        pos = m.end()
    return tokens


class _ExprParser:
    """Recursive-descent parser producing exact-rational monomial dicts."""

    def __init__(self, tokens, line_no: int, var_index: dict[str, int]):
        self.tokens = tokens
        self.pos = 0
        self.line = line_no
        self.vars = var_index
        self.n = len(var_index)

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        if tok is None:
            raise SystemSyntaxError("unexpected end of expression", self.line, 0)
        self.pos += 1
        return tok

    def expect_op(self, op: str):
        tok = self.take()
        if tok[0] != "op" or tok[1] != op:
            raise SystemSyntaxError(f"expected {op!r}, got {tok[1]!r}", self.line, tok[2])

    def parse(self) -> dict[tuple[int, ...], Fraction]:
        p = self.expr()
        tok = self.peek()
        if tok is not None:
            if tok[0] == "op" and tok[1] == "=":
                self.take()
                zero = self.take()
                if zero[0] != "num" or Fraction(Decimal(zero[1])) != 0:
                    raise SystemSyntaxError("equation must end in '= 0'", self.line, zero[2])
                if self.peek() is not None:
                    extra = self.peek()
                    raise SystemSyntaxError("trailing input after '= 0'", self.line, extra[2])
            else:
                raise SystemSyntaxError(f"unexpected token {tok[1]!r}", self.line, tok[2])
        return p

    def expr(self):
        tok = self.peek()
        negate = False
        if tok is not None and tok[0] == "op" and tok[1] in "+-":
            self.take()
            negate = tok[1] == "-"
        p = self.term()
        if negate:
            p = {e: -c for e, c in p.items()}
        while True:
            tok = self.peek()
            if tok is None or tok[0] != "op" or tok[1] not in "+-":
                break
            self.take()
            q = self.term()
            sign = 1 if tok[1] == "+" else -1
            for e, c in q.items():
                p[e] = p.get(e, Fraction(0)) + sign * c
        return {e: c for e, c in p.items() if c != 0}

    def term(self):
        p = self.factor()
        while True:
            tok = self.peek()
            if tok is None or tok[0] != "op" or tok[1] != "*":
                break
            self.take()
            q = self.factor()
            p = self._mul(p, q)
        return p

    def factor(self):
        tok = self.peek()
        if tok is not None and tok[0] == "op" and tok[1] in "+-":
            self.take()
            p = self.factor()
            if tok[1] == "-":
                return {e: -c for e, c in p.items()}
            return p
        p = self.primary()
        tok = self.peek()
        if tok is not None and tok[0] == "op" and tok[1] == "^":
            self.take()
            etok = self.take()
            if etok[0] != "num" or not re.fullmatch(r"\d+", etok[1]):
                raise SystemSyntaxError(
                    "exponent must be a non-negative integer literal", self.line, etok[2]
                )
            k = int(etok[1])
            p = self._pow(p, k)
        return p

    def primary(self):
        tok = self.take()
        if tok[0] == "num":
            return {(0,) * self.n: Fraction(Decimal(tok[1]))}
        if tok[0] == "ident":
            idx = self.vars.get(tok[1])
            if idx is None:
                raise UnknownVariable(f"unknown variable {tok[1]!r}", self.line, tok[2])
            e = [0] * self.n
            e[idx] = 1
            return {tuple(e): Fraction(1)}
        if tok[0] == "op" and tok[1] == "(":
            p = self.expr()
            self.expect_op(")")
            return p
        raise SystemSyntaxError(f"unexpected token {tok[1]!r}", self.line, tok[2])

    def _mul(self, p, q):
        out: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in p.items():
            for e2, c2 in q.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return {e: c for e, c in out.items() if c != 0}

    def _pow(self, p, k: int):
        out = {(0,) * self.n: Fraction(1)}
        for _ in range(k):
            out = self._mul(out, p)
        return out


def parse_system(text: str, name: str = "") -> PolySystem:
    """Parse a system file; see the module docstring for the grammar."""
    var_names: list[str] | None = None
    var_index: dict[str, int] = {}
    init: dict[str, Interval] = {}
    eq_polys: list[dict] = []
    eq_sources: list[str] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        if stripped.startswith("vars:"):
            if var_names is not None:
                raise SystemSyntaxError("duplicate vars: line", line_no, 1)
            names = stripped[len("vars:"):].split()
            if not names:
                raise SystemSyntaxError("vars: needs at least one variable", line_no, 1)
            for nm in names:
                if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", nm):
                    raise SystemSyntaxError(f"bad variable name {nm!r}", line_no, 1)
                if nm in var_index:
                    raise SystemSyntaxError(f"duplicate variable {nm!r}", line_no, 1)
                var_index[nm] = len(var_index)
            var_names = names
        elif stripped.startswith("init:"):
            if var_names is None:
                raise SystemSyntaxError("init: before vars:", line_no, 1)
            body = stripped[len("init:"):]
            for clause in body.split(";"):
                clause = clause.strip()
                if not clause:
                    continue
                m = re.fullmatch(
                    r"([A-Za-z_][A-Za-z0-9_]*)\s+in\s+\[\s*([^,\]]+)\s*,\s*([^,\]]+)\s*\]",
                    clause,
                )
                if m is None:
                    raise SystemSyntaxError(f"bad init clause {clause!r}", line_no, 1)
                nm = m.group(1)
                if nm not in var_index:
                    raise UnknownVariable(f"unknown variable {nm!r}", line_no, 1)
                if nm in init:
                    raise SystemSyntaxError(f"duplicate init for {nm!r}", line_no, 1)
                try:
                    lo = float(m.group(2))
                    hi = float(m.group(3))
                except ValueError:
                    raise SystemSyntaxError(f"bad number in init clause {clause!r}", line_no, 1)
                init[nm] = Interval(lo, hi)
        elif stripped.startswith("eq:"):
            if var_names is None:
                raise SystemSyntaxError("eq: before vars:", line_no, 1)
            body = stripped[len("eq:"):]
            col0 = len(raw) - len(raw.lstrip()) + len("eq:")
            tokens = _tokenize(body, line_no, col0)
            if not tokens:
                raise SystemSyntaxError("empty equation", line_no, col0 + 1)
            parser = _ExprParser(tokens, line_no, var_index)
            eq_polys.append(parser.parse())
            eq_sources.append(body.strip())
        else:
            raise SystemSyntaxError(f"unrecognized line {stripped[:30]!r}", line_no, 1)

    if var_names is None:
        raise SystemSyntaxError("missing vars: line", len(text.splitlines()) + 1, 1)
    if len(eq_polys) != len(var_names):
        raise DimensionMismatch(
            f"{len(eq_polys)} equations for {len(var_names)} variables"
        )
    missing = [nm for nm in var_names if nm not in init]
    if missing:
        raise SystemSyntaxError(
            f"missing init range for {', '.join(missing)}", len(text.splitlines()) + 1, 1
        )

    n = len(var_names)
    polys = [
        Polynomial.from_dict({e: float(c) for e, c in p.items()}, n) for p in eq_polys
    ]
    box = Box(tuple(init[nm] for nm in var_names))
    return PolySystem(polys, var_names, box, name=name, source_equations=eq_sources)


def print_system(s: PolySystem) -> str:
    """Render a system in the file grammar; parse(print(s)) is identity."""
    lines = [f"vars: {' '.join(s.var_names)}"]
    clauses = [
        f"{nm} in [{_fmt_coeff(iv.lo)},{_fmt_coeff(iv.hi)}]"
        for nm, iv in zip(s.var_names, s.initial_box)
    ]
    lines.append("init: " + "; ".join(clauses))
    for p in s.polynomials:
        lines.append(f"eq: {p.to_text(s.var_names)}")
    return "\n".join(lines) + "\n"
