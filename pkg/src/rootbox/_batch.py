"""Vectorized kernels for the branch-and-bound hot path.

These mirror the scalar interval semantics bit for bit on arrays of boxes:
the same error-free transformations decide directed rounding, the same
operation order is used for polynomial evaluation, so a batch filter pass
and the scalar reference produce identical surviving boxes.  All batch
arrays hold finite bounds (boxes under subdivision are always bounded).

Box batches are pairs of float64 arrays lo, hi of shape (N, n).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .poly import PolySystem

_SPLITTER = 134217729.0
_TINY = 2.0 ** -970
_BIG = 2.0 ** 995
_MAXF = np.finfo(np.float64).max
_NEG = np.float64(-np.inf)
_POS = np.float64(np.inf)


# -- directed array arithmetic ------------------------------------------------


def _add_rd(a, b):
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    out = np.where(e < 0, np.nextafter(s, _NEG), s)
    if np.isinf(s).any():
        out = np.where(s == _POS, _MAXF, out)
        out = np.where(s == _NEG, _NEG, out)
    return out


def _add_ru(a, b):
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    out = np.where(e > 0, np.nextafter(s, _POS), s)
    if np.isinf(s).any():
        out = np.where(s == _NEG, -_MAXF, out)
        out = np.where(s == _POS, _POS, out)
    return out


def _prod_parts(a, b):
    p = a * b
    ah = _SPLITTER * a
    ah = ah - (ah - a)
    al = a - ah
    bh = _SPLITTER * b
    bh = bh - (bh - b)
    bl = b - bh
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    untrusted = (np.abs(a) > _BIG) | (np.abs(b) > _BIG) | (np.abs(p) < _TINY)
    return p, e, untrusted


def _mul_rd(a, b):
    p, e, untrusted = _prod_parts(a, b)
    out = np.where(~(e >= 0) | untrusted, np.nextafter(p, _NEG), p)
    if np.isinf(p).any():
        out = np.where(p == _POS, _MAXF, out)
        out = np.where(p == _NEG, _NEG, out)
    zero = (a == 0.0) | (b == 0.0)
    if zero.any():
        out = np.where(zero, 0.0, out)
    return out


def _mul_ru(a, b):
    p, e, untrusted = _prod_parts(a, b)
    out = np.where(~(e <= 0) | untrusted, np.nextafter(p, _POS), p)
    if np.isinf(p).any():
        out = np.where(p == _NEG, -_MAXF, out)
        out = np.where(p == _POS, _POS, out)
    zero = (a == 0.0) | (b == 0.0)
    if zero.any():
        out = np.where(zero, 0.0, out)
    return out


def i_add(x, y):
    return _add_rd(x[0], y[0]), _add_ru(x[1], y[1])


def i_mul(x, y):
    xl, xh = x
    yl, yh = y
    lo = np.minimum(
        np.minimum(_mul_rd(xl, yl), _mul_rd(xl, yh)),
        np.minimum(_mul_rd(xh, yl), _mul_rd(xh, yh)),
    )
    hi = np.maximum(
        np.maximum(_mul_ru(xl, yl), _mul_ru(xl, yh)),
        np.maximum(_mul_ru(xh, yl), _mul_ru(xh, yh)),
    )
    return lo, hi


def _chain_rd(t, k):
    r = t
    for _ in range(k - 1):
        r = _mul_rd(r, t)
    return r


def _chain_ru(t, k):
    r = t
    for _ in range(k - 1):
        r = _mul_ru(r, t)
    return r


def i_pow(x, k: int):
    xl, xh = x
    if k == 0:
        one = np.ones_like(xl)
        return one, one.copy()
    if k == 1:
        return xl, xh
    al = np.abs(xl)
    ah = np.abs(xh)
    if k % 2 == 0:
        contains0 = (xl <= 0.0) & (xh >= 0.0)
        mag_lo = np.where(contains0, 0.0, np.minimum(al, ah))
        mag_hi = np.maximum(al, ah)
        return _chain_rd(mag_lo, k), _chain_ru(mag_hi, k)
    lo = np.where(xl >= 0.0, _chain_rd(al, k), -_chain_ru(al, k))
    hi = np.where(xh >= 0.0, _chain_ru(ah, k), -_chain_rd(ah, k))
    return lo, hi


# -- compiled systems ---------------------------------------------------------


@dataclass(frozen=True)
class CompiledPoly:
    # one row per monomial, canonical order: (coeff, ((var, exp), ...))
    terms: tuple[tuple[float, tuple[tuple[int, int], ...]], ...]


@dataclass(frozen=True)
class CompiledSystem:
    dimension: int
    polys: tuple[CompiledPoly, ...]


def compile_system(s: PolySystem) -> CompiledSystem:
    polys = []
    for p in s.polynomials:
        terms = []
        for m in p.monomials:
            factors = tuple((j, e) for j, e in enumerate(m.exps) if e)
            terms.append((m.coeff, factors))
        polys.append(CompiledPoly(tuple(terms)))
    return CompiledSystem(s.dimension, tuple(polys))


def eval_poly(cp: CompiledPoly, lo, hi, pow_cache: dict):
    """Interval evaluation of one compiled polynomial over a batch.

    Mirrors Polynomial.eval_interval exactly: term = [c,c], multiplied by
    cached powers in variable order, summed in canonical monomial order.
    """
    m = lo.shape[0]
    acc = (np.zeros(m), np.zeros(m))
    for coeff, factors in cp.terms:
        c = np.full(m, coeff)
        term = (c, c.copy())
        for j, e in factors:
            key = (j, e)
            pv = pow_cache.get(key)
            if pv is None:
                pv = i_pow((lo[:, j], hi[:, j]), e)
                pow_cache[key] = pv
            term = i_mul(term, pv)
        acc = i_add(acc, term)
    return acc


def filter_feasible_idx(cs: CompiledSystem, lo, hi) -> np.ndarray:
    """Indices of boxes whose every equation encloses zero.

    Equations are applied in order with survivor compression, matching the
    scalar short-circuit semantics.
    """
    idx = np.arange(lo.shape[0])
    cur_lo, cur_hi = lo, hi
    for cp in cs.polys:
        if idx.size == 0:
            break
        cache: dict = {}
        flo, fhi = eval_poly(cp, cur_lo, cur_hi, cache)
        m = (flo <= 0.0) & (fhi >= 0.0)
        idx = idx[m]
        cur_lo = cur_lo[m]
        cur_hi = cur_hi[m]
    return idx


# -- bisection ----------------------------------------------------------------


def midpoints(lo, hi):
    m = 0.5 * (lo + hi)
    bad = np.isinf(m)
    if bad.any():
        m = np.where(bad, 0.5 * lo + 0.5 * hi, m)
    return np.clip(m, lo, hi)


def degenerate_rows(lo, hi) -> np.ndarray:
    """Rows where some component cannot be split further."""
    m = midpoints(lo, hi)
    return ((m == lo) | (m == hi)).any(axis=1)


def bisect_children(lo, hi):
    """All 2**n children of every row, in canonical binary-counting order.

    Component i of child c takes the low half when bit (n-1-i) of c is 0.
    Rows must be non-degenerate.
    """
    n = lo.shape[1]
    m = midpoints(lo, hi)
    combos = np.arange(1 << n)
    bits = ((combos[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1).astype(bool)
    clo = np.where(bits[None, :, :], m[:, None, :], lo[:, None, :]).reshape(-1, n)
    chi = np.where(bits[None, :, :], hi[:, None, :], m[:, None, :]).reshape(-1, n)
    return clo, chi


# -- ordering -----------------------------------------------------------------


def canonical_order(lo, hi) -> np.ndarray:
    """Sort permutation: lexicographic by lower bounds, then upper bounds."""
    n = lo.shape[1]
    keys = tuple(hi[:, i] for i in reversed(range(n))) + tuple(
        lo[:, i] for i in reversed(range(n))
    )
    return np.lexsort(keys)


def dedup_sorted(lo, hi, *flag_arrays):
    """Drop exact duplicate rows of a canonically sorted batch.

    Boolean flag arrays are OR-combined across duplicate runs.
    """
    m = lo.shape[0]
    if m <= 1:
        return (lo, hi) + flag_arrays
    same = np.all(lo[1:] == lo[:-1], axis=1) & np.all(hi[1:] == hi[:-1], axis=1)
    starts = np.nonzero(np.concatenate(([True], ~same)))[0]
    out_flags = []
    for f in flag_arrays:
        out_flags.append(np.logical_or.reduceat(f, starts))
    return (lo[starts], hi[starts]) + tuple(out_flags)
