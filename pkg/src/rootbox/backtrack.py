"""Merging terminal micro-boxes up the bisection hierarchy.

The initial box induces, per variable, a dyadic grid: level L splits the
initial range into 2**L equal cells.  Repeated exact bisection lands on
this grid, so terminal boxes are grid cells and their ancestors are found
by integer index halving.  All alignment decisions are made in exact
rational arithmetic; cell bounds are materialized to doubles rounded
outward, which is exact whenever the initial bounds are dyadic (every
corpus system).

Merging maps every box to its parent cell, removes exact duplicates, and
repeats; it stops at a requested width or when the count is unchanged for
two consecutive levels (the count has then stabilized, which is the
natural reading of root isolation here).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .interval import Interval
from .poly import Box

__all__ = [
    "GridContext",
    "NotOnGrid",
    "parent_box",
    "snap_to_grid",
    "merge_to_width",
    "MergeResult",
]


class NotOnGrid(ValueError):
    """Box endpoints are not aligned with the dyadic bisection grid."""


def _float_down(q: Fraction) -> float:
    f = float(q)
    if Fraction(f) > q:
        return math.nextafter(f, -math.inf)
    return f


def _float_up(q: Fraction) -> float:
    f = float(q)
    if Fraction(f) < q:
        return math.nextafter(f, math.inf)
    return f


@dataclass(frozen=True)
class GridContext:
    """Per-variable grid anchor (initial lower bound) and initial width."""

    anchors: tuple[Fraction, ...]
    widths: tuple[Fraction, ...]

    @classmethod
    def from_box(cls, initial: Box) -> "GridContext":
        anchors = tuple(Fraction(iv.lo) for iv in initial)
        widths = tuple(Fraction(iv.hi) - Fraction(iv.lo) for iv in initial)
        if any(w <= 0 for w in widths):
            raise ValueError("initial box must have positive widths")
        return cls(anchors, widths)

    @property
    def dimension(self) -> int:
        return len(self.anchors)

    def cell_interval(self, var: int, level: int, index: int) -> Interval:
        w = self.widths[var] / (1 << level) if level >= 0 else self.widths[var] * (1 << -level)
        lo = self.anchors[var] + index * w
        return Interval(_float_down(lo), _float_up(lo + w))

    def cell_box(self, levels, indices) -> Box:
        return Box(tuple(
            self.cell_interval(i, levels[i], indices[i]) for i in range(self.dimension)
        ))

    def locate(self, box: Box) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Exact (levels, indices) of a grid-aligned box; NotOnGrid otherwise."""
        if box.dimension != self.dimension:
            raise ValueError("box dimension != grid dimension")
        levels = []
        indices = []
        for i, iv in enumerate(box):
            lo = Fraction(iv.lo)
            hi = Fraction(iv.hi)
            w = hi - lo
            if w <= 0:
                raise NotOnGrid(f"component {i} is degenerate")
            ratio = self.widths[i] / w
            if ratio.denominator != 1 or ratio.numerator & (ratio.numerator - 1):
                raise NotOnGrid(f"component {i} width is not a power-of-two fraction")
            level = ratio.numerator.bit_length() - 1
            k = (lo - self.anchors[i]) / w
            if k.denominator != 1:
                raise NotOnGrid(f"component {i} is not aligned with the level-{level} grid")
            k = k.numerator
            if not 0 <= k < (1 << level):
                raise NotOnGrid(f"component {i} lies outside the initial range")
            levels.append(level)
            indices.append(k)
        return tuple(levels), tuple(indices)


def parent_box(b: Box, g: GridContext) -> Box:
    """The unique enclosing cell of doubled width, per variable."""
    levels, indices = g.locate(b)
    if any(l == 0 for l in levels):
        raise NotOnGrid("box is already at the initial level; no parent cell")
    return g.cell_box(tuple(l - 1 for l in levels), tuple(k >> 1 for k in indices))


def snap_to_grid(b: Box, g: GridContext) -> Box:
    """Smallest enclosing uniform-level grid cell.

    The level starts at the finest power-of-two cell width that is at
    least the box's largest relative component width; whenever some
    component straddles a cell boundary the whole box moves one level
    coarser, so a straddling component becomes the aligned two-cell hull
    (or coarser when that hull is itself unaligned).  Only enlarges;
    idempotent on aligned boxes.
    """
    if b.dimension != g.dimension:
        raise ValueError("box dimension != grid dimension")
    los = [Fraction(iv.lo) for iv in b]
    his = [Fraction(iv.hi) for iv in b]
    level = None
    for i in range(g.dimension):
        w = his[i] - los[i]
        if los[i] < g.anchors[i] or his[i] > g.anchors[i] + g.widths[i]:
            raise NotOnGrid(f"component {i} lies outside the initial range")
        if w == 0:
            continue
        ratio = g.widths[i] / w  # >= 1
        li = (ratio.numerator // ratio.denominator).bit_length() - 1
        level = li if level is None else min(level, li)
    if level is None:
        level = 52  # a point box: snap to a deep cell
    while level > 0:
        indices = []
        ok = True
        for i in range(g.dimension):
            cw = g.widths[i] / (1 << level)
            k = (los[i] - g.anchors[i]) // cw
            k = min(int(k), (1 << level) - 1)
            if his[i] > g.anchors[i] + (k + 1) * cw:
                ok = False
                break
            indices.append(k)
        if ok:
            return g.cell_box((level,) * g.dimension, tuple(indices))
        level -= 1
    return g.cell_box((0,) * g.dimension, (0,) * g.dimension)


@dataclass(frozen=True)
class MergeResult:
    levels: tuple[tuple[float, int], ...]  # (max cell width, box count) per level
    boxes: tuple[Box, ...]
    certified: tuple[bool, ...]


def _drop_nested(cells: dict) -> dict:
    """Absorb cells contained in a coarser cell of the set (flags OR)."""
    sigs = {lv for (lv, ix) in cells}
    if len(sigs) <= 1:
        return cells
    order = sorted(cells.items(), key=lambda kv: sum(kv[0][0]))  # coarse first
    kept: dict[tuple, bool] = {}
    kept_sigs: list[tuple] = []
    for (lv, ix), flag in order:
        container = None
        for sig in kept_sigs:
            if sig != lv and all(s <= l for s, l in zip(sig, lv)):
                anc = (sig, tuple(k >> (l - s) for k, l, s in zip(ix, lv, sig)))
                if anc in kept:
                    container = anc
                    break
        if container is not None:
            kept[container] = kept[container] or flag
        else:
            key = (lv, ix)
            kept[key] = kept.get(key, False) or flag
            if lv not in kept_sigs:
                kept_sigs.append(lv)
    return kept


def merge_to_width(boxes, g: GridContext, stop_width: float | None = None,
                   stop_on_plateau: bool = True, certified=None) -> MergeResult:
    """Merge grid-aligned boxes upward level by level.

    boxes must be grid-aligned (snap_to_grid non-aligned boxes first).
    Records (width, count) at the input level and after every merge step;
    stops when the count repeats (stop_on_plateau), when the cell width
    reaches stop_width, or at the initial level.  Certified flags are
    combined by OR when boxes merge.
    """
    boxes = list(boxes)
    if certified is None:
        certified = [False] * len(boxes)
    cells: dict[tuple, bool] = {}
    for box, flag in zip(boxes, certified):
        key = g.locate(box)
        cells[key] = cells.get(key, False) or flag
    cells = _drop_nested(cells)

    def cur_width() -> float:
        sigs = {lv for (lv, ix) in cells}
        if not sigs:
            return 0.0
        return max(
            float(g.widths[i] / (1 << lv[i])) if lv[i] >= 0 else float(g.widths[i] * (1 << -lv[i]))
            for lv in sigs
            for i in range(g.dimension)
        )

    levels_log: list[tuple[float, int]] = []
    levels_log.append((cur_width(), len(cells)))
    while cells:
        if stop_on_plateau and len(levels_log) >= 2 and levels_log[-1][1] == levels_log[-2][1]:
            break
        if stop_width is not None and levels_log[-1][0] >= stop_width:
            break
        if any(l == 0 for (lv, ix) in cells for l in lv):
            break
        parents: dict[tuple, bool] = {}
        for (lv, ix), flag in cells.items():
            key = (tuple(l - 1 for l in lv), tuple(k >> 1 for k in ix))
            parents[key] = parents.get(key, False) or flag
        cells = _drop_nested(parents)
        levels_log.append((cur_width(), len(cells)))

    ordered = sorted(cells.items(), key=lambda kv: g.cell_box(*kv[0]).sort_key())
    out_boxes = tuple(g.cell_box(lv, ix) for (lv, ix), _ in ordered)
    out_flags = tuple(flag for _, flag in ordered)
    return MergeResult(tuple(levels_log), out_boxes, out_flags)
