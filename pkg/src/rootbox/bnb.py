"""Outer global search: bisect, filter, contract, repeat.

Every round maps each surviving box through 2**n-way bisection, interval
feasibility filtering, and (once the trigger fires) the Hansen-Sengupta
contractor; the round ends with a canonical sort so results never depend
on scheduling.  Boxes that already meet the target width (or can no longer
be split at double precision) ride along unchanged.

Two interchangeable engines process rounds: a vectorized batch engine
(default) and a plain per-box scalar engine; they produce bit-identical
surviving sets and the test suite holds them to that.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _batch, hansen
from .interval import Interval
from .poly import Box, PolySystem

__all__ = [
    "SolverConfig",
    "RoundStats",
    "SolveResult",
    "RootBox",
    "DegenerateInterval",
    "bisect_all",
    "filter_feasible",
    "solve",
    "NO_REAL_SOLUTION",
    "WIDTH_REACHED",
    "BUDGET_EXHAUSTED",
]

NO_REAL_SOLUTION = "no_real_solution"
WIDTH_REACHED = "width_reached"
BUDGET_EXHAUSTED = "budget_exhausted"


class DegenerateInterval(ValueError):
    """A component's midpoint equals an endpoint; the box cannot be split."""


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for solve(); every field has a usable default.

    target_width None means 2**-10 of the largest initial width.  The
    contractor runs in a round when the round index reaches
    hs_enable_round (0 = always) or once boxes are no wider than
    hs_enable_width; setting both to None disables it.  hs_contract False
    keeps contraction as a pure emptiness/existence test (boxes pass
    through unshrunk, preserving grid alignment).
    """

    target_width: float | None = None
    hs_enable_round: int | None = None
    hs_enable_width: float | None = 1.0
    max_rounds: int = 24
    max_boxes: int = 200_000_000
    max_seconds: float | None = None
    worker_count: int = 1
    batch_size: int = 4096
    hs_contract: bool = True
    engine: str = "batch"  # 'batch' | 'scalar'

    def validate(self) -> None:
        if self.target_width is not None and not self.target_width > 0:
            raise ValueError("target_width must be positive")
        if self.max_boxes < 1:
            raise ValueError("max_boxes must be at least 1")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be at least 1")
        if self.worker_count < 1:
            raise ValueError("worker_count must be at least 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if self.hs_enable_round is not None and self.hs_enable_round < 0:
            raise ValueError("hs_enable_round must be >= 0")
        if self.engine not in ("batch", "scalar"):
            raise ValueError(f"unknown engine {self.engine!r}")


@dataclass(frozen=True)
class RoundStats:
    round: int
    boxes_in: int
    boxes_after_filter: int
    boxes_after_hs: int
    width: float
    elapsed_seconds: float


@dataclass(frozen=True)
class RootBox:
    box: Box
    certified: bool = False
    unsplittable: bool = False


@dataclass(frozen=True)
class SolveResult:
    status: str
    boxes: tuple[RootBox, ...]
    stats: tuple[RoundStats, ...] = field(default=())

    @property
    def reached_width(self) -> bool:
        return self.status == WIDTH_REACHED


# -- scalar reference operations ---------------------------------------------


def bisect_all(b: Box) -> list[Box]:
    """All 2**n children from splitting every component at its midpoint.

    Children are ordered by binary counting (first variable most
    significant, low half first).  Raises DegenerateInterval when some
    component's midpoint equals an endpoint.
    """
    n = b.dimension
    halves = []
    for iv in b:
        m = iv.mid
        if m == iv.lo or m == iv.hi:
            raise DegenerateInterval(f"cannot split {iv}")
        halves.append((Interval(iv.lo, m), Interval(m, iv.hi)))
    out = []
    for combo in range(1 << n):
        out.append(Box(tuple(
            halves[i][(combo >> (n - 1 - i)) & 1] for i in range(n)
        )))
    return out


def filter_feasible(s: PolySystem, boxes) -> list[Box]:
    """Boxes whose every equation's interval evaluation contains zero.

    Evaluation short-circuits on the first zero-free equation; surviving
    order is preserved.
    """
    out = []
    for b in boxes:
        for p in s.polynomials:
            if not p.eval_interval(b).contains_zero():
                break
        else:
            out.append(b)
    return out


# -- engines -------------------------------------------------------------------


def _chunk_batch(args):
    cs, lo, hi = args
    clo, chi = _batch.bisect_children(lo, hi)
    idx = _batch.filter_feasible_idx(cs, clo, chi)
    return clo[idx], chi[idx]


def _chunk_scalar(args):
    s, lo, hi = args
    survivors_lo, survivors_hi = [], []
    for r in range(lo.shape[0]):
        parent = Box.from_bounds(lo[r], hi[r])
        children = bisect_all(parent)
        for child in filter_feasible(s, children):
            survivors_lo.append([iv.lo for iv in child])
            survivors_hi.append([iv.hi for iv in child])
    n = lo.shape[1]
    if not survivors_lo:
        return np.empty((0, n)), np.empty((0, n))
    return np.asarray(survivors_lo), np.asarray(survivors_hi)


def _run_chunks(fn, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def _hs_pass(s: PolySystem, jac, lo, hi, contract_output: bool):
    """Scalar Hansen-Sengupta over rows; returns surviving rows + flags."""
    out_lo, out_hi, out_cert = [], [], []
    for r in range(lo.shape[0]):
        b = Box.from_bounds(lo[r], hi[r])
        oc = hansen.contract(s, jac, b)
        if oc.is_empty:
            continue
        if oc.is_skipped:
            out_lo.append(lo[r])
            out_hi.append(hi[r])
            out_cert.append(False)
        elif not contract_output:
            out_lo.append(lo[r])
            out_hi.append(hi[r])
            out_cert.append(oc.existence_certified)
        else:
            for bx in oc.boxes:
                out_lo.append([iv.lo for iv in bx])
                out_hi.append([iv.hi for iv in bx])
                out_cert.append(oc.existence_certified)
    n = lo.shape[1]
    if not out_lo:
        return np.empty((0, n)), np.empty((0, n)), np.empty(0, dtype=bool)
    return (
        np.asarray(out_lo, dtype=np.float64),
        np.asarray(out_hi, dtype=np.float64),
        np.asarray(out_cert, dtype=bool),
    )


# -- main loop ------------------------------------------------------------------


def solve(s: PolySystem, cfg: SolverConfig | None = None) -> SolveResult:
    """Isolate all real roots of the system inside its initial box."""
    cfg = cfg or SolverConfig()
    cfg.validate()
    n = s.dimension
    lo = np.array([[iv.lo for iv in s.initial_box]], dtype=np.float64)
    hi = np.array([[iv.hi for iv in s.initial_box]], dtype=np.float64)
    cert = np.zeros(1, dtype=bool)
    unsplit = np.zeros(1, dtype=bool)

    init_width = float((hi - lo).max())
    target = cfg.target_width if cfg.target_width is not None else init_width * 2.0 ** -10
    hs_possible = cfg.hs_enable_round is not None or cfg.hs_enable_width is not None
    jac = s.jacobian() if hs_possible else None
    cs = _batch.compile_system(s) if cfg.engine == "batch" else None

    stats: list[RoundStats] = []
    status = BUDGET_EXHAUSTED
    t_start = time.perf_counter()

    if init_width <= target:
        return SolveResult(WIDTH_REACHED, _to_rootboxes(lo, hi, cert, unsplit), ())

    for round_no in range(1, cfg.max_rounds + 1):
        t0 = time.perf_counter()
        boxes_in = lo.shape[0]

        widths = (hi - lo).max(axis=1) if boxes_in else np.empty(0)
        done = (widths <= target) | unsplit
        act_lo, act_hi = lo[~done], hi[~done]
        deg = _batch.degenerate_rows(act_lo, act_hi) if act_lo.shape[0] else np.empty(0, bool)
        if deg.any():
            # cannot refine further at double precision: emit as-is
            done_extra_lo, done_extra_hi = act_lo[deg], act_hi[deg]
            act_lo, act_hi = act_lo[~deg], act_hi[~deg]
        else:
            done_extra_lo = np.empty((0, n))
            done_extra_hi = np.empty((0, n))

        keep_lo = [lo[done], done_extra_lo]
        keep_hi = [hi[done], done_extra_hi]
        keep_cert = [cert[done], np.zeros(done_extra_lo.shape[0], dtype=bool)]
        keep_unsplit = [
            unsplit[done],
            np.ones(done_extra_lo.shape[0], dtype=bool),
        ]

        # bisect + filter in chunks
        tasks = []
        for start in range(0, act_lo.shape[0], cfg.batch_size):
            sl = slice(start, start + cfg.batch_size)
            if cfg.engine == "batch":
                tasks.append((cs, act_lo[sl], act_hi[sl]))
            else:
                tasks.append((s, act_lo[sl], act_hi[sl]))
        fn = _chunk_batch if cfg.engine == "batch" else _chunk_scalar
        results = _run_chunks(fn, tasks, cfg.worker_count)
        if results:
            new_lo = np.concatenate([r[0] for r in results])
            new_hi = np.concatenate([r[1] for r in results])
        else:
            new_lo = np.empty((0, n))
            new_hi = np.empty((0, n))
        after_filter = sum(len(k) for k in keep_lo) + new_lo.shape[0]

        # contractor
        child_width = float((new_hi - new_lo).max()) if new_lo.shape[0] else 0.0
        hs_on = False
        if new_lo.shape[0] and hs_possible:
            if cfg.hs_enable_round is not None and round_no >= cfg.hs_enable_round:
                hs_on = True
            if cfg.hs_enable_width is not None and child_width <= cfg.hs_enable_width:
                hs_on = True
        if hs_on:
            hs_tasks = [
                (new_lo[start:start + cfg.batch_size], new_hi[start:start + cfg.batch_size])
                for start in range(0, new_lo.shape[0], cfg.batch_size)
            ]
            hs_results = _run_chunks(
                lambda t: _hs_pass(s, jac, t[0], t[1], cfg.hs_contract),
                hs_tasks,
                cfg.worker_count,
            )
            new_lo = np.concatenate([r[0] for r in hs_results]) if hs_results else new_lo
            new_hi = np.concatenate([r[1] for r in hs_results]) if hs_results else new_hi
            new_cert = (
                np.concatenate([r[2] for r in hs_results])
                if hs_results
                else np.empty(0, dtype=bool)
            )
        else:
            new_cert = np.zeros(new_lo.shape[0], dtype=bool)

        lo = np.concatenate(keep_lo + [new_lo])
        hi = np.concatenate(keep_hi + [new_hi])
        cert = np.concatenate(keep_cert + [new_cert])
        unsplit = np.concatenate(keep_unsplit + [np.zeros(new_lo.shape[0], dtype=bool)])

        # canonical order + exact dedup keeps results scheduler-independent
        if lo.shape[0]:
            order = _batch.canonical_order(lo, hi)
            lo, hi, cert, unsplit = lo[order], hi[order], cert[order], unsplit[order]
            lo, hi, cert, unsplit = _batch.dedup_sorted(lo, hi, cert, unsplit)

        after_hs = lo.shape[0]
        width_now = float((hi - lo).max()) if after_hs else 0.0
        stats.append(RoundStats(
            round=round_no,
            boxes_in=boxes_in,
            boxes_after_filter=after_filter,
            boxes_after_hs=after_hs,
            width=width_now,
            elapsed_seconds=time.perf_counter() - t0,
        ))

        if after_hs == 0:
            status = NO_REAL_SOLUTION
            break
        if width_now <= target:
            status = WIDTH_REACHED
            break
        if after_hs > cfg.max_boxes:
            status = BUDGET_EXHAUSTED
            break
        if cfg.max_seconds is not None and time.perf_counter() - t_start > cfg.max_seconds:
            status = BUDGET_EXHAUSTED
            break
    else:
        status = BUDGET_EXHAUSTED

    return SolveResult(status, _to_rootboxes(lo, hi, cert, unsplit), tuple(stats))


def _to_rootboxes(lo, hi, cert, unsplit) -> tuple[RootBox, ...]:
    out = []
    for r in range(lo.shape[0]):
        out.append(RootBox(Box.from_bounds(lo[r], hi[r]), bool(cert[r]), bool(unsplit[r])))
    return tuple(out)
