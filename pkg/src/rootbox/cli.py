"""Command-line frontend.

Subcommands:

* ``solve PATH``  - isolate the real roots of one system file and report
  round statistics, merged root boxes, and timings (text, json, or csv).
* ``bench``       - run the embedded corpus and print a summary table;
  systems that exhaust their budget get a blank root count.
* ``check PATH``  - parse and describe a system file.

Exit codes: 0 success (roots isolated or emptiness proven), 1 input error,
2 budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass

from . import __version__, corpus
from .backtrack import GridContext, MergeResult, merge_to_width, snap_to_grid
from .bnb import (
    BUDGET_EXHAUSTED,
    NO_REAL_SOLUTION,
    WIDTH_REACHED,
    RootBox,
    SolveResult,
    SolverConfig,
    solve,
)
from .poly import DimensionMismatch, PolySystem, SystemSyntaxError, parse_system

__all__ = ["main", "RunReport", "cmd_solve", "cmd_bench", "cmd_check"]

SCHEMA_VERSION = 1


@dataclass
class RunReport:
    """Everything one solve run produced, in serializable form."""

    system: str
    config: dict
    status: str
    result: SolveResult
    roots: tuple[RootBox, ...]
    merge_levels: tuple[tuple[float, int], ...]
    wall_seconds: float

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "solver_version": __version__,
            "system": self.system,
            "config": self.config,
            "status": self.status,
            "rounds": [
                {
                    "round": st.round,
                    "boxes_in": st.boxes_in,
                    "boxes_after_filter": st.boxes_after_filter,
                    "boxes_after_hs": st.boxes_after_hs,
                    "width": st.width,
                    "elapsed_seconds": st.elapsed_seconds,
                }
                for st in self.result.stats
            ],
            "roots": [
                {
                    "intervals": [[iv.lo, iv.hi] for iv in rb.box],
                    "certified": rb.certified,
                }
                for rb in self.roots
            ],
            "merge_levels": [
                {"width": w, "count": c} for w, c in self.merge_levels
            ],
            "wall_seconds": self.wall_seconds,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)

    def to_csv(self, var_names) -> str:
        header = []
        for nm in var_names:
            header += [f"{nm}_lo", f"{nm}_hi"]
        header.append("certified")
        lines = [",".join(header)]
        for rb in self.roots:
            row = []
            for iv in rb.box:
                row += [repr(iv.lo), repr(iv.hi)]
            row.append("true" if rb.certified else "false")
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"

    def to_text(self, var_names, show_stats: bool) -> str:
        out = [f"system: {self.system}"]
        out.append(f"status: {self.status}")
        if show_stats and self.result.stats:
            out.append("round      boxes_in  after_filter      after_hs         width   time(s)")
            for st in self.result.stats:
                out.append(
                    f"{st.round:5d}  {st.boxes_in:12d}  {st.boxes_after_filter:12d}"
                    f"  {st.boxes_after_hs:12d}  {st.width:12.6g}  {st.elapsed_seconds:8.3f}"
                )
        if self.merge_levels:
            out.append("merge levels (width -> boxes): " + "  ".join(
                f"{w:.6g} -> {c}" for w, c in self.merge_levels
            ))
        out.append(f"root boxes: {len(self.roots)}")
        for rb in self.roots:
            mark = " [certified]" if rb.certified else ""
            out.append("  " + "  ".join(
                f"{nm} in {iv}" for nm, iv in zip(var_names, rb.box)
            ) + mark)
        out.append(f"wall seconds: {self.wall_seconds:.3f}")
        return "\n".join(out) + "\n"


def _load_system(path: str) -> PolySystem:
    if os.path.exists(path):
        with open(path, encoding="utf-8") as f:
            text = f.read()
        name = os.path.splitext(os.path.basename(path))[0]
        return parse_system(text, name=name)
    base = os.path.splitext(os.path.basename(path))[0]
    if base in corpus.names() and not os.path.dirname(path):
        print(f"note: using embedded corpus system {base!r}", file=sys.stderr)
        return corpus.load(base)
    raise FileNotFoundError(f"no such file: {path}")


def _config_from_args(args, threads_default: int | None = None) -> SolverConfig:
    hs_round = None if args.no_hs else args.hs_round
    hs_width = None if args.no_hs else args.hs_width
    return SolverConfig(
        target_width=args.width,
        hs_enable_round=hs_round,
        hs_enable_width=hs_width,
        max_rounds=args.max_rounds,
        max_boxes=int(args.max_boxes),
        max_seconds=getattr(args, "max_seconds", None),
        worker_count=args.threads or threads_default or 1,
        batch_size=args.batch_size,
        hs_contract=not args.no_hs_contract,
        engine=args.engine,
    )


def _config_echo(cfg: SolverConfig, merge: bool) -> dict:
    return {
        "target_width": cfg.target_width,
        "hs_enable_round": cfg.hs_enable_round,
        "hs_enable_width": cfg.hs_enable_width,
        "max_rounds": cfg.max_rounds,
        "max_boxes": cfg.max_boxes,
        "max_seconds": cfg.max_seconds,
        "worker_count": cfg.worker_count,
        "batch_size": cfg.batch_size,
        "hs_contract": cfg.hs_contract,
        "engine": cfg.engine,
        "backtrack": merge,
    }


def run_pipeline(s: PolySystem, cfg: SolverConfig, merge: bool = True,
                 merge_width: float | None = None) -> RunReport:
    """solve + grid normalization + backtracking merge, as one report."""
    t0 = time.perf_counter()
    result = solve(s, cfg)
    grid = GridContext.from_box(s.initial_box)
    roots: tuple[RootBox, ...]
    levels: tuple[tuple[float, int], ...]
    if result.status == BUDGET_EXHAUSTED or not merge:
        roots = result.boxes
        levels = ()
    elif not result.boxes:
        roots = ()
        levels = ()
    else:
        snapped = [snap_to_grid(rb.box, grid) for rb in result.boxes]
        flags = [rb.certified for rb in result.boxes]
        merged: MergeResult = merge_to_width(
            snapped, grid, stop_width=merge_width, certified=flags
        )
        roots = tuple(
            RootBox(b, c) for b, c in zip(merged.boxes, merged.certified)
        )
        levels = merged.levels
    wall = time.perf_counter() - t0
    return RunReport(
        system=s.name or "?",
        config=_config_echo(cfg, merge),
        status=result.status,
        result=result,
        roots=roots,
        merge_levels=levels,
        wall_seconds=wall,
    )


def _emit(report: RunReport, s: PolySystem, args) -> None:
    if args.format == "json":
        print(report.to_json())
    elif args.format == "csv":
        sys.stdout.write(report.to_csv(s.var_names))
    else:
        sys.stdout.write(report.to_text(s.var_names, show_stats=args.stats))


def cmd_solve(args) -> int:
    try:
        s = _load_system(args.path)
    except (OSError, SystemSyntaxError, DimensionMismatch, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    cfg = _config_from_args(args, threads_default=os.cpu_count())
    try:
        cfg.validate()
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    report = run_pipeline(
        s, cfg, merge=not args.no_backtrack, merge_width=args.merge_width
    )
    _emit(report, s, args)
    return 2 if report.status == BUDGET_EXHAUSTED else 0


def cmd_check(args) -> int:
    try:
        s = _load_system(args.path)
    except (OSError, SystemSyntaxError, DimensionMismatch, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    jac = s.jacobian()
    nz = sum(1 for row in jac for p in row if not p.is_zero)
    n = s.dimension
    print(f"system: {s.name or args.path}")
    print(f"dimension: {n}")
    print(f"variables: {' '.join(s.var_names)}")
    print("degrees: " + " ".join(str(p.degree) for p in s.polynomials))
    print(f"initial box: {s.initial_box}")
    print(f"jacobian nonzeros: {nz}/{n * n}")
    return 0


def cmd_bench(args) -> int:
    rows = []
    wanted = []
    for e in corpus.manifest()["systems"]:
        if args.filter and args.filter not in e["name"]:
            continue
        if args.max_dim is not None and e["dimension"] > args.max_dim:
            continue
        wanted.append(e)
    wanted.sort(key=lambda e: (e["dimension"], e["name"]))
    header = f"{'name':<12}{'dim':>4}  {'interval':<12}{'rounds':>7}{'roots':>7}{'time(s)':>10}"
    print(header)
    print("-" * len(header))
    worst = 0
    for e in wanted:
        s = corpus.load(e["name"])
        cfg = _config_from_args(args, threads_default=os.cpu_count())
        report = run_pipeline(s, cfg, merge=True, merge_width=args.merge_width)
        rounds = len(report.result.stats)
        if report.status == BUDGET_EXHAUSTED:
            roots = ""
            worst = max(worst, 2)
        else:
            roots = str(len(report.roots))
        lo, hi = e["initial"]
        interval = f"[{lo} {hi}]"
        print(f"{e['name']:<12}{e['dimension']:>4}  {interval:<12}{rounds:>7}"
              f"{roots:>7}{report.wall_seconds:>10.3f}")
        rows.append((e["name"], report))
    return 0 if rows or not args.filter else 0


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--width", type=float, default=None,
                   help="target box width (default: initial width / 1024)")
    p.add_argument("--hs-round", type=int, default=None,
                   help="run the contractor from this round on (0 = always)")
    p.add_argument("--hs-width", type=float, default=1.0,
                   help="run the contractor once boxes are at most this wide")
    p.add_argument("--no-hs", action="store_true", help="disable the contractor")
    p.add_argument("--no-hs-contract", action="store_true",
                   help="use the contractor only to discard and certify boxes, "
                        "never to shrink them")
    p.add_argument("--max-rounds", type=int, default=24)
    p.add_argument("--max-boxes", type=float, default=2e8)
    p.add_argument("--threads", type=int, default=None,
                   help="worker count (default: available parallelism)")
    p.add_argument("--batch-size", type=int, default=4096,
                   help="boxes per dispatched work unit")
    p.add_argument("--engine", choices=("batch", "scalar"), default="batch")
    p.add_argument("--no-backtrack", action="store_true",
                   help="report raw terminal boxes without merging")
    p.add_argument("--merge-width", type=float, default=None,
                   help="stop merging at this width instead of at the plateau")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--stats", action="store_true", help="print per-round statistics")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="rootbox",
        description="Isolate all real roots of a square polynomial system "
                    "inside a box, with guaranteed interval arithmetic.",
    )
    ap.add_argument("--version", action="version", version=f"rootbox {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve one system file")
    p_solve.add_argument("path")
    _add_solver_flags(p_solve)
    p_solve.set_defaults(fn=cmd_solve)

    p_bench = sub.add_parser("bench", help="run the embedded benchmark corpus")
    p_bench.add_argument("--filter", default=None, help="substring filter on names")
    p_bench.add_argument("--max-dim", type=int, default=None)
    p_bench.add_argument("--max-seconds", type=float, default=60.0,
                         help="per-system wall budget")
    _add_solver_flags(p_bench)
    p_bench.set_defaults(fn=cmd_bench)

    p_check = sub.add_parser("check", help="parse and describe a system file")
    p_check.add_argument("path")
    p_check.set_defaults(fn=cmd_check)

    args = ap.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
