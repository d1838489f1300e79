"""rootbox: verified real-root isolation for square polynomial systems.

Builds on outward-rounded interval arithmetic, branch-and-bound box
subdivision, and the Hansen-Sengupta contractor; terminal micro-boxes are
merged back up the bisection tree into readable isolated root boxes.
"""

__version__ = "0.1.0"

from .interval import ExtendedDivResult, Interval, div_extended
from .poly import Box, Polynomial, PolySystem, parse_system, print_system
from .bnb import RootBox, SolveResult, SolverConfig, solve
from .hansen import ContractionOutcome, contract, krawczyk
from .backtrack import GridContext, merge_to_width, parent_box, snap_to_grid

__all__ = [
    "__version__",
    "Interval",
    "ExtendedDivResult",
    "div_extended",
    "Box",
    "Polynomial",
    "PolySystem",
    "parse_system",
    "print_system",
    "SolverConfig",
    "SolveResult",
    "RootBox",
    "solve",
    "ContractionOutcome",
    "contract",
    "krawczyk",
    "GridContext",
    "parent_box",
    "snap_to_grid",
    "merge_to_width",
]
