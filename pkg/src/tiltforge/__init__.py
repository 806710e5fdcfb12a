"""Single-step tilt assembly toolkit.

Decide and witness constructibility of polyominoes/polycubes, approximate
maximum constructible subshapes, build scaled copies, and compile planar
monotone 3-CNF formulas into reduction polycubes, with every emitted plan
machine-verified against the motion semantics.
"""

from .grid import (
    Cell,
    Shape,
    SlabDecomposition,
    canon_key,
    count_holes,
    is_connected,
    is_degenerate,
    is_tree,
    neighbors,
    scale,
    slab_decompose,
)
from .motion import (
    Plan,
    Step,
    Verdict,
    Workspace,
    find_construction_step,
    find_deconstruction_step,
    is_removable,
    reverse_plan,
    verify_plan,
)

__all__ = [
    "Cell", "Shape", "SlabDecomposition", "canon_key", "count_holes",
    "is_connected", "is_degenerate", "is_tree", "neighbors", "scale",
    "slab_decompose",
    "Plan", "Step", "Verdict", "Workspace", "find_construction_step",
    "find_deconstruction_step", "is_removable", "reverse_plan", "verify_plan",
]

__version__ = "0.1.0"
