"""Reduction gadgets: k-walls, variable/conjunction gadgets, and the
compiler from planar monotone 3-CNF formulas to polycubes.

Wall teeth for the standalone `make_wall` op sit on the interior lattice
(odd coordinates strictly inside the face), matching the documented cell
counts. The compiler's internal walls use full checkerboard teeth instead:
after every non-support cell of a checkerboard wall is removed, each hole
still has an occupied in-plane neighbor, so single tiles can never slip
through — that stronger property is what keeps sealed chambers sealed.

The "deconstructible from its solid layers" scenario is modelled as a
region predicate: everything strictly beyond the wall volume on the access
side, plus the wall volume itself restricted to the tooth lattice hull.
That emulates the paper's idealization of a wall partitioning the
workspace (a bare finite wall would otherwise be flanked around its rim).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .grid import Cell, Shape, canon_key, is_connected, neighbors
from .motion import Board, Plan, Step, Workspace, delta_letter, verify_plan

FACE_ORDER = ("+z", "-z", "+x", "-x", "+y", "-y")


def make_wall(k: int, width: int, height: int) -> Shape:
    """Solid width x height layer plus tooth layers on k faces.

    Teeth occupy the interior lattice (odd coordinates) of each face; the
    face order is +z, -z, +x, -x, +y, -y.
    """
    if not 1 <= k <= 6:
        raise ValueError("k must be between 1 and 6")
    if width % 2 == 0 or height % 2 == 0 or width < 5 or height < 5:
        raise ValueError("wall dimensions must be odd and at least 5")
    cells = {(x, y, 0) for x in range(width) for y in range(height)}
    odd_x = range(1, width - 1, 2)
    odd_y = range(1, height - 1, 2)
    for face in FACE_ORDER[:k]:
        if face == "+z":
            cells.update((x, y, 1) for x in odd_x for y in odd_y)
        elif face == "-z":
            cells.update((x, y, -1) for x in odd_x for y in odd_y)
        elif face == "+x":
            cells.update((width, y, 0) for y in odd_y)
        elif face == "-x":
            cells.update((-1, y, 0) for y in odd_y)
        elif face == "+y":
            cells.update((x, height, 0) for x in odd_x)
        else:
            cells.update((x, -1, 0) for x in odd_x)
    return Shape.from_cells(cells).validate()


def wall_teeth(wall: Shape) -> list[Cell]:
    """Tooth cells (degree-1 tiles) in canonical order."""
    return [c for c in sorted(wall.cells, key=canon_key)
            if sum(1 for q in neighbors(c) if q in wall.cells) == 1]


def remove_tooth(wall: Shape, index: int) -> Shape:
    """Remove the index-th tooth (canonical order); stays connected."""
    teeth = wall_teeth(wall)
    if not 0 <= index < len(teeth):
        raise ValueError(f"tooth index {index} out of range 0..{len(teeth) - 1}")
    out = Shape(wall.dim, wall.cells - {teeth[index]})
    return out.validate()


def wall_access_region(wall: Shape) -> Callable[[Cell], bool]:
    """Predicate for "deconstructible from its solid layers" searches.

    Emulates the paper's idealization of a wall that partitions the
    workspace: tiles roam freely strictly below the wall volume and may
    maneuver within the wall's own footprint, but at tooth planes the
    cells that would be face-adjacent to a tooth of the infinite lattice
    extension are off limits (they stand in for the teeth the finite wall
    is missing beyond its rim). Crossing to the far side is impossible.

    Only walls with teeth on the z faces (k <= 2) are supported.
    """
    if any(c[2] not in (-1, 0, 1) for c in wall.cells):
        raise ValueError("access region supports +z/-z tooth layers only")
    solid = [c for c in wall.cells if c[2] == 0]
    if any(c[2] == 0 and sum(1 for q in neighbors(c) if q in wall.cells) == 1
           for c in wall.cells):
        raise ValueError("access region supports +z/-z tooth layers only")
    xs = sorted(c[0] for c in solid)
    ys = sorted(c[1] for c in solid)
    x0, x1 = xs[0], xs[-1]
    y0, y1 = ys[0], ys[-1]
    z_top = max(c[2] for c in wall.cells)
    z_bot = min(c[2] for c in wall.cells)

    def phantom_adjacent(x: int, y: int) -> bool:
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            px, py = x + dx, y + dy
            if (px - x0) % 2 == 1 and (py - y0) % 2 == 1:
                real = x0 + 1 <= px <= x1 - 1 and y0 + 1 <= py <= y1 - 1
                if not real:
                    return True
        return False

    def region(c: Cell) -> bool:
        x, y, z = c
        if z < z_bot:
            return True
        if z > z_top:
            return False
        if not (x0 <= x <= x1 and y0 <= y <= y1):
            return False
        if z == 0:
            return True
        return not phantom_adjacent(x, y)

    return region
