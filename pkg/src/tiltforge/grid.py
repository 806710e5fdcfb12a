"""Integer-lattice geometry: cells, shapes, and structural predicates.

Cells are plain int tuples. The canonical cell order is lexicographic by
(y, x) in 2D and (z, y, x) in 3D, i.e. sorting by the reversed tuple;
every deterministic tie-break in the package derives from it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .bitgrid import BitGrid

Cell = tuple[int, ...]

# Fixed direction order: +x, -x, +y, -y, +z, -z. Doubles as the canonical
# orientation dispatch order for the scaler.
DIRECTIONS = {
    2: ((1, 0), (-1, 0), (0, 1), (0, -1)),
    3: ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)),
}


def canon_key(cell: Cell) -> Cell:
    """Sort key realizing (y, x) / (z, y, x) order."""
    return cell[::-1]


def neighbors(c: Cell, dim: int | None = None) -> list[Cell]:
    """The 4 (2D) or 6 (3D) face-adjacent cells; diagonals excluded."""
    d = dim if dim is not None else len(c)
    if d != len(c):
        raise ValueError(f"cell {c} does not have dimension {d}")
    if d == 2:
        x, y = c
        return [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)]
    if d == 3:
        x, y, z = c
        return [(x + 1, y, z), (x - 1, y, z), (x, y + 1, z),
                (x, y - 1, z), (x, y, z + 1), (x, y, z - 1)]
    raise ValueError(f"unsupported dimension {d}")


def is_connected(cells) -> bool:
    """True iff the face-adjacency graph on `cells` is connected.

    The empty set and singletons count as connected.
    """
    cells = set(cells)
    if len(cells) <= 1:
        return True
    start = next(iter(cells))
    seen = {start}
    stack = [start]
    while stack:
        c = stack.pop()
        for q in neighbors(c):
            if q in cells and q not in seen:
                seen.add(q)
                stack.append(q)
    return len(seen) == len(cells)


def bounding_box(cells) -> tuple[Cell, Cell]:
    it = iter(cells)
    first = next(it)
    lo = list(first)
    hi = list(first)
    for c in it:
        for a, x in enumerate(c):
            if x < lo[a]:
                lo[a] = x
            elif x > hi[a]:
                hi[a] = x
    return tuple(lo), tuple(hi)


@dataclass(frozen=True)
class Shape:
    """A finite set of occupied grid cells with a fixed dimension.

    Construction does not enforce connectivity (algorithms hold raw cell
    sets mid-flight); `validate()` checks the polyomino/polycube contract.
    """

    dim: int
    cells: frozenset[Cell]

    @classmethod
    def from_cells(cls, cells, dim: int | None = None) -> "Shape":
        cs = frozenset(tuple(c) for c in cells)
        if not cs:
            raise ValueError("a shape needs at least one cell")
        d = dim if dim is not None else len(next(iter(cs)))
        if d not in (2, 3):
            raise ValueError(f"unsupported dimension {d}")
        for c in cs:
            if len(c) != d:
                raise ValueError(f"cell {c} does not have dimension {d}")
        return cls(d, cs)

    def validate(self) -> "Shape":
        if not is_connected(self.cells):
            raise ValueError("shape is not connected")
        lo, hi = self.bbox
        limit = 1 << 31
        if any(abs(v) >= limit for v in lo + hi):
            raise ValueError("coordinates exceed signed 32-bit range")
        return self

    @property
    def n(self) -> int:
        return len(self.cells)

    @cached_property
    def bbox(self) -> tuple[Cell, Cell]:
        return bounding_box(self.cells)

    @cached_property
    def sorted_cells(self) -> tuple[Cell, ...]:
        return tuple(sorted(self.cells, key=canon_key))

    def normalized(self) -> "Shape":
        """Translate so the bounding-box corner sits at the origin."""
        lo, _ = self.bbox
        if all(v == 0 for v in lo):
            return self
        return Shape(self.dim, frozenset(
            tuple(x - a for x, a in zip(c, lo)) for c in self.cells))

    def translated(self, offset: Cell) -> "Shape":
        return Shape(self.dim, frozenset(
            tuple(x + o for x, o in zip(c, offset)) for c in self.cells))

    def __contains__(self, c: Cell) -> bool:
        return c in self.cells

    def __iter__(self):
        return iter(self.sorted_cells)


def degree(cells, c: Cell) -> int:
    return sum(1 for q in neighbors(c) if q in cells)


def is_tree(s: Shape) -> bool:
    """True iff the adjacency graph has exactly n - 1 edges (no cycles)."""
    cells = s.cells
    edges = 0
    for c in cells:
        for q in neighbors(c):
            if q in cells:
                edges += 1
    return edges // 2 == len(cells) - 1


def _edge_pair_pinched(cells, c: Cell, off: Cell) -> bool:
    # Pair at an in-plane diagonal: pinched iff both bridge cells are free.
    d = len(c)
    axes = [a for a in range(d) if off[a] != 0]
    b1 = list(c)
    b1[axes[0]] += off[axes[0]]
    b2 = list(c)
    b2[axes[1]] += off[axes[1]]
    return tuple(b1) not in cells and tuple(b2) not in cells


def _corner_pair_pinched(cells, c: Cell, off: Cell) -> bool:
    # 3D space diagonal: pinched iff the two tiles are not connected through
    # occupied cells of their 6-cell shared Chebyshev region.
    mids = []
    for picks in ((0,), (1,), (2,), (0, 1), (0, 2), (1, 2)):
        q = list(c)
        for a in picks:
            q[a] += off[a]
        q = tuple(q)
        if q in cells:
            mids.append(q)
    if not mids:
        return True
    other = tuple(x + o for x, o in zip(c, off))
    # BFS from c to other within {c, other} + occupied mids.
    allowed = set(mids) | {c, other}
    seen = {c}
    stack = [c]
    while stack:
        p = stack.pop()
        if p == other:
            return False
        for q in neighbors(p):
            if q in allowed and q not in seen:
                seen.add(q)
                stack.append(q)
    return True


_DIAG_2D = ((1, 1), (1, -1))
_EDGE_3D = ((1, 1, 0), (1, -1, 0), (1, 0, 1), (1, 0, -1), (0, 1, 1), (0, 1, -1))
_CORNER_3D = ((1, 1, 1), (1, 1, -1), (1, -1, 1), (1, -1, -1))


def is_degenerate(s: Shape) -> bool:
    """True iff two tiles touch at a corner (or 3D edge) with no bridge.

    Such a pinch blocks tile motion through the contact no matter the
    scale factor, so the scaler rejects degenerate inputs.
    """
    cells = s.cells
    if s.dim == 2:
        for c in cells:
            for off in _DIAG_2D:
                o = (c[0] + off[0], c[1] + off[1])
                if o in cells and _edge_pair_pinched(cells, c, off):
                    return True
        return False
    for c in cells:
        for off in _EDGE_3D:
            o = tuple(x + d for x, d in zip(c, off))
            if o in cells and _edge_pair_pinched(cells, c, off):
                return True
        for off in _CORNER_3D:
            o = tuple(x + d for x, d in zip(c, off))
            if o in cells and _corner_pair_pinched(cells, c, off):
                return True
    return False


def scale(s: Shape, c: int) -> Shape:
    """Replace every tile by a c x c (x c) block."""
    if c < 1:
        raise ValueError("scale factor must be at least 1")
    d = s.dim
    out = set()
    if d == 2:
        for (x, y) in s.cells:
            bx, by = x * c, y * c
            for i in range(c):
                for j in range(c):
                    out.add((bx + i, by + j))
    else:
        for (x, y, z) in s.cells:
            bx, by, bz = x * c, y * c, z * c
            for i in range(c):
                for j in range(c):
                    for k in range(c):
                        out.add((bx + i, by + j, bz + k))
    return Shape(d, frozenset(out))


@dataclass(frozen=True)
class SlabDecomposition:
    """Partition into slabs (maximal connected runs within one slice).

    `contacts[i]` lists the slab indices adjacent to slab i; two slabs are
    in contact iff their union is connected, which for slabs in adjacent
    slices means some face-adjacent cell pair spans them.
    """

    axis: int
    slabs: tuple[frozenset[Cell], ...]
    contacts: tuple[tuple[int, ...], ...]

    @property
    def count(self) -> int:
        return len(self.slabs)

    def degree(self, i: int) -> int:
        return len(self.contacts[i])

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for i, adj in enumerate(self.contacts):
            for j in adj:
                if i < j:
                    out.append((i, j))
        return out


def slab_decompose(s: Shape, axis: int | None = None) -> SlabDecomposition:
    """Split into slabs along `axis` (default: y in 2D, z in 3D)."""
    ax = axis if axis is not None else s.dim - 1
    slices: dict[int, set[Cell]] = {}
    for c in s.cells:
        slices.setdefault(c[ax], set()).add(c)

    slabs: list[frozenset[Cell]] = []
    slab_of: dict[Cell, int] = {}
    for coord in sorted(slices):
        remaining = set(slices[coord])
        while remaining:
            start = min(remaining, key=canon_key)
            comp = {start}
            stack = [start]
            remaining.discard(start)
            while stack:
                p = stack.pop()
                for q in neighbors(p):
                    if q in remaining and q[ax] == coord:
                        remaining.discard(q)
                        comp.add(q)
                        stack.append(q)
            slabs.append(frozenset(comp))
    slabs.sort(key=lambda f: canon_key(min(f, key=canon_key)))
    for i, slab in enumerate(slabs):
        for c in slab:
            slab_of[c] = i

    adj: list[set[int]] = [set() for _ in slabs]
    for c in s.cells:
        i = slab_of[c]
        for q in neighbors(c):
            j = slab_of.get(q)
            if j is not None and j != i:
                adj[i].add(j)
    return SlabDecomposition(
        ax, tuple(slabs), tuple(tuple(sorted(a)) for a in adj))


def count_holes(s: Shape) -> int:
    """Bounded components of the complement inside the inflated box.

    Zero iff the shape is simple (the complement grid graph is connected).
    """
    lo, hi = s.bbox
    grid = BitGrid(tuple(a - 1 for a in lo), tuple(b + 1 for b in hi))
    occ = grid.mask(s.cells)
    free = grid.full & ~occ
    outside = grid.flood(grid.boundary & free, free)
    pockets = free & ~outside
    return len(grid.components(pockets))
