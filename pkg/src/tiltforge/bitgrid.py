"""Bit-packed boolean masks over a bounded box of Z^2 or Z^3.

A mask is a plain Python int. Bit i corresponds to the cell decoded in
x-fastest order (then y, then z), so ascending bit index equals the
canonical (y, x) / (z, y, x) ordering used for tie-breaking everywhere
else in the package. Shifting big ints is the workhorse: dilation and
flood fill cost a handful of word-parallel operations per step.
"""

from __future__ import annotations

Cell = tuple[int, ...]


class BitGrid:
    """Fixed bounding box (inclusive corners) with mask arithmetic."""

    __slots__ = (
        "lo", "hi", "dim", "extent", "stride", "nbits", "full",
        "_not_min", "_not_max", "interior", "boundary",
    )

    def __init__(self, lo: Cell, hi: Cell):
        if len(lo) != len(hi):
            raise ValueError("corner dimensions differ")
        if any(a > b for a, b in zip(lo, hi)):
            raise ValueError("empty box")
        self.lo = tuple(lo)
        self.hi = tuple(hi)
        self.dim = len(lo)
        self.extent = tuple(b - a + 1 for a, b in zip(lo, hi))
        stride = []
        acc = 1
        for e in self.extent:
            stride.append(acc)
            acc *= e
        self.stride = tuple(stride)
        self.nbits = acc
        self.full = (1 << acc) - 1

        # mask_coord_eq(axis, k) built arithmetically: a run of `stride`
        # bits repeated every `stride * extent` bits.
        not_min = []
        not_max = []
        for a in range(self.dim):
            s = self.stride[a]
            e = self.extent[a]
            super_s = s * e
            rep = (self.full) // ((1 << super_s) - 1)  # 1 bit every super_s
            run = (1 << s) - 1
            lo_slab = rep * run
            hi_slab = rep * (run << ((e - 1) * s))
            not_min.append(self.full ^ lo_slab)
            not_max.append(self.full ^ hi_slab)
        self._not_min = tuple(not_min)
        self._not_max = tuple(not_max)

        inner = self.full
        for a in range(self.dim):
            inner &= self._not_min[a] & self._not_max[a]
        self.interior = inner
        self.boundary = self.full ^ inner

    # -- cell <-> bit ------------------------------------------------

    def contains(self, c: Cell) -> bool:
        return all(a <= x <= b for x, a, b in zip(c, self.lo, self.hi))

    def index(self, c: Cell) -> int:
        idx = 0
        for x, a, s in zip(c, self.lo, self.stride):
            idx += (x - a) * s
        return idx

    def bit(self, c: Cell) -> int:
        return 1 << self.index(c)

    def cell(self, idx: int) -> Cell:
        coords = []
        for a in range(self.dim):
            coords.append(self.lo[a] + (idx // self.stride[a]) % self.extent[a])
        return tuple(coords)

    def mask(self, cells) -> int:
        m = 0
        for c in cells:
            m |= 1 << self.index(c)
        return m

    def cells(self, m: int) -> list[Cell]:
        """Set cells in ascending bit order (canonical order)."""
        out = []
        while m:
            low = m & -m
            out.append(self.cell(low.bit_length() - 1))
            m ^= low
        return out

    def least_cell(self, m: int) -> Cell:
        if not m:
            raise ValueError("empty mask")
        return self.cell((m & -m).bit_length() - 1)

    # -- mask arithmetic ----------------------------------------------

    def shift(self, m: int, axis: int, sign: int) -> int:
        s = self.stride[axis]
        if sign > 0:
            return (m & self._not_max[axis]) << s
        return (m & self._not_min[axis]) >> s

    def dilate(self, m: int) -> int:
        """m plus its face neighbors (within the box)."""
        out = m
        for a in range(self.dim):
            s = self.stride[a]
            out |= (m & self._not_max[a]) << s
            out |= (m & self._not_min[a]) >> s
        return out

    def neighbors_mask(self, m: int) -> int:
        return self.dilate(m) & ~m

    def flood(self, seed: int, region: int) -> int:
        m = seed & region
        if not m:
            return 0
        while True:
            grown = (m | self.dilate(m)) & region
            if grown == m:
                return m
            m = grown

    def flood_levels(self, seed: int, region: int) -> list[int]:
        """BFS level masks; levels[0] = seed & region, disjoint levels."""
        cur = seed & region
        seen = cur
        levels = [cur]
        while True:
            nxt = self.dilate(cur) & region & ~seen
            if not nxt:
                return levels
            levels.append(nxt)
            seen |= nxt
            cur = nxt

    def is_connected_mask(self, m: int) -> bool:
        if not m:
            return True
        return self.flood(m & -m, m) == m

    def components(self, m: int) -> list[int]:
        out = []
        while m:
            comp = self.flood(m & -m, m)
            out.append(comp)
            m &= ~comp
        return out
