"""Greedy MaxSTAP approximation: fill accessible positions, keep all
boundary tiles.

A position is accessible if a tile can reach it from outside without ever
being face-adjacent to the shape before arrival; a boundary tile is one
accessible with respect to the shape minus itself. The greedy result
always contains every boundary tile, which carries the approximation
bound (the bound's constant is not asserted, the mechanism is).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bitgrid import BitGrid
from .grid import Cell, Shape, canon_key
from .motion import Board, Plan, Workspace, verify_plan


@dataclass(frozen=True)
class AccessibilityMap:
    accessible: frozenset[Cell]
    boundary_tiles: frozenset[Cell]


def _escape_analysis(g: BitGrid, occ: int, reach0: int, pockets: list[int],
                     tbit: int) -> bool:
    """Can tile t escape from occ (computed against occ minus t)?

    reach0/pockets are shared per-shape structures for transit(occ); the
    only cells whose transit status changes when t lifts are t's own
    face-neighbors, which may bridge pockets to the outside.
    """
    if g.dilate(reach0) & tbit:
        return True
    occ_rest = occ & ~tbit
    # candidate first hops: free neighbors of t with no other occupied nbr
    hops = []
    m = g.dilate(tbit) & ~occ
    while m:
        low = m & -m
        m ^= low
        if not (g.dilate(low) & occ_rest):
            hops.append(low)
    if not hops:
        return False
    # propagate reachability through pockets bridged by the hops
    hop_out = [bool(g.dilate(h) & reach0) for h in hops]
    hop_pockets = [[i for i, p in enumerate(pockets) if g.dilate(h) & p]
                   for h in hops]
    pocket_reachable = [False] * len(pockets)
    changed = True
    while changed:
        changed = False
        for k, h in enumerate(hops):
            if hop_out[k]:
                continue
            if any(pocket_reachable[i] for i in hop_pockets[k]):
                hop_out[k] = True
                changed = True
        for k, h in enumerate(hops):
            if hop_out[k]:
                for i in hop_pockets[k]:
                    if not pocket_reachable[i]:
                        pocket_reachable[i] = True
                        changed = True
    return any(hop_out)


def accessibility_map(s: Shape) -> AccessibilityMap:
    """One configuration-space BFS plus per-tile local bridge analysis."""
    s.validate()
    ws = Workspace.for_cells(s.cells)
    board = Board(ws)
    g = board.grid
    occ = board.mask(s.cells)
    free = g.full & ~occ
    transit = free & ~g.dilate(occ)
    reach0 = g.flood(g.boundary & transit, transit)
    pockets = g.components(transit & ~reach0)

    accessible = free & (reach0 | g.dilate(reach0))
    boundary = 0
    m = occ
    while m:
        low = m & -m
        m ^= low
        if s.n == 1 or _escape_analysis(g, occ, reach0, pockets, low):
            boundary |= low
    return AccessibilityMap(
        frozenset(g.cells(accessible)), frozenset(g.cells(boundary)))


def boundary_tiles(s: Shape) -> frozenset[Cell]:
    """Tiles accessible with respect to the shape minus themselves."""
    return accessibility_map(s).boundary_tiles


def _greedy_order(board: Board, g: BitGrid, smask: int, seed_bit: int) -> list[int]:
    order = [seed_bit]
    cur = seed_bit
    while True:
        transit = board.transit_mask(cur)
        reach = g.flood(g.boundary & transit, transit)
        cand = smask & ~cur & g.dilate(cur) & g.dilate(reach)
        if not cand:
            return order
        low = cand & -cand
        order.append(low)
        cur |= low


def greedy_max_stap(s: Shape, want_plan: bool = True,
                    _boundary: frozenset[Cell] | None = None) -> tuple[Shape, Plan | None]:
    """Greedy fill from the canonically least boundary tile.

    Repeatedly places a tile at the canonically least free target cell
    adjacent to the assembly that a legal construction step can reach;
    stops when none remains. The result contains every boundary tile.
    `want_plan=False` skips witness-plan extraction (bulk corpus sweeps).
    """
    s.validate()
    btiles = _boundary if _boundary is not None else boundary_tiles(s)
    if not btiles:
        # n == 1 is handled by boundary_tiles; an enclosed single region
        # cannot happen for a connected shape's own cells
        raise AssertionError("connected shape with no boundary tile")
    seed = min(btiles, key=canon_key)
    ws = Workspace.for_cells(s.cells)
    board = Board(ws)
    g = board.grid
    order = _greedy_order(board, g, board.mask(s.cells), g.bit(seed))

    cells = frozenset(g.cells(sum(order)))
    sub = Shape(s.dim, cells)
    if not want_plan:
        return sub, None
    sub_ws = Workspace.for_cells(cells)
    sub_board = Board(sub_ws)
    occ = 0
    steps = []
    for bit in order:
        c = g.least_cell(bit)
        if not occ:
            occ = sub_board.grid.bit(c)
            continue
        step = sub_board.construction_step(occ, c)
        if step is None:
            raise AssertionError(f"greedy placement lost its step at {c}")
        steps.append(step)
        occ |= sub_board.grid.bit(c)
    plan = Plan(sub, tuple(steps), "build")
    v = verify_plan(plan)
    if not v.ok:
        raise AssertionError(f"greedy plan failed verification: {v}")
    return sub, plan


@dataclass(frozen=True)
class ApproximationReport:
    n: int
    dim: int
    greedy_size: int
    boundary_count: int
    bound_witness: int
    exact_size: int | None = None

    @property
    def ratio(self) -> float | None:
        if self.exact_size is None:
            return None
        return self.greedy_size / self.exact_size


def _floor_pow(n: int, num: int, den: int) -> int:
    """floor(n ** (num/den)) with exact integer arithmetic."""
    if n <= 0:
        return 0
    x = int(round(n ** (num / den)))
    while (x + 1) ** den <= n ** num:
        x += 1
    while x ** den > n ** num:
        x -= 1
    return x


def approximation_report(s: Shape, exact_cap: int = 12) -> ApproximationReport:
    """Measure greedy size, boundary count, and the surface bound witness.

    The exact optimum is included only when n fits the exact solver cap.
    """
    from .exact import SearchConfig, max_stap_exact

    sub, _plan = greedy_max_stap(s)
    btiles = boundary_tiles(s)
    exact = None
    if s.n <= exact_cap:
        exact, _ = max_stap_exact(s, SearchConfig(max_cells=exact_cap))
    if s.dim == 2:
        witness = _floor_pow(s.n, 1, 2)
    else:
        witness = _floor_pow(s.n, 2, 3)
    return ApproximationReport(
        n=s.n, dim=s.dim, greedy_size=sub.n, boundary_count=len(btiles),
        bound_witness=witness, exact_size=exact)
