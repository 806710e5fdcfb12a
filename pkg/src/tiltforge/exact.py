"""Ground-truth decision and optimization by exhaustive search.

Search runs over deconstruction orders (constructible iff deconstructible,
with the build plan recovered by reversing the witness). States are
occupancy bitmasks; a transposition table holds masks proven dead.

One admissible reduction keeps the search tractable: if any *leaf* tile is
removable, it is always safe to remove the canonically least such leaf
first. A removable leaf stays a removable leaf under any other removals
(escape space only grows, its degree only drops), so every deconstruction
order can be rearranged to front it — including orders that kept it as the
seed. Non-leaf choices still branch fully.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .grid import Cell, Shape, canon_key, is_degenerate, is_tree, neighbors
from .motion import (Board, Plan, Step, Workspace, articulation_analysis,
                     verify_plan)


@dataclass(frozen=True)
class SearchConfig:
    max_cells: int = 24
    timeout: float | None = None
    allowed_region: Callable[[Cell], bool] | None = None
    memo_limit: int = 4_000_000


@dataclass(frozen=True)
class SolveResult:
    status: str  # constructible | not_constructible | resource_exceeded
    plan: Plan | None = None
    expansions: int = 0
    backtracks: int = 0

    def __bool__(self) -> bool:
        return self.status in ("constructible", "deconstructible")


class _ResourceExceeded(Exception):
    pass


class _Searcher:
    def __init__(self, board: Board, cfg: SearchConfig, reverse_order: bool):
        self.board = board
        self.grid = board.grid
        self.cfg = cfg
        self.dead: set[int] = set()
        self.deadline = (time.monotonic() + cfg.timeout) if cfg.timeout else None
        self.expansions = 0
        self.backtracks = 0
        self.reverse_order = reverse_order

    def _tick(self):
        self.expansions += 1
        if self.deadline is not None and self.expansions % 256 == 0:
            if time.monotonic() > self.deadline:
                raise _ResourceExceeded
        if len(self.dead) >= self.cfg.memo_limit:
            raise _ResourceExceeded

    def _candidates(self, occ: int) -> tuple[list[int], bool]:
        """Removable tile bits at this state.

        Returns (bits, fronted): if a removable leaf exists, only the least
        one is returned and `fronted` is True (fronting a removable leaf is
        an admissible reduction, see the module docstring).
        """
        g = self.grid
        board = self.board
        transit = board.transit_mask(occ)
        reach0 = g.flood(g.boundary & transit, transit)
        pockets = g.components(transit & ~reach0)
        apmask, leafmask = articulation_analysis(g, occ)
        removable: list[int] = []
        m = occ & ~apmask
        while m:
            low = m & -m
            m ^= low
            if board.escape_via_bridges(occ, low, reach0, pockets):
                if low & leafmask:
                    return [low], True
                removable.append(low)
        if self.reverse_order:
            removable.reverse()
        return removable, False

    def search(self, occ: int) -> list[int] | None:
        """Removal order (bits) dismantling occ to a single tile, or None."""
        if occ.bit_count() <= 1:
            return []
        if occ in self.dead:
            return None
        self._tick()
        cands, fronted = self._candidates(occ)
        for bit in cands:
            sub = self.search(occ ^ bit)
            if sub is not None:
                return [bit] + sub
        self.backtracks += 1
        self.dead.add(occ)
        return None


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("TILTFORGE_THREADS", "1")))
    except ValueError:
        return 1


def _search_root(board: Board, occ0: int, cfg: SearchConfig,
                 reverse_order: bool) -> tuple[list[int] | None, int, int]:
    """Top-level search; optionally explores first-level branches in threads.

    The transposition table is shared (set.add is atomic); dead states are
    verdict-invariant, so sharing preserves determinism. Results merge in
    canonical branch order, giving the same witness as the sequential run.
    """
    searcher = _Searcher(board, cfg, reverse_order)
    nthreads = _threads()
    if nthreads <= 1 or occ0.bit_count() <= 2:
        order = searcher.search(occ0)
        return order, searcher.expansions, searcher.backtracks

    cands, fronted = searcher._candidates(occ0)
    if fronted or len(cands) <= 1:
        order = searcher.search(occ0)
        return order, searcher.expansions, searcher.backtracks

    workers: list[_Searcher] = []

    def explore(bit: int) -> list[int] | None:
        w = _Searcher(board, cfg, reverse_order)
        w.dead = searcher.dead  # shared table
        w.deadline = searcher.deadline
        workers.append(w)
        sub = w.search(occ0 ^ bit)
        return None if sub is None else [bit] + sub

    with ThreadPoolExecutor(max_workers=nthreads) as pool:
        results = list(pool.map(explore, cands))
    expansions = searcher.expansions + sum(w.expansions for w in workers)
    backtracks = searcher.backtracks + sum(w.backtracks for w in workers)
    for res in results:
        if res is not None:
            return res, expansions, backtracks
    searcher.dead.add(occ0)
    return None, expansions, backtracks


def _plan_from_removals(shape: Shape, ws: Workspace, board: Board,
                        order: list[int]) -> Plan:
    """Replay a removal order extracting escape paths; returns a build plan."""
    g = board.grid
    occ = board.mask(shape.cells)
    steps: list[Step] = []
    for bit in order:
        t = g.least_cell(bit)
        step = board.deconstruction_step(occ, t)
        if step is None:
            raise AssertionError(f"search produced an unremovable tile {t}")
        steps.append(step)
        occ ^= bit
    dismantle = Plan(shape, tuple(steps), "dismantle")
    build = Plan(shape, tuple(s.reversed() for s in reversed(steps)), "build")
    return build


def decide_stap(s: Shape, cfg: SearchConfig | None = None,
                candidate_order: str = "canonical") -> SolveResult:
    """Decide constructibility by exhaustive deconstruction search.

    Returns a verified build plan on success; "not_constructible" only
    after the search space is exhausted.
    """
    cfg = cfg or SearchConfig()
    s.validate()
    if s.n > cfg.max_cells:
        raise ValueError(f"shape has {s.n} cells, over the cap {cfg.max_cells}")
    ws = Workspace.for_cells(s.cells)
    board = Board(ws)
    occ0 = board.mask(s.cells)
    try:
        order, expansions, backtracks = _search_root(
            board, occ0, cfg, candidate_order == "reversed")
    except _ResourceExceeded:
        return SolveResult("resource_exceeded")
    if order is None:
        return SolveResult("not_constructible", expansions=expansions,
                           backtracks=backtracks)
    plan = _plan_from_removals(s, ws, board, order)
    v = verify_plan(plan)
    if not v.ok:
        raise AssertionError(f"emitted plan failed verification: {v}")
    return SolveResult("constructible", plan, expansions, backtracks)


def decide_deconstructible_restricted(s: Shape,
                                      region: Callable[[Cell], bool],
                                      cfg: SearchConfig | None = None) -> SolveResult:
    """decide_stap's dismantle direction with paths confined to `region`."""
    cfg = cfg or SearchConfig(max_cells=64)
    s.validate()
    if s.n > cfg.max_cells:
        raise ValueError(f"shape has {s.n} cells, over the cap {cfg.max_cells}")
    ws = Workspace.for_cells(s.cells)
    grid = ws.grid()
    region_mask = 0
    for idx in range(grid.nbits):
        if region(grid.cell(idx)):
            region_mask |= 1 << idx
    board = Board(ws, region_mask)
    occ0 = board.mask(s.cells)
    searcher = _Searcher(board, cfg, False)
    try:
        order = searcher.search(occ0)
    except _ResourceExceeded:
        return SolveResult("resource_exceeded")
    if order is None:
        return SolveResult("not_deconstructible", expansions=searcher.expansions,
                           backtracks=searcher.backtracks)
    g = board.grid
    occ = occ0
    steps = []
    for bit in order:
        t = g.least_cell(bit)
        step = board.deconstruction_step(occ, t)
        assert step is not None
        steps.append(step)
        occ ^= bit
    plan = Plan(s, tuple(steps), "dismantle")
    v = verify_plan(plan)
    if not v.ok:
        raise AssertionError(f"restricted plan failed verification: {v}")
    return SolveResult("deconstructible", plan, searcher.expansions,
                       searcher.backtracks)


def max_stap_exact(s: Shape, cfg: SearchConfig | None = None) -> tuple[int, Plan]:
    """Exact MaxSTAP: largest constructible connected subshape of s.

    Exhaustive search over build orders confined to the cells of s, with a
    visited-state table. The returned plan verifies against the subshape's
    own workspace.
    """
    cfg = cfg or SearchConfig(max_cells=12)
    s.validate()
    if s.n > cfg.max_cells:
        raise ValueError(f"shape has {s.n} cells, over the cap {cfg.max_cells}")
    ws = Workspace.for_cells(s.cells)
    board = Board(ws)
    g = board.grid
    smask = board.mask(s.cells)
    deadline = (time.monotonic() + cfg.timeout) if cfg.timeout else None

    visited: set[int] = set()
    best_state = 0
    best_order: list[int] = []
    ticks = 0

    def expand(state: int, order: list[int]):
        nonlocal best_state, best_order, ticks
        ticks += 1
        if deadline is not None and ticks % 256 == 0:
            if time.monotonic() > deadline:
                raise _ResourceExceeded
        if len(visited) >= cfg.memo_limit:
            raise _ResourceExceeded
        if state.bit_count() > best_state.bit_count():
            best_state = state
            best_order = list(order)
        transit = board.transit_mask(state)
        reach = g.flood(g.boundary & transit, transit)
        cand = smask & ~state & g.dilate(state) & g.dilate(reach)
        while cand:
            low = cand & -cand
            cand ^= low
            nxt = state | low
            if nxt in visited:
                continue
            visited.add(nxt)
            order.append(low)
            expand(nxt, order)
            order.pop()

    seeds = sorted(s.cells, key=canon_key)
    try:
        for seed in seeds:
            bit = g.bit(seed)
            if bit in visited:
                continue
            visited.add(bit)
            expand(bit, [bit])
            if best_state.bit_count() == s.n:
                break
    except _ResourceExceeded:
        pass  # best-so-far is still a valid lower bound, but report honestly
    if deadline is not None and time.monotonic() > deadline:
        raise TimeoutError("max_stap_exact exceeded its time budget")

    sub = Shape(s.dim, frozenset(g.cells(best_state)))
    sub_ws = Workspace.for_cells(sub.cells)
    sub_board = Board(sub_ws)
    occ = 0
    steps: list[Step] = []
    for bit in best_order:
        cell = g.least_cell(bit)
        if not occ:
            occ = sub_board.grid.bit(cell)
            continue
        step = sub_board.construction_step(occ, cell)
        if step is None:
            raise AssertionError(f"recorded build order has no step for {cell}")
        steps.append(step)
        occ |= sub_board.grid.bit(cell)
    plan = Plan(sub, tuple(steps), "build")
    v = verify_plan(plan)
    if not v.ok:
        raise AssertionError(f"max-stap plan failed verification: {v}")
    return sub.n, plan


def enumerate_shapes(n: int, dim: int, filter: str = "all") -> Iterator[Shape]:
    """All fixed (translation-normalized) shapes of size n, each once.

    Redelmeier-style growth from a canonical root cell; the order is the
    enumerator's deterministic DFS order. Filters: all | trees |
    non_degenerate.
    """
    if dim not in (2, 3):
        raise ValueError(f"unsupported dimension {dim}")
    if n < 1:
        raise ValueError("n must be positive")
    limit = 12 if dim == 2 else 8
    if n > limit:
        raise ValueError(f"n={n} over the enumeration cap {limit} for {dim}D")
    if filter not in ("all", "trees", "non_degenerate"):
        raise ValueError(f"unknown filter {filter!r}")

    origin = (0,) * dim

    if dim == 2:
        def admissible(c):
            return c[1] > 0 or (c[1] == 0 and c[0] >= 0)
    else:
        def admissible(c):
            if c[2] != 0:
                return c[2] > 0
            return c[1] > 0 or (c[1] == 0 and c[0] >= 0)

    in_shape: set[Cell] = set()
    seen: set[Cell] = {origin}

    def rec(frontier: list[Cell]) -> Iterator[frozenset[Cell]]:
        # Owns `frontier` and consumes it; children get their own copy.
        while frontier:
            c = frontier.pop()
            in_shape.add(c)
            if len(in_shape) == n:
                yield frozenset(in_shape)
            else:
                new = [q for q in neighbors(c, dim)
                       if admissible(q) and q not in in_shape and q not in seen]
                seen.update(new)
                yield from rec(frontier + new)
                seen.difference_update(new)
            in_shape.discard(c)
            # c stays in `seen`: it may not be chosen again at this level
            # or deeper, which is what makes each shape appear exactly once.

    def emit():
        for cells in rec([origin]):
            yield Shape(dim, cells)

    if filter == "all":
        yield from emit()
    elif filter == "trees":
        for sh in emit():
            if is_tree(sh):
                yield sh
    else:
        for sh in emit():
            if not is_degenerate(sh):
                yield sh
