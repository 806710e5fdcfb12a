"""Single-step movement semantics: steps, plans, verification, duality.

The move rule: a tile in transit may only occupy cells whose entire
face-neighborhood is free. Adjacency to the assembly is permitted exactly
at a construction step's final cell and at a deconstruction step's initial
cell — sticky tiles adhere on first face contact, so any intermediate
adjacency would end the step early.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bitgrid import BitGrid
from .grid import Cell, Shape, canon_key, is_connected, bounding_box

MOVE_DELTAS = {
    2: {"R": (1, 0), "L": (-1, 0), "U": (0, 1), "D": (0, -1)},
    3: {"R": (1, 0, 0), "L": (-1, 0, 0), "U": (0, 1, 0), "D": (0, -1, 0),
        "F": (0, 0, 1), "B": (0, 0, -1)},
}
OPPOSITE = {"R": "L", "L": "R", "U": "D", "D": "U", "F": "B", "B": "F"}
# Letters in canonical direction order (+x, -x, +y, -y, +z, -z).
LETTER_ORDER = "RLUDFB"


def delta_letter(frm: Cell, to: Cell) -> str:
    d = tuple(b - a for a, b in zip(frm, to))
    for letter, dd in MOVE_DELTAS[len(frm)].items():
        if dd == d:
            return letter
    raise ValueError(f"cells {frm} -> {to} are not adjacent")


@dataclass(frozen=True)
class Workspace:
    """Axis-aligned box: the target's bounding box inflated by `margin`."""

    lo: Cell
    hi: Cell

    @classmethod
    def for_cells(cls, cells, margin: int = 2) -> "Workspace":
        lo, hi = bounding_box(cells)
        return cls(tuple(a - margin for a in lo), tuple(b + margin for b in hi))

    @property
    def dim(self) -> int:
        return len(self.lo)

    def contains(self, c: Cell) -> bool:
        return all(a <= x <= b for x, a, b in zip(c, self.lo, self.hi))

    def on_boundary(self, c: Cell) -> bool:
        return self.contains(c) and any(
            x == a or x == b for x, a, b in zip(c, self.lo, self.hi))

    def grid(self) -> BitGrid:
        return BitGrid(self.lo, self.hi)


@dataclass(frozen=True)
class Step:
    """One tile's spawn-to-placement (or placement-to-escape) path."""

    start: Cell
    moves: str
    kind: str  # "construction" | "deconstruction"

    def path(self) -> list[Cell]:
        deltas = MOVE_DELTAS[len(self.start)]
        cells = [self.start]
        cur = self.start
        for letter in self.moves:
            d = deltas[letter]
            cur = tuple(a + b for a, b in zip(cur, d))
            cells.append(cur)
        return cells

    def final(self) -> Cell:
        return self.path()[-1]

    def reversed(self) -> "Step":
        new_kind = ("deconstruction" if self.kind == "construction"
                    else "construction")
        new_moves = "".join(OPPOSITE[m] for m in reversed(self.moves))
        return Step(self.final(), new_moves, new_kind)


@dataclass(frozen=True)
class Plan:
    """Ordered steps that build or dismantle a target shape.

    A build plan has n - 1 steps: the seed tile (the unique target cell no
    step places) goes down first without a step. A dismantle plan likewise
    leaves the seed as the last remaining tile.
    """

    target: Shape
    steps: tuple[Step, ...]
    direction: str  # "build" | "dismantle"

    @property
    def dim(self) -> int:
        return self.target.dim

    def workspace(self) -> Workspace:
        return Workspace.for_cells(self.target.cells)


@dataclass(frozen=True)
class Verdict:
    ok: bool
    step_index: int | None = None
    kind: str | None = None  # illegal_move | premature_adhesion | disconnection | wrong_final_shape
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


_OK = Verdict(True)


def _occupied_neighbor_count(occ: set, c: Cell) -> int:
    n = 0
    if len(c) == 2:
        x, y = c
        if (x + 1, y) in occ:
            n += 1
        if (x - 1, y) in occ:
            n += 1
        if (x, y + 1) in occ:
            n += 1
        if (x, y - 1) in occ:
            n += 1
        return n
    x, y, z = c
    for q in ((x + 1, y, z), (x - 1, y, z), (x, y + 1, z), (x, y - 1, z),
              (x, y, z + 1), (x, y, z - 1)):
        if q in occ:
            n += 1
    return n


def verify_plan(plan: Plan) -> Verdict:
    """Replay a plan against the step invariants.

    Deliberately implemented over plain sets, independently of the bitmask
    search machinery, so emitted plans are checked by a second route.
    """
    ws = plan.workspace()
    target = set(plan.target.cells)
    n = len(target)
    if len(plan.steps) != n - 1:
        return Verdict(False, None, "wrong_final_shape",
                       f"expected {n - 1} steps, got {len(plan.steps)}")
    if plan.direction == "build":
        finals = [s.path()[-1] for s in plan.steps]
        seed_cells = target.difference(finals)
        if len(seed_cells) != 1:
            return Verdict(False, None, "wrong_final_shape",
                           "steps do not leave exactly one seed cell")
        occ = {seed_cells.pop()}
        for i, step in enumerate(plan.steps):
            v = _check_construction_step(ws, occ, step, i)
            if not v.ok:
                return v
            occ.add(step.path()[-1])
        if occ != target:
            return Verdict(False, None, "wrong_final_shape",
                           "assembled cells differ from target")
        return _OK
    if plan.direction == "dismantle":
        occ = set(target)
        for i, step in enumerate(plan.steps):
            v = _check_deconstruction_step(ws, occ, step, i)
            if not v.ok:
                return v
            occ.discard(step.start)
        if len(occ) != 1:
            return Verdict(False, None, "wrong_final_shape",
                           "dismantle must end with the seed tile only")
        return _OK
    return Verdict(False, None, "illegal_move",
                   f"unknown plan direction {plan.direction!r}")


def _check_construction_step(ws: Workspace, occ: set, step: Step,
                             idx: int) -> Verdict:
    if step.kind != "construction":
        return Verdict(False, idx, "illegal_move", "wrong step kind")
    path = step.path()
    if not ws.on_boundary(path[0]):
        return Verdict(False, idx, "illegal_move",
                       f"start {path[0]} not on the workspace boundary")
    for c in path:
        if not ws.contains(c):
            return Verdict(False, idx, "illegal_move",
                           f"path leaves the workspace at {c}")
        if c in occ:
            return Verdict(False, idx, "illegal_move",
                           f"path enters occupied cell {c}")
    for c in path[:-1]:
        if _occupied_neighbor_count(occ, c) > 0:
            return Verdict(False, idx, "premature_adhesion",
                           f"transit cell {c} touches the assembly")
    if _occupied_neighbor_count(occ, path[-1]) == 0:
        return Verdict(False, idx, "illegal_move",
                       f"final cell {path[-1]} does not adhere to the assembly")
    return _OK


def _check_deconstruction_step(ws: Workspace, occ: set, step: Step,
                               idx: int) -> Verdict:
    if step.kind != "deconstruction":
        return Verdict(False, idx, "illegal_move", "wrong step kind")
    path = step.path()
    t = path[0]
    if t not in occ:
        return Verdict(False, idx, "illegal_move",
                       f"start {t} is not an occupied cell")
    rest = occ - {t}
    if rest and not is_connected(rest):
        return Verdict(False, idx, "disconnection",
                       f"removing {t} disconnects the shape")
    if not ws.on_boundary(path[-1]):
        return Verdict(False, idx, "illegal_move",
                       f"escape ends at {path[-1]}, not on the boundary")
    for c in path:
        if not ws.contains(c):
            return Verdict(False, idx, "illegal_move",
                           f"path leaves the workspace at {c}")
    for c in path[1:]:
        if c in rest:
            return Verdict(False, idx, "illegal_move",
                           f"path enters occupied cell {c}")
        if _occupied_neighbor_count(rest, c) > 0:
            return Verdict(False, idx, "premature_adhesion",
                           f"transit cell {c} touches the remaining shape")
    return _OK


def reverse_plan(plan: Plan) -> Plan:
    """Reverse step order and each path; build <-> dismantle."""
    v = verify_plan(plan)
    if not v.ok:
        raise ValueError(f"refusing to reverse a non-verifying plan: {v}")
    new_dir = "dismantle" if plan.direction == "build" else "build"
    steps = tuple(s.reversed() for s in reversed(plan.steps))
    return Plan(plan.target, steps, new_dir)


# -- search primitives (bitmask route) --------------------------------


class Board:
    """A workspace grid plus occupancy mask; search-side motion queries.

    This is the fast route used by the solvers; `verify_plan` above stays
    set-based so the two never share failure modes.
    """

    __slots__ = ("ws", "grid", "region")

    def __init__(self, ws: Workspace, region_mask: int | None = None):
        self.ws = ws
        self.grid = ws.grid()
        self.region = region_mask if region_mask is not None else self.grid.full

    def mask(self, cells) -> int:
        return self.grid.mask(cells)

    def transit_mask(self, occ: int) -> int:
        g = self.grid
        return g.full & ~occ & ~g.dilate(occ) & self.region

    def reach_mask(self, occ: int) -> int:
        """Cells reachable by a free-flying tile from the boundary."""
        g = self.grid
        transit = self.transit_mask(occ)
        return g.flood(g.boundary & transit, transit)

    def escape_exists(self, occ_minus_t: int, tbit: int) -> bool:
        g = self.grid
        transit = self.transit_mask(occ_minus_t)
        reach = g.flood(g.boundary & transit, transit)
        return bool(g.dilate(reach) & tbit)

    def escape_via_bridges(self, occ: int, tbit: int, reach0: int,
                           pockets: list[int]) -> bool:
        """Escape test for tile t against shared per-state structures.

        reach0/pockets are the boundary-reach and enclosed components of
        transit(occ); lifting t only changes the transit status of its own
        face-neighbors, which are pairwise non-adjacent and may bridge
        pockets to the outside.
        """
        g = self.grid
        if g.dilate(reach0) & tbit:
            return True
        rest = occ & ~tbit
        hops = []
        m = g.dilate(tbit) & ~occ & self.region
        while m:
            low = m & -m
            m ^= low
            if not (g.dilate(low) & rest):
                hops.append(low)
        if not hops:
            return False
        hop_out = [bool(g.dilate(h) & reach0) for h in hops]
        hop_pockets = [[i for i, p in enumerate(pockets) if g.dilate(h) & p]
                       for h in hops]
        reachable = [False] * len(pockets)
        changed = True
        while changed:
            changed = False
            for k in range(len(hops)):
                if not hop_out[k] and any(reachable[i] for i in hop_pockets[k]):
                    hop_out[k] = True
                    changed = True
                if hop_out[k]:
                    for i in hop_pockets[k]:
                        if not reachable[i]:
                            reachable[i] = True
                            changed = True
        return any(hop_out)

    def removable(self, occ: int, tbit: int) -> bool:
        rest = occ & ~tbit
        if rest and not self.grid.is_connected_mask(rest):
            return False
        return self.escape_exists(rest, tbit)

    def _transit_path_to(self, transit: int, goal_adj: int) -> list[Cell] | None:
        """Shortest boundary-rooted transit path ending adjacent to goal_adj.

        Ties broken toward canonically least cells. Returns the cell list
        from a boundary cell to the last transit cell.
        """
        g = self.grid
        sources = g.boundary & transit
        if not sources:
            return None
        levels = [sources]
        seen = sources
        target_near = g.dilate(goal_adj)
        while not (levels[-1] & target_near):
            nxt = g.dilate(levels[-1]) & transit & ~seen
            if not nxt:
                return None
            seen |= nxt
            levels.append(nxt)
        last = levels[-1] & target_near
        cur = g.least_cell(last)
        path = [cur]
        for lvl in reversed(levels[:-1]):
            prev = g.dilate(g.bit(cur)) & lvl
            cur = g.least_cell(prev)
            path.append(cur)
        path.reverse()
        return path

    def construction_step(self, occ: int, target_cell: Cell) -> Step | None:
        g = self.grid
        tbit = g.bit(target_cell)
        transit = self.transit_mask(occ)
        path = self._transit_path_to(transit, tbit)
        if path is None:
            return None
        path.append(target_cell)
        moves = "".join(delta_letter(a, b) for a, b in zip(path, path[1:]))
        return Step(path[0], moves, "construction")

    def deconstruction_step(self, occ: int, t: Cell) -> Step | None:
        g = self.grid
        tbit = g.bit(t)
        transit = self.transit_mask(occ & ~tbit)
        path = self._transit_path_to(transit, tbit)
        if path is None:
            return None
        path.append(t)
        path.reverse()
        moves = "".join(delta_letter(a, b) for a, b in zip(path, path[1:]))
        return Step(t, moves, "deconstruction")


def articulation_analysis(g, occ: int) -> tuple[int, int]:
    """(articulation mask, leaf mask) of the occupied-cell graph.

    Assumes occ is connected. Removing a non-articulation cell keeps the
    rest connected; leaves are degree <= 1 cells.
    """
    bits: list[int] = []
    m = occ
    while m:
        low = m & -m
        m ^= low
        bits.append(low)
    n = len(bits)
    leafmask = 0
    if n <= 2:
        for b in bits:
            leafmask |= b
        return 0, leafmask
    idx = {b: i for i, b in enumerate(bits)}
    adj: list[list[int]] = []
    for b in bits:
        nb = g.dilate(b) & occ & ~b
        lst = []
        while nb:
            l = nb & -nb
            nb ^= l
            lst.append(idx[l])
        if len(lst) <= 1:
            leafmask |= b
        adj.append(lst)

    disc = [0] * n
    low = [0] * n
    is_ap = [False] * n
    timer = 1
    root = 0
    disc[root] = low[root] = timer
    timer += 1
    stack = [(root, -1)]
    iters = [iter(adj[root])]
    root_children = 0
    while stack:
        u, pu = stack[-1]
        descended = False
        for v in iters[-1]:
            if disc[v] == 0:
                disc[v] = low[v] = timer
                timer += 1
                if u == root:
                    root_children += 1
                stack.append((v, u))
                iters.append(iter(adj[v]))
                descended = True
                break
            elif v != pu and disc[v] < low[u]:
                low[u] = disc[v]
        if not descended:
            stack.pop()
            iters.pop()
            if stack:
                p = stack[-1][0]
                if low[u] < low[p]:
                    low[p] = low[u]
                if p != root and low[u] >= disc[p]:
                    is_ap[p] = True
    if root_children > 1:
        is_ap[root] = True
    apmask = 0
    for i, b in enumerate(bits):
        if is_ap[i]:
            apmask |= b
    return apmask, leafmask


def find_construction_step(current, target_cell: Cell,
                           workspace: Workspace | None = None) -> Step | None:
    """Shortest legal step placing a tile at `target_cell`, or None.

    BFS over free cells whose entire face-neighborhood is free, from any
    workspace-boundary cell, with a final hop onto `target_cell`.
    """
    cur = set(current)
    if target_cell in cur:
        raise ValueError(f"target cell {target_cell} is occupied")
    if not any(q in cur for q in _adjacent(target_cell)):
        raise ValueError(f"target cell {target_cell} is not adjacent to the assembly")
    ws = workspace or Workspace.for_cells(cur | {target_cell})
    board = Board(ws)
    return board.construction_step(board.mask(cur), target_cell)


def _adjacent(c: Cell):
    if len(c) == 2:
        x, y = c
        return ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1))
    x, y, z = c
    return ((x + 1, y, z), (x - 1, y, z), (x, y + 1, z), (x, y - 1, z),
            (x, y, z + 1), (x, y, z - 1))


def is_removable(s, t: Cell, workspace: Workspace | None = None) -> bool:
    """True iff s minus t stays connected and t has a legal escape."""
    cells = s.cells if isinstance(s, Shape) else frozenset(s)
    if t not in cells:
        raise ValueError(f"{t} is not a tile of the shape")
    ws = workspace or Workspace.for_cells(cells)
    board = Board(ws)
    return board.removable(board.mask(cells), board.grid.bit(t))


def find_deconstruction_step(s, t: Cell,
                             workspace: Workspace | None = None) -> Step | None:
    """Shortest legal escape for tile t (ignores connectivity)."""
    cells = s.cells if isinstance(s, Shape) else frozenset(s)
    if t not in cells:
        raise ValueError(f"{t} is not a tile of the shape")
    ws = workspace or Workspace.for_cells(cells)
    board = Board(ws)
    return board.deconstruction_step(board.mask(cells), t)
