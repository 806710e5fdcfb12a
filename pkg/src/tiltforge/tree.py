"""Linear-time constructibility decision for tree shapes.

State machine over the margin-2 inflated bounding box: free cells near the
shape start `blocked` and monotonically flip to `unblocked` when they are
transit-legal (whole face-neighborhood free) and reachable from outside.
A leaf tile is removable iff some adjacent free cell p has no occupied
neighbor besides the leaf itself and touches an unblocked cell; the escape
runs leaf -> p -> unblocked BFS tree -> workspace boundary.

The paper's removability test omits the "no occupied neighbor besides the
leaf" condition on p; without it the recorded escape can adhere to a
second tile mid-path on cage-like trees, so the corrected test is used
(see the motion module's transit rule).

Flat bytearray arena; cells at L-infinity distance <= 2 of the original
shape are the tracked universe (the transition counter counts only their
flips, each cell flips at most once). Farther free cells have permanently
free neighborhoods and only relay the flood.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass

from .grid import Cell, Shape, canon_key, is_tree, neighbors
from .motion import MOVE_DELTAS, Plan, Step, Workspace

_FREE = 0      # untracked free cell (distance > 2), not yet flood-reached
_BLOCKED = 1   # tracked free cell, not yet flood-reached
_UNBLOCKED = 2
_OCC = 3
_PAD = 4       # sentinel ring outside the workspace

_AREA_SLACK = 1 << 15
_AREA_FACTOR = 64


@dataclass(frozen=True)
class TreeDecision:
    constructible: bool
    plan: Plan | None
    stuck: frozenset[Cell] | None
    transitions: int


def decide_tree(s: Shape, emit_plan: bool = True) -> TreeDecision:
    """Decide constructibility of a tree shape; O(n) state transitions."""
    s.validate()
    if not is_tree(s):
        raise ValueError("decide_tree requires a tree-shaped input")
    if s.n == 1:
        plan = Plan(s, (), "build") if emit_plan else None
        return TreeDecision(True, plan, None, 0)

    dim = s.dim
    lo, hi = s.bbox
    # array box = workspace (margin 2) + sentinel pad ring
    alo = tuple(a - 3 for a in lo)
    ahi = tuple(b + 3 for b in hi)
    extent = tuple(b - a + 1 for a, b in zip(alo, ahi))
    area = 1
    for e in extent:
        area *= e
    if area > _AREA_FACTOR * s.n + _AREA_SLACK:
        raise ValueError(
            f"inflated bounding box ({area} cells) is too sparse for the "
            f"dense tree decider (n={s.n})")

    W = extent[0]
    if dim == 2:
        H = extent[1]
        plane = W * H
        deltas = (-W, -1, 1, W)
    else:
        H = extent[1]
        plane = W * H
        deltas = (-plane, -W, -1, 1, W, plane)

    def index(c: Cell) -> int:
        idx = 0
        mul = 1
        for x, a, e in zip(c, alo, extent):
            idx += (x - a) * mul
            mul *= e
        return idx

    def cell_of(idx: int) -> Cell:
        out = []
        for a, e in zip(alo, extent):
            out.append(a + idx % e)
            idx //= e
        return tuple(out)

    state = bytearray(area)
    degree = bytearray(area)

    # sentinel pad: outermost layer of the array box
    ws = Workspace(tuple(a + 1 for a in alo), tuple(b - 1 for b in ahi))

    def mark_pad():
        if dim == 2:
            for x in range(W):
                state[x] = _PAD
                state[(H - 1) * W + x] = _PAD
            for y in range(H):
                state[y * W] = _PAD
                state[y * W + W - 1] = _PAD
        else:
            D = extent[2]
            for z in (0, D - 1):
                base = z * plane
                for i in range(plane):
                    state[base + i] = _PAD
            for z in range(D):
                base = z * plane
                for y in range(H):
                    state[base + y * W] = _PAD
                    state[base + y * W + W - 1] = _PAD
                for x in range(W):
                    state[base + x] = _PAD
                    state[base + (H - 1) * W + x] = _PAD

    mark_pad()

    tiles = [index(c) for c in s.cells]
    for i in tiles:
        state[i] = _OCC
    for i in tiles:
        d = 0
        for dd in deltas:
            if state[i + dd] == _OCC:
                d += 1
        degree[i] = d

    # tracked universe: free cells at L-infinity <= 2 from a tile
    if dim == 2:
        offs = [dy * W + dx for dy in range(-2, 3) for dx in range(-2, 3)
                if (dx, dy) != (0, 0)]
    else:
        offs = [dz * plane + dy * W + dx
                for dz in range(-2, 3) for dy in range(-2, 3)
                for dx in range(-2, 3) if (dx, dy, dz) != (0, 0, 0)]
    for i in tiles:
        for o in offs:
            j = i + o
            if state[j] == _FREE:
                state[j] = _BLOCKED

    parent = None
    if emit_plan:
        from array import array
        parent = array("l", [-1]) * area

    transitions = 0
    queue = deque()

    # seed: the workspace boundary ring (one layer inside the pad)
    def ring_indices():
        if dim == 2:
            y0, y1 = 1, H - 2
            for x in range(1, W - 1):
                yield y0 * W + x
                yield y1 * W + x
            for y in range(2, H - 2):
                yield y * W + 1
                yield y * W + W - 2
        else:
            D = extent[2]
            for z in (1, D - 2):
                base = z * plane
                for y in range(1, H - 1):
                    row = base + y * W
                    for x in range(1, W - 1):
                        yield row + x
            for z in range(2, D - 2):
                base = z * plane
                for y in (1, H - 2):
                    row = base + y * W
                    for x in range(1, W - 1):
                        yield row + x
                for y in range(2, H - 2):
                    yield base + y * W + 1
                    yield base + y * W + W - 2

    for i in ring_indices():
        st = state[i]
        if st == _BLOCKED:
            transitions += 1
        if st in (_FREE, _BLOCKED):
            state[i] = _UNBLOCKED
            if parent is not None:
                parent[i] = i  # root
            queue.append(i)

    removable_heap: list[int] = []
    in_heap: set[int] = set()

    def leaf_witness(t: int):
        """(p, q) realizing the corrected removability test, or None."""
        for d1 in deltas:
            p = t + d1
            sp = state[p]
            if sp == _OCC or sp == _PAD:
                continue
            blocked_by_other = False
            q_found = -1
            for d2 in deltas:
                q = p + d2
                if q == t:
                    continue
                sq = state[q]
                if sq == _OCC:
                    blocked_by_other = True
                    break
                if sq == _UNBLOCKED and q_found < 0:
                    q_found = q
            if not blocked_by_other and q_found >= 0:
                return p, q_found
        return None

    def push_if_removable(t: int):
        if state[t] == _OCC and degree[t] <= 1 and t not in in_heap:
            if leaf_witness(t) is not None:
                heapq.heappush(removable_heap, t)
                in_heap.add(t)

    def flood_from(start_cells):
        nonlocal transitions
        for c in start_cells:
            sc = state[c]
            if sc not in (_FREE, _BLOCKED):
                continue
            # transit-legal?
            legal = True
            q_adj = -1
            for d in deltas:
                j = c + d
                sj = state[j]
                if sj == _OCC:
                    legal = False
                    break
                if sj == _UNBLOCKED and q_adj < 0:
                    q_adj = j
            if legal and q_adj >= 0:
                if sc == _BLOCKED:
                    transitions += 1
                state[c] = _UNBLOCKED
                if parent is not None:
                    parent[c] = q_adj
                queue.append(c)
        while queue:
            u = queue.popleft()
            for d in deltas:
                v = u + d
                sv = state[v]
                if sv == _FREE or sv == _BLOCKED:
                    legal = True
                    for d2 in deltas:
                        if state[v + d2] == _OCC:
                            legal = False
                            break
                    if legal:
                        if sv == _BLOCKED:
                            transitions += 1
                        state[v] = _UNBLOCKED
                        if parent is not None:
                            parent[v] = u
                        queue.append(v)
                    else:
                        # v stays blocked: tiles adjacent to v may now pass
                        # the removability test through v
                        for d2 in deltas:
                            w = v + d2
                            if state[w] == _OCC and degree[w] <= 1:
                                push_if_removable(w)

    flood_from(ring_indices())
    for t in sorted(tiles):
        if degree[t] <= 1:
            push_if_removable(t)

    remaining = len(tiles)
    removal_steps: list[Step] = []

    while remaining > 1 and removable_heap:
        t = heapq.heappop(removable_heap)
        in_heap.discard(t)
        if state[t] != _OCC or degree[t] > 1:
            continue
        wit = leaf_witness(t)
        if wit is None:
            continue
        if parent is not None:
            p, q = wit
            path_idx = [t, p, q]
            while parent[path_idx[-1]] != path_idx[-1]:
                path_idx.append(parent[path_idx[-1]])
            path = [cell_of(i) for i in path_idx]
            moves = []
            for a, b in zip(path, path[1:]):
                moves.append(_letter(a, b, dim))
            removal_steps.append(Step(path[0], "".join(moves), "deconstruction"))
        state[t] = _BLOCKED
        remaining -= 1
        for d in deltas:
            u = t + d
            if state[u] == _OCC:
                degree[u] -= 1
                if degree[u] <= 1:
                    push_if_removable(u)
        # removal may open removability through cells of N[t]
        for d in deltas:
            p = t + d
            sp = state[p]
            if sp != _OCC and sp != _PAD:
                for d2 in deltas:
                    w = p + d2
                    if state[w] == _OCC and degree[w] <= 1:
                        push_if_removable(w)
        flood_from([t + d for d in deltas] + [t])

    if remaining > 1:
        stuck = frozenset(
            cell_of(i) for i in tiles if state[i] == _OCC)
        return TreeDecision(False, None, stuck, transitions)

    plan = None
    if emit_plan:
        build_steps = tuple(st.reversed() for st in reversed(removal_steps))
        plan = Plan(s, build_steps, "build")
    return TreeDecision(True, plan, None, transitions)


def _letter(a: Cell, b: Cell, dim: int) -> str:
    d = tuple(y - x for x, y in zip(a, b))
    for letter, dd in MOVE_DELTAS[dim].items():
        if dd == d:
            return letter
    raise AssertionError(f"non-adjacent path cells {a} -> {b}")


# -- reference implementations used by tests and small-scale callers ----


def compute_cell_states(s: Shape) -> dict[Cell, str]:
    """blocked/unblocked states for free cells within L-inf <= 2 of s."""
    cells = s.cells
    dim = s.dim
    tracked: set[Cell] = set()
    rng = range(-2, 3)
    for c in cells:
        if dim == 2:
            for dx in rng:
                for dy in rng:
                    q = (c[0] + dx, c[1] + dy)
                    if q not in cells:
                        tracked.add(q)
        else:
            for dx in rng:
                for dy in rng:
                    for dz in rng:
                        q = (c[0] + dx, c[1] + dy, c[2] + dz)
                        if q not in cells:
                            tracked.add(q)
    ws = Workspace.for_cells(cells)

    def transit(c: Cell) -> bool:
        return c not in cells and all(q not in cells for q in neighbors(c, dim))

    seen: set[Cell] = set()
    queue = deque()
    for c in _ring_cells(ws, dim):
        if transit(c):
            seen.add(c)
            queue.append(c)
    while queue:
        u = queue.popleft()
        for v in neighbors(u, dim):
            if v in seen or not ws.contains(v):
                continue
            if transit(v):
                seen.add(v)
                queue.append(v)
    return {c: ("unblocked" if c in seen else "blocked") for c in tracked}


def _ring_cells(ws: Workspace, dim: int):
    lo, hi = ws.lo, ws.hi
    if dim == 2:
        for x in range(lo[0], hi[0] + 1):
            yield (x, lo[1])
            yield (x, hi[1])
        for y in range(lo[1] + 1, hi[1]):
            yield (lo[0], y)
            yield (hi[0], y)
    else:
        for x in range(lo[0], hi[0] + 1):
            for y in range(lo[1], hi[1] + 1):
                yield (x, y, lo[2])
                yield (x, y, hi[2])
        for z in range(lo[2] + 1, hi[2]):
            for x in range(lo[0], hi[0] + 1):
                yield (x, lo[1], z)
                yield (x, hi[1], z)
            for y in range(lo[1] + 1, hi[1]):
                yield (lo[0], y, z)
                yield (hi[0], y, z)


def removable_leaves(s: Shape, states: dict[Cell, str]) -> list[Cell]:
    """Leaf tiles passing the (corrected) unblocked-adjacency test."""
    cells = s.cells
    dim = s.dim
    out = []
    for t in sorted(cells, key=canon_key):
        occ_nbrs = [q for q in neighbors(t, dim) if q in cells]
        if len(occ_nbrs) > 1:
            continue
        ok = False
        for p in neighbors(t, dim):
            if p in cells:
                continue
            if any(w in cells and w != t for w in neighbors(p, dim)):
                continue
            if any(states.get(q) == "unblocked"
                   for q in neighbors(p, dim) if q != t):
                ok = True
                break
        if ok:
            out.append(t)
    return out
