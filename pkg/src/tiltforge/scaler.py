"""Constructive plans for scaled shapes.

construct_2scaled dismantles the 2-scaled copy of a non-degenerate
polyomino in two alternating phases: Phase 1 widens corridors until the
remainder is weakly 3-empty toward the outer face, Phase 2 peels leaf
slabs and cuts holes open (two tiles per cut). construct_3scaled_3d runs
the 3D analogue over z-slabs with the ring/loop/pillar case analysis.

Every single removal is motion-checked against the current remainder, so
a driver bug can stall (internal error) but never emit an illegal plan;
the returned build plan is verified before handing it out.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bitgrid import BitGrid
from .grid import (Cell, Shape, canon_key, count_holes, is_degenerate,
                   neighbors, scale, slab_decompose)
from .motion import (Board, Plan, Step, Workspace, delta_letter,
                     verify_plan)


@dataclass(frozen=True)
class EmptinessWitness:
    kind: str  # "c-empty" | "weakly-c-empty" | "neither"
    c: int
    failing_pair: tuple[Cell, Cell] | None = None


@dataclass
class DismantleStats:
    """Optional instrumentation: one (kind, before, after) entry per event.

    Kinds: "hole-cut" (2D two-tile / 3-empty three-tile cuts), "ring-cut"
    and "loop" (3D), "leaf-slab", "phase1-line".
    """

    events: list = None

    def __post_init__(self):
        if self.events is None:
            self.events = []

    def record(self, kind: str, before: frozenset, after: frozenset):
        self.events.append((kind, before, after))

    def count(self, kind: str) -> int:
        return sum(1 for k, _, _ in self.events if k == kind)


# -- square configuration space ----------------------------------------


class _SquareSpace:
    """Anchor-space masks for a c x c (x c) square over a board grid."""

    def __init__(self, g: BitGrid, c: int):
        self.g = g
        self.c = c
        dim = g.dim
        if dim == 2:
            self.offsets = [(i, j) for i in range(c) for j in range(c)]
            self.corners = [(0, 0), (c - 1, 0), (0, c - 1), (c - 1, c - 1)]
        else:
            self.offsets = [(i, j, k) for i in range(c)
                            for j in range(c) for k in range(c)]
            self.corners = [t for t in self.offsets
                            if all(v in (0, c - 1) for v in t)]
        # anchors whose square stays inside the grid box
        dom = g.full
        for a in range(dim):
            for k in range(g.extent[a] - c + 1, g.extent[a]):
                dom &= ~self._coord_eq(a, k)
        self.domain = dom
        ring = 0
        for a in range(dim):
            ring |= self._coord_eq(a, 0) | self._coord_eq(a, g.extent[a] - c)
        self.domain_ring = dom & ring

    def _coord_eq(self, axis: int, k: int) -> int:
        g = self.g
        s = g.stride[axis]
        e = g.extent[axis]
        rep = g.full // ((1 << (s * e)) - 1)
        run = (1 << s) - 1
        return rep * (run << (k * s))

    def _shift_neg(self, m: int, off) -> int:
        g = self.g
        for a, d in enumerate(off):
            for _ in range(d):
                m = g.shift(m, a, -1)
        return m

    def shift_pos(self, m: int, off) -> int:
        g = self.g
        for a, d in enumerate(off):
            for _ in range(d):
                m = g.shift(m, a, 1)
        return m

    def overlap_masks(self, occ: int) -> dict:
        return {off: self._shift_neg(occ, off) for off in self.offsets}

    def legal_anchors(self, occ: int, weak: bool) -> int:
        ov = self.overlap_masks(occ)
        any_overlap = 0
        for m in ov.values():
            any_overlap |= m
        strict = self.domain & ~any_overlap
        if not weak:
            return strict
        out = strict
        for corner in self.corners:
            others = 0
            for off, m in ov.items():
                if off != corner:
                    others |= m
            out |= self.domain & ov[corner] & ~others
        return out

    def coverage(self, anchors: int) -> int:
        cov = 0
        for off in self.offsets:
            cov |= self.shift_pos(anchors, off)
        return cov

    def outside_reach(self, occ: int, weak: bool) -> int:
        legal = self.legal_anchors(occ, weak)
        return self.g.flood(self.domain_ring & legal, legal)


def check_emptiness(s: Shape, c: int) -> EmptinessWitness:
    """Classify s as c-empty, weakly c-empty, or neither.

    Configuration-space BFS of the c x c square (c-cube in 3D, used
    internally by the 3-scale construction). c-empty demands zero overlap
    throughout the travel; weakly allows at most one square corner on the
    shape at a time.
    """
    if c not in (2, 3):
        raise ValueError("emptiness checks support c in {2, 3} only")
    s.validate()
    ws = Workspace.for_cells(s.cells, margin=c + 2)
    g = ws.grid()
    occ = g.mask(s.cells)
    free = g.full & ~occ
    space = _SquareSpace(g, c)

    def classify(weak: bool) -> tuple[Cell, Cell] | None:
        """None if every same-component pair is square-connected."""
        legal = space.legal_anchors(occ, weak)
        anchor_comps = g.components(legal)
        coverages = [space.coverage(a) for a in anchor_comps]
        for comp in g.components(free):
            cells = comp
            # signature per cell: which anchor components cover it
            sigs: dict[int, int] = {}
            m = cells
            while m:
                low = m & -m
                m ^= low
                sig = 0
                for i, cov in enumerate(coverages):
                    if cov & low:
                        sig |= 1 << i
                sigs.setdefault(sig, low)  # canonical least witness per sig
            keys = sorted(sigs, key=lambda k: sigs[k])
            for i, a in enumerate(keys):
                for b in keys[i:]:
                    if (a & b) == 0 and (cells.bit_count() > 1):
                        pa = g.least_cell(sigs[a])
                        pb = g.least_cell(sigs[b])
                        if pa == pb:
                            # same cell twice only when a==b==0 and comp is
                            # a singleton, excluded above
                            continue
                        return tuple(sorted((pa, pb), key=canon_key))
        return None

    if classify(weak=False) is None:
        return EmptinessWitness("c-empty", c)
    weak_fail = classify(weak=True)
    if weak_fail is None:
        return EmptinessWitness("weakly-c-empty", c)
    return EmptinessWitness("neither", c, weak_fail)


# -- dismantling driver -------------------------------------------------


class _Dismantler:
    def __init__(self, target: Shape):
        self.target = target
        # search grid: margin 4 so the 3x3 square can roam fully outside
        # the bounding box; emitted paths are truncated to the standard
        # margin-2 workspace (escape existence is margin-invariant)
        self.ws = Workspace.for_cells(target.cells, margin=4)
        self.plan_ws = Workspace.for_cells(target.cells, margin=2)
        self.board = Board(self.ws)
        self.g = self.board.grid
        self.occ = self.board.mask(target.cells)
        self.steps: list[Step] = []

    @property
    def remaining(self) -> int:
        return self.occ.bit_count()

    def cells(self) -> frozenset[Cell]:
        return frozenset(self.g.cells(self.occ))

    def removable(self, cell: Cell) -> bool:
        return self.board.removable(self.occ, self.g.bit(cell))

    def remove(self, cell: Cell) -> bool:
        bit = self.g.bit(cell)
        if not (self.occ & bit):
            return False
        if not self.board.removable(self.occ, bit):
            return False
        step = self.board.deconstruction_step(self.occ, cell)
        if step is None:
            return False
        path = step.path()
        cut = next(i for i, c in enumerate(path)
                   if self.plan_ws.on_boundary(c))
        path = path[:cut + 1]
        moves = "".join(delta_letter(a, b) for a, b in zip(path, path[1:]))
        self.steps.append(Step(cell, moves, "deconstruction"))
        self.occ ^= bit
        return True

    def remove_forced(self, cell: Cell, context: str):
        if not self.remove(cell):
            raise AssertionError(
                f"{context}: removal of {cell} is not motion-legal")

    def build_plan(self) -> Plan:
        if self.remaining > 1:
            raise AssertionError("dismantler finished with tiles left")
        dismantle_steps = self.steps
        if self.remaining == 0:
            # the last tile removed becomes the implicit seed
            dismantle_steps = dismantle_steps[:-1]
        steps = tuple(s.reversed() for s in reversed(dismantle_steps))
        plan = Plan(self.target, steps, "build")
        v = verify_plan(plan)
        if not v.ok:
            raise AssertionError(f"scaler plan failed verification: {v}")
        return plan


# -- 2D phase 1: corridor widening --------------------------------------


def _f_set(d: _Dismantler, space: _SquareSpace) -> int:
    """Free cells weakly-square-connected to outside the bounding box."""
    reach = space.outside_reach(d.occ, weak=True)
    return space.coverage(reach) & ~d.occ & d.g.full


def _deficient_pairs(d: _Dismantler, F: int) -> list[tuple[Cell, Cell]]:
    g = d.g
    free = g.full & ~d.occ
    outer = g.flood(g.boundary & free, free)
    bad = outer & ~F & g.dilate(F)
    pairs = []
    for axis in (0, 1):
        m = bad & g.shift(bad, axis, -1)  # cell and its +axis neighbor bad
        mm = m
        while mm:
            low = mm & -mm
            mm ^= low
            p = g.least_cell(low)
            q = list(p)
            q[axis] += 1
            pairs.append((p, tuple(q)))
    pairs.sort(key=lambda pq: (canon_key(pq[0]), canon_key(pq[1])))
    return pairs


_SIDES_2D = ((1, 0), (-1, 0), (0, 1), (0, -1))


def _phase1_step(d: _Dismantler, space: _SquareSpace) -> bool:
    """One widening iteration; returns True if it removed anything."""
    g = d.g
    F = _f_set(d, space)
    pairs = _deficient_pairs(d, F)
    if not pairs:
        return False

    def in_f(c: Cell) -> bool:
        return g.contains(c) and bool(F & g.bit(c))

    def occupied(c: Cell) -> bool:
        return g.contains(c) and bool(d.occ & g.bit(c))

    for p1, p2 in pairs:
        w = tuple(a - b for a, b in zip(p1, p2))  # pair direction p2 -> p1
        for u in _SIDES_2D:
            if any(ui and wi for ui, wi in zip(u, w)):
                continue  # side must be perpendicular to the pair axis
            pp1 = tuple(a + b for a, b in zip(p1, u))
            pp2 = tuple(a + b for a, b in zip(p2, u))
            if not (in_f(pp1) and in_f(pp2)):
                continue
            t_b = tuple(a - b for a, b in zip(pp2, w))
            if not occupied(t_b):
                # symmetric roles: the blocking line may sit past p1 instead
                t_b = tuple(a + b for a, b in zip(pp1, w))
                w = tuple(-x for x in w)
                if not occupied(t_b):
                    continue
            # maximal run through t_b along the side axis, free on the
            # pair-facing side
            up = w

            def free_above(c: Cell) -> bool:
                q = tuple(a + b for a, b in zip(c, up))
                return g.contains(q) and not (d.occ & g.bit(q))

            if not free_above(t_b):
                continue
            line = [t_b]
            cur = t_b
            while True:
                cur = tuple(a + b for a, b in zip(cur, u))
                if occupied(cur) and free_above(cur):
                    line.append(cur)
                else:
                    break
            cur = t_b
            while True:
                cur = tuple(a - b for a, b in zip(cur, u))
                if occupied(cur) and free_above(cur):
                    line.insert(0, cur)
                else:
                    break
            # candidate order per the proof: the tile past t_b away from
            # the F side first, then t_b, then the rest outward
            minus_u = tuple(a - b for a, b in zip(t_b, u))
            cand = []
            if minus_u in line:
                cand.append(minus_u)
            cand.append(t_b)
            rest = sorted((c for c in line if c not in cand),
                          key=lambda c: (abs(c[0] - t_b[0]) + abs(c[1] - t_b[1]),
                                         canon_key(c)))
            cand.extend(rest)
            removed = 0
            progress = True
            while progress:
                progress = False
                for c in cand:
                    if occupied(c) and d.remove(c):
                        removed += 1
                        progress = True
            if removed:
                return True
    return False


# -- 2D phase 2: slab peeling and hole cuts ------------------------------


def _outer_free(d: _Dismantler) -> int:
    g = d.g
    free = g.full & ~d.occ
    return g.flood(g.boundary & free, free)


def _slab_masks(d: _Dismantler, axis: int):
    shape = Shape(d.target.dim, d.cells())
    dec = slab_decompose(shape, axis=axis)
    masks = [d.g.mask(slab) for slab in dec.slabs]
    return dec, masks


def _peel_slab(d: _Dismantler, slab: frozenset[Cell], context: str) -> None:
    """Remove a leaf slab end-first (rightmost, else leftmost)."""
    remaining = sorted(slab, key=lambda c: c[0])
    while remaining:
        if d.remove(remaining[-1]):
            remaining.pop()
            continue
        if d.remove(remaining[0]):
            remaining.pop(0)
            continue
        raise AssertionError(f"{context}: leaf slab peel is stuck")


def _phase2_step_2d(d: _Dismantler, cut_width: int,
                    stats: DismantleStats | None = None) -> bool:
    """Peel one outer leaf slab or cut one hole open. True on progress."""
    if not d.occ:
        return False
    g = d.g
    dec, masks = _slab_masks(d, axis=1)
    outer = _outer_free(d)
    free = g.full & ~d.occ

    def touches_outer(i: int) -> bool:
        return bool(g.dilate(masks[i]) & free & outer)

    # leaf slabs in the outer face
    order = sorted(range(dec.count),
                   key=lambda i: canon_key(min(dec.slabs[i], key=canon_key)))
    for i in order:
        if dec.degree(i) <= 1 and touches_outer(i):
            before = d.cells()
            _peel_slab(d, dec.slabs[i], "2d leaf slab")
            if stats is not None:
                stats.record("leaf-slab", before, d.cells())
            return True

    # hole cut: slab with neighbors on one side only, two neighbors in one
    # component of the remainder
    for i in order:
        if not touches_outer(i):
            continue
        nbrs = dec.contacts[i]
        if len(nbrs) < 2:
            continue
        ys = {next(iter(dec.slabs[j]))[1] for j in nbrs}
        y0 = next(iter(dec.slabs[i]))[1]
        if not (all(y > y0 for y in ys) or all(y < y0 for y in ys)):
            continue
        rest = d.occ & ~masks[i]
        comps = g.components(rest)
        by_comp: dict[int, list[int]] = {}
        for j in nbrs:
            for ci, comp in enumerate(comps):
                if comp & masks[j]:
                    by_comp.setdefault(ci, []).append(j)
                    break
        for ci in sorted(by_comp):
            group = by_comp[ci]
            if len(group) < 2:
                continue
            group.sort(key=lambda j: max(c[0] for c in dec.slabs[j]))
            s1 = group[0]
            right_edge = max(c[0] for c in dec.slabs[s1])
            row = sorted(dec.slabs[i], key=lambda c: c[0])
            xs = [c for c in row if c[0] > right_edge]
            # cut tiles must have both vertical sides free
            window: list[Cell] = []
            for c in xs:
                above = (c[0], c[1] + 1)
                below = (c[0], c[1] - 1)
                side_free = (not (d.occ & g.bit(above))) and \
                            (not (d.occ & g.bit(below)))
                if side_free:
                    if window and c[0] != window[-1][0] + 1:
                        window = []
                    window.append(c)
                    if len(window) == cut_width:
                        break
                else:
                    window = []
            if len(window) < cut_width:
                continue
            before = d.cells()
            for c in window:
                d.remove_forced(c, "2d hole cut")
            if stats is not None:
                stats.record("hole-cut", before, d.cells())
            return True
    raise AssertionError("2d phase 2 found no leaf slab and no hole cut")


def _dismantle_2d(d: _Dismantler, skip_phase1: bool, cut_width: int,
                  stats: DismantleStats | None = None) -> None:
    space = _SquareSpace(d.g, 3)
    cap = 8 * d.remaining + 64
    rounds = 0
    while d.occ:
        rounds += 1
        if rounds > cap:
            raise AssertionError("2d dismantler exceeded its round cap")
        if not skip_phase1:
            while _phase1_step(d, space):
                if not d.occ:
                    return
        if not d.occ:
            return
        _phase2_step_2d(d, cut_width, stats)


def construct_2scaled(p: Shape, stats: DismantleStats | None = None) -> Plan:
    """Build plan for the 2-scaled copy of a non-degenerate polyomino."""
    p.validate()
    if p.dim != 2:
        raise ValueError("construct_2scaled expects a 2D shape")
    if is_degenerate(p):
        raise ValueError("degenerate shapes stay blocked at any scale")
    target = scale(p, 2)
    d = _Dismantler(target)
    _dismantle_2d(d, skip_phase1=False, cut_width=2, stats=stats)
    return d.build_plan()


def construct_3empty(p: Shape, assert_emptiness: bool = False,
                     stats: DismantleStats | None = None) -> Plan:
    """Build plan for a non-degenerate, 3-empty polyomino (no widening).

    Hole cuts remove three tiles so 3-emptiness survives every cut; with
    `assert_emptiness` the invariant is re-checked after each cut.
    """
    p.validate()
    if p.dim != 2:
        raise ValueError("construct_3empty expects a 2D shape")
    if is_degenerate(p):
        raise ValueError("degenerate shapes stay blocked at any scale")
    w = check_emptiness(p, 3)
    if w.kind != "c-empty":
        raise ValueError(f"shape is not 3-empty; failing pair {w.failing_pair}")
    d = _Dismantler(p)
    own_stats = stats if stats is not None else DismantleStats()
    cap = 8 * d.remaining + 64
    rounds = 0
    while d.occ:
        rounds += 1
        if rounds > cap:
            raise AssertionError("3-empty dismantler exceeded its round cap")
        cuts_before = own_stats.count("hole-cut")
        _phase2_step_2d(d, cut_width=3, stats=own_stats)
        if assert_emptiness and d.occ and own_stats.count("hole-cut") > cuts_before:
            sub = Shape(2, d.cells())
            wc = check_emptiness(sub, 3)
            if wc.kind != "c-empty":
                raise AssertionError("hole cut broke 3-emptiness")
    return d.build_plan()


# -- 3D: slab peeling with ring / loop / pillar analysis -----------------


def _holes_3d(d: _Dismantler) -> list[int]:
    g = d.g
    free = g.full & ~d.occ
    outside = g.flood(g.boundary & free, free)
    return g.components(free & ~outside)


def _peel_region(d: _Dismantler, cells, context: str) -> None:
    remaining = sorted(cells, key=canon_key)
    while remaining:
        progressed = False
        for c in list(remaining):
            if d.remove(c):
                remaining.remove(c)
                progressed = True
        if not progressed:
            raise AssertionError(f"{context}: region peel is stuck "
                                 f"({len(remaining)} tiles left)")


def _phase1_3d(d: _Dismantler) -> bool:
    """Peel outer-face leaf slabs until none remains. True on progress."""
    any_progress = False
    while d.occ:
        dec, masks = _slab_masks(d, axis=2)
        outer = _outer_free(d)
        free = d.g.full & ~d.occ
        found = False
        order = sorted(range(dec.count),
                       key=lambda i: canon_key(min(dec.slabs[i], key=canon_key)))
        for i in order:
            if dec.degree(i) <= 1 and (d.g.dilate(masks[i]) & free & outer):
                _peel_slab_3d(d, dec.slabs[i])
                found = True
                any_progress = True
                break
        if not found:
            return any_progress
    return any_progress


def _peel_slab_3d(d: _Dismantler, slab: frozenset[Cell]) -> None:
    _peel_region(d, slab, "3d leaf slab")


def _slab_vertical_contacts(d: _Dismantler, mask: int) -> int:
    g = d.g
    above = g.shift(mask, 2, 1)
    below = g.shift(mask, 2, -1)
    return (above | below) & d.occ


def _phase2_step_3d(d: _Dismantler,
                    stats: DismantleStats | None = None) -> bool:
    g = d.g
    dec, masks = _slab_masks(d, axis=2)
    outer = _outer_free(d)
    free = g.full & ~d.occ
    holes = _holes_3d(d)
    order = sorted(range(dec.count),
                   key=lambda i: canon_key(min(dec.slabs[i], key=canon_key)))

    def touches_outer(i: int) -> bool:
        return bool(g.dilate(masks[i]) & free & outer)

    def one_side_only(i: int) -> bool:
        z0 = next(iter(dec.slabs[i]))[2]
        zs = {next(iter(dec.slabs[j]))[2] for j in dec.contacts[i]}
        return bool(zs) and (all(z > z0 for z in zs) or all(z < z0 for z in zs))

    def is_ring(j: int) -> bool:
        return any(g.dilate(masks[j]) & h for h in holes)

    # preferred: slab adjacent to the outer face, one-sided, next to a ring
    for i in order:
        if not (touches_outer(i) and one_side_only(i)):
            continue
        for j in dec.contacts[i]:
            if not is_ring(j):
                continue
            hole = next(h for h in holes
                        if (g.dilate(masks[j]) & h) and (g.dilate(masks[i]) & h))
            sr_down = masks[i] & g.dilate(masks[j])
            window = _find_cut_square(d, masks[i], hole, sr_down)
            if window is None:
                continue
            before = d.cells()
            for c in window:
                d.remove_forced(c, "3d ring cut")
            if stats is not None:
                stats.record("ring-cut", before, d.cells())
            return True

    # otherwise: loop handling on a slab with an adjacent loop
    visited_loops: set[frozenset[int]] = set()
    for i in order:
        rest = d.occ & ~masks[i]
        comps = g.components(rest)
        comp_of = {}
        for j in dec.contacts[i]:
            for ci, comp in enumerate(comps):
                if comp & masks[j]:
                    comp_of[j] = ci
                    break
        by_comp: dict[int, list[int]] = {}
        for j, ci in comp_of.items():
            by_comp.setdefault(ci, []).append(j)
        loops = [sorted(v) for v in by_comp.values() if len(v) >= 2]
        if not loops:
            continue
        loops.sort()
        pair = (loops[0][0], loops[0][1])
        while True:
            key = frozenset(pair)
            if key in visited_loops:
                raise AssertionError("3d loop switching cycled")
            visited_loops.add(key)
            before = d.cells()
            switched = _handle_loop(d, dec, masks, i, pair, comp_of, loops)
            if switched is True:
                if stats is not None:
                    stats.record("loop", before, d.cells())
                return True
            if switched is None:
                break
            pair = switched
    raise AssertionError("3d phase 2 found no ring cut and no loop")


def _find_cut_square(d: _Dismantler, slab_mask: int, hole: int,
                     anchor_zone: int) -> list[Cell] | None:
    """A 3x3 window of slab tiles adjacent to the hole and the zone."""
    g = d.g
    near_hole = g.dilate(hole) & slab_mask
    near_zone = g.dilate(anchor_zone) | anchor_zone
    cells = g.cells(slab_mask)
    cellset = set(cells)
    z = cells[0][2]
    for c in sorted(cells, key=canon_key):
        window = [(c[0] + dx, c[1] + dy, z) for dx in range(3) for dy in range(3)]
        if not all(w in cellset for w in window):
            continue
        wmask = g.mask(window)
        if (wmask & near_hole) and (wmask & near_zone):
            return window
    return None


def _handle_loop(d: _Dismantler, dec, masks, i: int, pair, comp_of, loops):
    """Case analysis for slab i with loop `pair`.

    Returns True on progress, None when this slab cannot progress, or a
    new loop pair to switch to (Case 4).
    """
    g = d.g
    s1, s2 = pair
    s1p = masks[i] & g.dilate(masks[s1])
    s2p = masks[i] & g.dilate(masks[s2])
    core = masks[i] & ~(s1p | s2p)
    comps = g.components(core)

    def classify(comp: int) -> str:
        a1 = bool(g.dilate(comp) & s1p)
        a2 = bool(g.dilate(comp) & s2p)
        if a1 and a2:
            return "type3"
        if a1:
            return "type1"
        if a2:
            return "type2"
        return "free"

    kinds = [classify(c) for c in comps]

    # components with no slab above/below can be removed outright
    progressed = False
    keep: list[tuple[int, str]] = []
    for comp, kind in zip(comps, kinds):
        if not _slab_vertical_contacts(d, comp) or kind == "free":
            _peel_region(d, g.cells(comp), "3d unsupported component")
            progressed = True
        else:
            keep.append((comp, kind))
    if progressed and not any(k == "type3" for _, k in keep):
        return True  # driver resumes with phase 1

    have = {k for _, k in keep}
    if "type1" in have and "type2" in have and "type3" in have:
        # Case 4: try to switch to a loop with both ends on the type-2 side
        for lp in loops:
            a, b = lp[0], lp[1]
            if frozenset((a, b)) == frozenset(pair):
                continue
            pa = masks[i] & g.dilate(masks[a])
            pb = masks[i] & g.dilate(masks[b])
            t2 = 0
            for comp, kind in keep:
                if kind == "type2":
                    t2 |= comp
            if (g.dilate(t2) & pa) and (g.dilate(t2) & pb):
                return (a, b)
        # no switch available: type-2 components are removable
        for comp, kind in keep:
            if kind == "type2":
                _peel_region(d, g.cells(comp), "3d type-2 component")
                progressed = True
        if progressed:
            return True
        return None
    if "type2" in have and "type3" in have:
        _peel_region(d, g.cells(s1p), "3d S1' strip")
        return True
    if have <= {"type1", "type3"} and have:
        _peel_region(d, g.cells(s2p), "3d S2' strip")
        return True
    if progressed:
        return True
    return None


def construct_3scaled_3d(p: Shape, stats: DismantleStats | None = None) -> Plan:
    """Build plan for the 3-scaled copy of a non-degenerate polycube."""
    p.validate()
    if p.dim != 3:
        raise ValueError("construct_3scaled_3d expects a 3D shape")
    if is_degenerate(p):
        raise ValueError("degenerate shapes stay blocked at any scale")
    target = scale(p, 3)
    d = _Dismantler(target)
    cap = 8 * d.remaining + 64
    rounds = 0
    while d.occ:
        rounds += 1
        if rounds > cap:
            raise AssertionError("3d dismantler exceeded its round cap")
        _phase1_3d(d)
        if not d.occ:
            break
        _phase2_step_3d(d, stats)
    return d.build_plan()
