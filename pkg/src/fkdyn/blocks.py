"""Disconnecting-interval calculus and the block-splitting construction.

Everything here lives on a thin rectangle whose boundary condition is free on
the east, south and west sides, wiring only north-row vertices.  Intervals of
columns [[a,b]] are classified as disconnecting of free-type (no wirings
cross the interval) and/or wired-type (endpoints co-wired); the splitting
algorithm cuts a compatible group of rectangles along such an interval into
interior/exterior cores and their m-enlargements.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .boundary import BoundaryCondition
from .lattice import Lattice, Region
from .rng import RngStream
from .state import FkConfig


class PreconditionError(ValueError):
    """An operation's caller contract was violated."""


class SplitInternalError(RuntimeError):
    """The splitting algorithm reached a dead end on valid input (a defect)."""


class IntervalType(enum.Flag):
    NONE = 0
    FREE = enum.auto()
    WIRED = enum.auto()
    FREE_WIRED = FREE | WIRED

    @property
    def disconnecting(self) -> bool:
        return self is not IntervalType.NONE


def _north_column_of_position(lat: Lattice, pos: int) -> int | None:
    """Column x if the cycle position is the north vertex (x, l), else None."""
    n, l = lat.n, lat.l
    if n + l <= pos <= 2 * n + l:
        return 2 * n + l - pos
    return None


class IntervalTables:
    """Free/wired classification for every column interval, O(1) lookups.

    wired[a, b]: some boundary class contains both (a,l) and (b,l); trivially
    true on the diagonal.  free[a, b]: no class has a column inside [a,b] and
    another outside (the semantic reading, also on the diagonal; Lemma-style
    merging is only sound with the semantic version).
    """

    def __init__(self, bc: BoundaryCondition, lat: Lattice):
        n = lat.n
        if (bc.n, bc.l) != (lat.n, lat.l):
            raise PreconditionError("boundary condition and lattice dimensions differ")
        self.lat = lat
        self.block_cols: list[list[int]] = []
        bid = np.full(n + 1, -1, dtype=np.int64)
        for blk in bc.blocks:
            cols = []
            for pos in blk:
                col = _north_column_of_position(lat, pos)
                if col is None:
                    raise PreconditionError(
                        "interval calculus requires the boundary condition to be "
                        "free on the east, south and west sides")
                cols.append(col)
            cols.sort()
            bid[cols] = len(self.block_cols)
            self.block_cols.append(cols)

        idx = np.arange(n + 1)
        eq = (bid[:, None] == bid[None, :]) & (bid[:, None] >= 0)
        self.wired = eq | (idx[:, None] == idx[None, :])

        free = np.ones((n + 1, n + 1), dtype=bool)
        for cols in self.block_cols:
            lo, hi = cols[0], cols[-1]
            nxt = np.full(n + 2, n + 1, dtype=np.int64)
            for c in reversed(cols):
                nxt[: c + 1] = c
            a = idx[:, None]
            b = idx[None, :]
            touches = nxt[:-1, None] <= b  # some block column in [a, b]
            covers = (a <= lo) & (b >= hi)
            free &= ~(touches & ~covers)
        self.free = free

    def type_of(self, a: int, b: int) -> IntervalType:
        if not (0 <= a <= b <= self.lat.n):
            raise PreconditionError(f"interval [[{a},{b}]] outside [[0,{self.lat.n}]]")
        t = IntervalType.NONE
        if self.free[a, b]:
            t |= IntervalType.FREE
        if self.wired[a, b]:
            t |= IntervalType.WIRED
        return t


def classify_interval(bc: BoundaryCondition, lat: Lattice, a: int, b: int) -> IntervalType:
    """Disconnecting-interval type of [[a,b]] under a north-only condition."""
    return IntervalTables(bc, lat).type_of(a, b)


def check_interval_lemmas(bc: BoundaryCondition, lat: Lattice) -> list[tuple]:
    """Exhaustively verify the union/intersection interval lemmas.

    Checks, over all admissible index tuples: wired/free merging of adjacent
    intervals, agreement of types on overlapping intervals, and the splitting
    of overlapping same-type intervals.  Returns violation records (empty for
    realizable north-side conditions; crossing partitions do violate).
    """
    t = IntervalTables(bc, lat)
    n = lat.n
    F, W = t.free, t.wired
    out: list[tuple] = []

    # merge lemma, wired: [[a,b]] and [[b,c]] wired => [[a,c]] wired
    for b in range(1, n):
        av = np.flatnonzero(W[:b, b])
        cv = np.flatnonzero(W[b, b + 1:]) + b + 1
        if len(av) and len(cv):
            bad = ~W[np.ix_(av, cv)]
            for i, j in zip(*np.nonzero(bad)):
                out.append(("merge_wired", int(av[i]), b, int(cv[j])))
    # merge lemma, free: [[a,b]] and [[b+1,c]] free => [[a,c]] free
    for b in range(0, n):
        av = np.flatnonzero(F[: b + 1, b])
        cv = np.flatnonzero(F[b + 1, b + 1:]) + b + 1
        if len(av) and len(cv):
            bad = ~F[np.ix_(av, cv)]
            for i, j in zip(*np.nonzero(bad)):
                out.append(("merge_free", int(av[i]), b, int(cv[j])))

    only_f = F & ~W
    only_w = W & ~F
    disc = F | W
    # type agreement on overlap: a < b <= c < d, both disconnecting
    for b in range(n + 1):
        for c in range(b, n + 1):
            av = np.flatnonzero(disc[:b, c]) if b else []
            dv = np.flatnonzero(disc[b, c + 1:]) + c + 1 if c < n else []
            if not (len(av) and len(dv)):
                continue
            a_of = np.flatnonzero(only_f[:b, c])
            a_ow = np.flatnonzero(only_w[:b, c])
            d_of = np.flatnonzero(only_f[b, c + 1:]) + c + 1
            d_ow = np.flatnonzero(only_w[b, c + 1:]) + c + 1
            if len(a_of) and len(d_ow):
                out.append(("overlap_type", int(a_of[0]), b, c, int(d_ow[0])))
            if len(a_ow) and len(d_of):
                out.append(("overlap_type", int(a_ow[0]), b, c, int(d_of[0])))

    # splitting of overlapping wired intervals: a < b < c < d
    for b in range(1, n):
        for c in range(b + 1, n):
            av = np.flatnonzero(W[:b, c])
            dv = np.flatnonzero(W[b, c + 1:]) + c + 1
            if len(av) and len(dv):
                ok = (
                    W[b, c]
                    and W[av, b].all()
                    and W[c, dv].all()
                    and W[np.ix_(av, dv)].all()
                )
                if not ok:
                    out.append(("split_wired", int(av[0]), b, c, int(dv[0])))
    # splitting of overlapping free intervals
    for b in range(1, n):
        for c in range(b + 1, n):
            av = np.flatnonzero(F[:b, c])
            dv = np.flatnonzero(F[b, c + 1:]) + c + 1
            if len(av) and len(dv):
                ok = (
                    F[b, c]
                    and F[av, b - 1].all()
                    and (c + 1 > n or F[c + 1, dv].all())
                    and F[np.ix_(av, dv)].all()
                )
                if not ok:
                    out.append(("split_free", int(av[0]), b, c, int(dv[0])))
    return out


# ---------------------------------------------------------------------------
# Groups of rectangles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroupOfRectangles:
    """Disjoint vertical slabs [[a_i,b_i]] x [[0,l]], sorted left to right."""

    lat: Lattice
    slabs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prev = -1
        for a, b in self.slabs:
            if not (0 <= a < b <= self.lat.n):
                raise ValueError(f"slab [[{a},{b}]] not a rectangular subset")
            if a <= prev:
                raise ValueError("slabs must be sorted and disjoint")
            prev = b

    @property
    def count(self) -> int:
        return len(self.slabs)

    @property
    def width(self) -> int:
        return sum(b - a for a, b in self.slabs)

    def width_in(self, c: int, d: int) -> int:
        """W(R intersect [[c,d]] x [[0,l]])."""
        return sum(max(0, min(b, d) - max(a, c)) for a, b in self.slabs)

    def columns(self) -> np.ndarray:
        """Mask over 0..n of columns belonging to some slab."""
        mask = np.zeros(self.lat.n + 1, dtype=bool)
        for a, b in self.slabs:
            mask[a: b + 1] = True
        return mask

    def side_distance(self, col: int) -> int:
        """Distance from (col, l) to the vertical sides of the group."""
        return min(min(abs(col - a), abs(col - b)) for a, b in self.slabs)

    def slab_of(self, col: int) -> int:
        for i, (a, b) in enumerate(self.slabs):
            if a <= col <= b:
                return i
        raise ValueError(f"column {col} not in any slab")

    def clip(self, lo: int, hi: int) -> "GroupOfRectangles":
        """Group intersected with the column interval [[lo,hi]]."""
        out = []
        for a, b in self.slabs:
            aa, bb = max(a, lo), min(b, hi)
            if aa < bb:
                out.append((aa, bb))
        return GroupOfRectangles(self.lat, tuple(out))

    def clip_union(self, ranges) -> "GroupOfRectangles":
        out = []
        for a, b in self.slabs:
            for lo, hi in ranges:
                aa, bb = max(a, lo), min(b, hi)
                if aa < bb:
                    out.append((aa, bb))
        out.sort()
        return GroupOfRectangles(self.lat, tuple(out))

    def region(self) -> Region:
        mask = np.zeros(self.lat.n_vertices, dtype=bool)
        for a, b in self.slabs:
            for y in range(self.lat.l + 1):
                base = y * (self.lat.n + 1)
                mask[base + a: base + b + 1] = True
        return Region(self.lat, mask)


def whole_lattice_group(lat: Lattice) -> GroupOfRectangles:
    return GroupOfRectangles(lat, ((0, lat.n),))


def standing_assumptions(bc: BoundaryCondition, lat: Lattice, m: int) -> None:
    """Validate the thin-rectangle assumptions: condition free off the north
    side and free within distance m of the east/west sides on the north row."""
    tables = IntervalTables(bc, lat)  # raises if not north-only
    for cols in tables.block_cols:
        for c in cols:
            if c <= m or c >= lat.n - m:
                raise PreconditionError(
                    f"north vertex at column {c} within distance {m} of a "
                    "vertical side must be free")


def is_compatible(group: GroupOfRectangles, bc: BoundaryCondition, m: int) -> bool:
    """Gap intervals (padded by m) and the full span must be disconnecting."""
    standing_assumptions(bc, lat := group.lat, m)
    for a, b in group.slabs:
        if b - a < 2 * m:
            raise PreconditionError(f"slab [[{a},{b}]] thinner than 2m={2*m}")
    t = IntervalTables(bc, lat)
    for (a1, b1), (a2, b2) in zip(group.slabs, group.slabs[1:]):
        if not t.type_of(b1 - m, a2 + m).disconnecting:
            return False
    lo, hi = group.slabs[0][0] + m, group.slabs[-1][1] - m
    return t.type_of(lo, hi).disconnecting


# ---------------------------------------------------------------------------
# The splitting algorithm
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SplitResult:
    c_star: int
    d_star: int
    interval_type: IntervalType
    m: int
    A_int: GroupOfRectangles
    A_ext: GroupOfRectangles
    R_int: GroupOfRectangles
    R_ext: GroupOfRectangles
    trace: dict = field(default=None, compare=False, repr=False)


def _candidate_interval(group, tables, m, trace):
    """Find a disconnecting interval of relative width in [1/3, 2/3] (+slack).

    First tries wired pairs directly; otherwise tiles the search range by
    maximal boundary components (free-wired intervals) and merges adjacent
    tiles until the width target is met.
    """
    lat = group.lat
    W = group.width
    colmask = group.columns()
    width = group.width_in

    pairs_mid = []
    pairs_wide = []
    for cols in tables.block_cols:
        rcols = [c for c in cols if colmask[c]]
        for i in range(len(rcols)):
            for j in range(i + 1, len(rcols)):
                w = width(rcols[i], rcols[j])
                if 3 * w >= W and 3 * w <= 2 * W:
                    pairs_mid.append((rcols[i], rcols[j]))
                elif 3 * w > 2 * W:
                    pairs_wide.append((w, rcols[i], rcols[j]))
    if pairs_mid:
        c, d = min(pairs_mid)
        trace["branch"] = "wired_pair"
        trace["candidate"] = (c, d)
        return c, d

    if pairs_wide:
        _, x0, y0 = min(pairs_wide)
        lo, hi = x0 + 1, y0 - 1
        trace["branch"] = "wide_pair_tiling"
        trace["wide_pair"] = (x0, y0)
    else:
        lo, hi = group.slabs[0][0], group.slabs[-1][1]
        trace["branch"] = "full_span_tiling"

    # tiles: maximal component spans inside [lo, hi]; spans reaching outside
    # become barriers (no merged interval may straddle them)
    covered = np.zeros(lat.n + 1, dtype=np.int8)  # 0 untouched, 1 tile, 2 barrier
    tiles = []
    for cols in tables.block_cols:
        inside = [c for c in cols if lo <= c <= hi]
        if not inside:
            continue
        if len(inside) == len(cols):
            tiles.append((cols[0], cols[-1]))
        else:
            for c in inside:
                covered[c] = 2
    # singleton columns (not in any listed block) are their own tiles
    tiles = [t for t in tiles if not any(covered[t[0]: t[1] + 1] == 2)]
    tiles.sort()
    maximal = []
    for t in tiles:
        if maximal and t[0] >= maximal[-1][0] and t[1] <= maximal[-1][1]:
            continue
        maximal.append(t)
    # fill every uncovered column in [lo, hi] with singleton tiles
    for t in maximal:
        covered[t[0]: t[1] + 1] = np.maximum(covered[t[0]: t[1] + 1], 1)
    all_tiles = list(maximal)
    for c in range(lo, hi + 1):
        if covered[c] == 0:
            all_tiles.append((c, c))
    all_tiles.sort()

    # greedy left-to-right merge within barrier-free runs
    K = len(all_tiles)
    for i in range(K):
        start = all_tiles[i][0]
        if not colmask[start]:
            continue  # left endpoint must sit on the group's north boundary
        k = i
        while k < K:
            end = all_tiles[k][1]
            # barrier inside the prospective span: abort this start
            if k > i and all_tiles[k][0] != all_tiles[k - 1][1] + 1:
                break
            w = width(start, end)
            if 3 * w >= W:
                if 3 * w <= 2 * W + 3 * 2 * m and colmask[end]:
                    trace["candidate"] = (start, end)
                    trace["tiles_used"] = (i, k)
                    return start, end
                if 3 * w > 2 * W + 3 * 2 * m:
                    break
            k += 1
    raise SplitInternalError("no candidate interval found on compatible input")


def _adjust_endpoint(group, tables, m, col, side, trace):
    """Move a candidate endpoint at least m away from the vertical sides,
    following the proof's case analysis on the neighbouring gap interval."""
    i = group.slab_of(col)
    a, b = group.slabs[i]
    dW, dE = col - a, b - col
    if min(dW, dE) >= m:
        return col
    key = f"adjust_{side}"
    if side == "c":
        if dW < m:
            if i == 0:
                trace[key] = "case1_first_slab"
                return a + m
            gap = tables.type_of(group.slabs[i - 1][1] - m, a + m)
            if IntervalType.WIRED in gap or (b - a) == 2 * m:
                trace[key] = "case2_or_4"
                return a + m
            trace[key] = "case3_free_gap"
            return a + m + 1
        trace[key] = "east_side"
        return b - m
    else:
        if dE < m:
            if i == group.count - 1:
                trace[key] = "case1_last_slab"
                return b - m
            gap = tables.type_of(b - m, group.slabs[i + 1][0] + m)
            if IntervalType.WIRED in gap or (b - a) == 2 * m:
                trace[key] = "case2_or_4"
                return b - m
            trace[key] = "case3_free_gap"
            return b - m - 1
        trace[key] = "west_side"
        return a + m


def split(group: GroupOfRectangles, bc: BoundaryCondition, m: int,
          want_trace: bool = False) -> SplitResult:
    """Cut a compatible group along a disconnecting interval [[c*,d*]].

    Postconditions (verified before returning): the interval is disconnecting
    with both endpoint columns on the group's north boundary at distance >= m
    from its vertical sides, the interior core holds between 1/4 and 3/4 of
    the width, both m-enlarged blocks hold between 1/5 and 4/5 and remain
    compatible with the boundary condition.
    """
    lat = group.lat
    W = group.width
    if W < 100 * m:
        raise PreconditionError(f"split needs W(R) >= 100m, got {W} < {100 * m}")
    if not is_compatible(group, bc, m):
        raise PreconditionError("group is not compatible with the boundary condition")
    tables = IntervalTables(bc, lat)
    trace: dict = {"W": W, "m": m, "slabs": group.slabs}

    c, d = _candidate_interval(group, tables, m, trace)
    c_star = _adjust_endpoint(group, tables, m, c, "c", trace)
    d_star = _adjust_endpoint(group, tables, m, d, "d", trace)
    trace["c_star"], trace["d_star"] = c_star, d_star

    ttype = tables.type_of(c_star, d_star)
    colmask = group.columns()
    checks = [
        (ttype.disconnecting, f"[[{c_star},{d_star}]] is not disconnecting"),
        (colmask[c_star] and colmask[d_star], "endpoints left the north boundary"),
        (group.side_distance(c_star) >= m and group.side_distance(d_star) >= m,
         "endpoints too close to the vertical sides"),
        (4 * group.width_in(c_star, d_star) >= W, "core too narrow"),
        (4 * group.width_in(c_star, d_star) <= 3 * W, "core too wide"),
    ]
    for ok, msg in checks:
        if not ok:
            raise SplitInternalError(f"{msg} (trace: {trace})")

    A_int = group.clip(c_star, d_star)
    A_ext = group.clip_union([(0, c_star), (d_star, lat.n)])
    R_int = group.clip(c_star - m, d_star + m)
    R_ext = group.clip_union([(0, c_star + m), (d_star - m, lat.n)])
    for blk, name in ((R_int, "R_int"), (R_ext, "R_ext")):
        if not (5 * blk.width >= W and 5 * blk.width <= 4 * W):
            raise SplitInternalError(f"{name} width {blk.width} outside [W/5, 4W/5]")
        if not is_compatible(blk, bc, m):
            raise SplitInternalError(f"{name} not compatible (trace: {trace})")
    return SplitResult(c_star, d_star, ttype, m, A_int, A_ext, R_int, R_ext,
                       trace if want_trace else None)


# ---------------------------------------------------------------------------
# Crossing events in the overlap rectangles
# ---------------------------------------------------------------------------

def _overlap_edge_sets(split_result: SplitResult, west: bool):
    """(interior edges, slit edges) of Q_W or Q_E and its geometry."""
    lat = split_result.A_int.lat
    m = split_result.m
    if west:
        cols = (split_result.c_star - m, split_result.c_star - 1)
        slit_col = split_result.c_star - 1  # edges to column c_star
    else:
        cols = (split_result.d_star + 1, split_result.d_star + m)
        slit_col = split_result.d_star  # edges from column d_star
    interior = []
    for e in range(lat.n_edges):
        (x1, y1), (x2, y2) = lat.edge_vertices(e)
        if cols[0] <= min(x1, x2) and max(x1, x2) <= cols[1]:
            interior.append(e)
    slit = [lat.edge_index((slit_col, y), (slit_col + 1, y)) for y in range(lat.l + 1)]
    return cols, interior, slit


def _edge_faces(lat: Lattice, e: int):
    (x1, y1), (x2, y2) = lat.edge_vertices(e)
    if y1 == y2:  # horizontal: faces above and below
        x = min(x1, x2)
        return (x, y1 - 1), (x, y1)
    y = min(y1, y2)  # vertical: faces left and right
    return (x1 - 1, y), (x1, y)


def _closed_dual_path(lat: Lattice, config: FkConfig, edge_set, sources, targets) -> bool:
    """Path of closed edges (adjacent through shared faces) source -> target."""
    edge_set = set(edge_set)
    face_to_edges: dict[tuple, list[int]] = {}
    for e in edge_set:
        if config[e]:
            continue
        for f in _edge_faces(lat, e):
            face_to_edges.setdefault(f, []).append(e)
    targets = {e for e in targets if e in edge_set and not config[e]}
    frontier = [e for e in sources if e in edge_set and not config[e]]
    if not frontier:
        return False
    seen = set(frontier)
    while frontier:
        e = frontier.pop()
        if e in targets:
            return True
        for f in _edge_faces(lat, e):
            for e2 in face_to_edges.get(f, ()):
                if e2 not in seen:
                    seen.add(e2)
                    frontier.append(e2)
    return False


def _open_path(lat: Lattice, config: FkConfig, edge_set, src_vertex, target_vertices) -> bool:
    adj: dict[int, list[int]] = {}
    for e in edge_set:
        if not config[e]:
            continue
        u, v = lat.edges[e]
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    targets = set(target_vertices)
    frontier = [src_vertex]
    seen = {src_vertex}
    while frontier:
        u = frontier.pop()
        if u in targets:
            return True
        for v in adj.get(u, ()):
            if v not in seen:
                seen.add(v)
                frontier.append(v)
    return False


def gamma_event(config: FkConfig, split_result: SplitResult, which: str = "gamma") -> bool:
    """Crossing events in the overlap rectangles of the interior block.

    ``gamma``: both Q_W and Q_E carry a dual path (closed edges) from the top
    slit edge down to the south row, confining the influence of the exterior.
    ``gamma_star``: the primal variant, open paths from the top corners of the
    interior core down through the overlaps (used when p > p_c).
    """
    lat = split_result.A_int.lat
    for west in (True, False):
        cols, interior, slit = _overlap_edge_sets(split_result, west)
        edge_set = interior + slit
        if which == "gamma":
            south = [lat.edge_index((x, 0), (x + 1, 0))
                     for x in range(cols[0], cols[1])]
            ok = _closed_dual_path(lat, config, edge_set, [slit[-1]], south)
        elif which == "gamma_star":
            corner = (split_result.c_star, lat.l) if west else (split_result.d_star, lat.l)
            targets = [lat.vertex_index(x, 0) for x in range(cols[0], cols[1] + 1)]
            ok = _open_path(lat, config, edge_set, lat.vertex_index(*corner), targets)
        else:
            raise ValueError(f"unknown event {which!r}")
        if not ok:
            return False
    return True


# ---------------------------------------------------------------------------
# Seeded instance generator for the fuzz suites
# ---------------------------------------------------------------------------

def random_compatible_instance(
    lat: Lattice,
    m: int,
    rng: RngStream,
    max_slabs: int = 3,
    min_width: int = 0,
) -> tuple[GroupOfRectangles, BoundaryCondition]:
    """Random (group, bc) pair compatible by construction.

    Slabs are placed with widths >= 2m (occasionally exactly 2m, the thin
    case of the endpoint-adjustment analysis); each gap interval and the full
    span is made disconnecting either by leaving it free of crossings or by
    planting a wired arc across it; additional non-crossing arcs fill the
    cells between the protected interval boundaries, which cannot break
    compatibility.  ``min_width`` asks for W(R) at least that large.
    """
    n = lat.n
    lo_corner, hi_corner = m + 1, n - m - 1

    # slab layout: compose a random width budget into k slabs + gaps
    group = None
    for _ in range(500):
        k = 1 + rng.randint(max_slabs)
        gaps = [1 + rng.randint(2 * m + 1) for _ in range(k - 1)]
        slack = rng.randint(max(2, n // 8))
        budget = n - sum(gaps) - slack
        if budget < max(2 * m * k, min_width):
            continue
        cutpoints = sorted(rng.randint(budget - 2 * m * k + 1) for _ in range(k - 1))
        extras = [b - a for a, b in zip([0] + cutpoints, cutpoints + [budget - 2 * m * k])]
        widths = []
        for i in range(k):
            if k > 1 and rng.uniform() < 0.2:
                widths.append(2 * m)  # thin-slab case
            else:
                widths.append(2 * m + extras[i])
        total = sum(widths) + sum(gaps)
        if total > n or sum(widths) < min_width:
            continue
        start = rng.randint(n - total + 1)
        slabs = []
        x = start
        for i, w in enumerate(widths):
            slabs.append((x, x + w))
            x += w + (gaps[i] if i < k - 1 else 0)
        group = GroupOfRectangles(lat, tuple(slabs))
        break
    if group is None:
        raise ValueError("lattice too small for the requested instance")
    slabs = list(group.slabs)

    # protected intervals: gaps and the global span; a point interval ([[x,x]]
    # exactly at a width-2m slab) is trivially wired and needs no arc
    protected = []
    for (a1, b1), (a2, b2) in zip(slabs, slabs[1:]):
        protected.append((b1 - m, a2 + m))
    glob = (slabs[0][0] + m, slabs[-1][1] - m)
    protected.append(glob)
    nondegen = [(lo, hi) for lo, hi in protected if lo < hi]

    # intervals sharing an endpoint column (width-2m slabs) must be wired or
    # left free together: wiring one would cross its free neighbour
    clusters: list[set[int]] = []
    for lo, hi in nondegen:
        hit = [cl for cl in clusters if lo in cl or hi in cl]
        merged = {lo, hi}
        for cl in hit:
            merged |= cl
            clusters.remove(cl)
        clusters.append(merged)

    planted: list[tuple[int, ...]] = []
    used: set[int] = set()
    for cl in clusters:
        cols = sorted(cl)
        if cols[0] >= lo_corner and cols[-1] <= hi_corner and rng.uniform() < 0.5:
            planted.append(tuple(cols))
            used |= cl

    # cells: intervals delimited by protected boundaries, inside-out
    walls = sorted({c for lo, hi in protected for c in (lo, hi)})
    cells: list[list[int]] = []
    bounds = [lo_corner - 1] + walls + [hi_corner + 1]
    for w0, w1 in zip(bounds, bounds[1:]):
        cols = [c for c in range(max(w0 + 1, lo_corner), min(w1, hi_corner + 1))
                if c not in used]
        if cols:
            cells.append(cols)

    blocks = [list(p) for p in planted]
    for cell in cells:
        stack: list[list[int]] = []
        for c in cell:
            if stack and rng.uniform() < 0.4:
                stack[-1].append(c)
                if rng.uniform() < 0.5:
                    blocks.append(stack.pop())
            elif rng.uniform() < 0.3:
                stack.append([c])
        blocks.extend(stack)

    n_, l_ = lat.n, lat.l
    pos_blocks = []
    for blk in blocks:
        if len(blk) > 1:
            pos_blocks.append(tuple(sorted(n_ + l_ + (n_ - c) for c in blk)))
    bc = BoundaryCondition(lat.n, lat.l, tuple(pos_blocks))
    return group, bc
