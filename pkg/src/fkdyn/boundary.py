"""Boundary conditions: partitions of the boundary cycle and their geometry.

A boundary condition wires subsets of boundary vertices together through
ghost connections outside the box.  Positions refer to the counterclockwise
boundary cycle of the host rectangle (see :func:`fkdyn.lattice.boundary_cycle`).
Realizable conditions are exactly the non-crossing partitions of that cycle;
:func:`realize` builds an explicit witness configuration in a padded annulus
and :func:`induce_bc` recovers the partition from any annulus configuration.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .lattice import (
    FULL,
    Lattice,
    Region,
    VariantError,
    boundary_cycle,
    build_rect,
    corner_positions,
    dual_lattice,
)
from .rng import RngStream


class UnionFind:
    """Array union-find with path halving; used by every connectivity oracle."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.count = n

    def find(self, a: int) -> int:
        p = self.parent
        while p[a] != a:
            p[a] = p[p[a]]
            a = p[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra
            self.count -= 1


@dataclass(frozen=True)
class BoundaryCondition:
    """Partition of boundary-cycle positions; singletons are implicit.

    ``blocks`` holds only the non-singleton classes, each sorted ascending,
    ordered by first element.  Equality therefore means equality of the
    partitions.
    """

    n: int
    l: int
    blocks: tuple[tuple[int, ...], ...] = field(default=())

    def __post_init__(self):
        B = self.n_positions
        seen = set()
        canon = []
        for blk in self.blocks:
            blk = tuple(sorted(blk))
            if len(blk) < 2:
                continue
            for p in blk:
                if not (0 <= p < B):
                    raise ValueError(f"cycle position {p} out of range [0,{B})")
                if p in seen:
                    raise ValueError(f"cycle position {p} in two blocks")
                seen.add(p)
            canon.append(blk)
        canon.sort()
        object.__setattr__(self, "blocks", tuple(canon))

    @property
    def n_positions(self) -> int:
        return 2 * self.n + 2 * self.l

    def block_of(self) -> np.ndarray:
        """Position -> block id; singletons get fresh ids after the blocks."""
        ids = np.full(self.n_positions, -1, dtype=np.int64)
        for i, blk in enumerate(self.blocks):
            for p in blk:
                ids[p] = i
        nxt = len(self.blocks)
        for p in range(self.n_positions):
            if ids[p] < 0:
                ids[p] = nxt
                nxt += 1
        return ids

    def full_partition(self) -> list[tuple[int, ...]]:
        """All classes incl. singletons, ordered by first element."""
        out = {blk[0]: blk for blk in self.blocks}
        covered = {p for blk in self.blocks for p in blk}
        for p in range(self.n_positions):
            if p not in covered:
                out[p] = (p,)
        return [out[k] for k in sorted(out)]

    def block_count(self) -> int:
        covered = sum(len(b) for b in self.blocks)
        return len(self.blocks) + (self.n_positions - covered)

    def vertex_blocks(self, lat: Lattice) -> list[tuple[int, ...]]:
        """Non-singleton blocks as lattice vertex indices."""
        cyc = boundary_cycle(lat)
        return [tuple(lat.vertex_index(*cyc[p]) for p in blk) for blk in self.blocks]

    def to_json(self) -> str:
        return json.dumps(
            {"n": self.n, "l": self.l, "blocks": [list(b) for b in self.blocks]},
            sort_keys=True,
        )

    @staticmethod
    def from_json(text: str) -> "BoundaryCondition":
        d = json.loads(text)
        return BoundaryCondition(d["n"], d["l"], tuple(tuple(b) for b in d["blocks"]))


def make_free(lat: Lattice) -> BoundaryCondition:
    return BoundaryCondition(lat.n, lat.l, ())


def make_wired(lat: Lattice) -> BoundaryCondition:
    return BoundaryCondition(lat.n, lat.l, (tuple(range(2 * lat.n + 2 * lat.l)),))


def is_free(bc: BoundaryCondition) -> bool:
    return not bc.blocks


def is_wired(bc: BoundaryCondition) -> bool:
    return len(bc.blocks) == 1 and len(bc.blocks[0]) == bc.n_positions


def is_realizable(bc: BoundaryCondition) -> bool:
    """True iff the partition is non-crossing on the boundary cycle.

    Stack test on the linear order: visiting positions 0..B-1, every return to
    a block must find it on top of the stack.  Crossing on the cycle and
    crossing in any linearization of it coincide, so one pass suffices.
    """
    first = {}
    last = {}
    owner = {}
    for i, blk in enumerate(bc.blocks):
        first[i], last[i] = blk[0], blk[-1]
        for p in blk:
            owner[p] = i
    stack: list[int] = []
    for p in range(bc.n_positions):
        b = owner.get(p)
        if b is None:
            continue
        if p == first[b]:
            stack.append(b)
        elif not stack or stack[-1] != b:
            return False
        if p == last[b]:
            stack.pop()
    return True


# ---------------------------------------------------------------------------
# Annulus configurations and the realization gadget
# ---------------------------------------------------------------------------

@dataclass
class AnnulusConfig:
    """FK configuration on a padded box outside the inner lattice's edges.

    ``box`` is the full rectangle obtained by padding ``lat`` by ``pad`` on
    every side; global coordinate (x, y) sits at (x+pad, y+pad) in box
    coordinates.  ``open_`` covers every box edge, but only edges outside
    E(lat) (per the lattice's variant) may be open.
    """

    lat: Lattice
    pad: int
    box: Lattice
    open_: np.ndarray

    @staticmethod
    def empty(lat: Lattice, pad: int) -> "AnnulusConfig":
        box = build_rect(lat.n + 2 * pad, lat.l + 2 * pad, FULL)
        return AnnulusConfig(lat, pad, box, np.zeros(box.n_edges, dtype=bool))

    def box_vertex(self, x: int, y: int) -> int:
        """Box vertex index of a global-coordinate point."""
        return self.box.vertex_index(x + self.pad, y + self.pad)

    def box_edge(self, a: tuple[int, int], b: tuple[int, int]) -> int:
        p = self.pad
        return self.box.edge_index((a[0] + p, a[1] + p), (b[0] + p, b[1] + p))

    def inner_edge_mask(self) -> np.ndarray:
        """Box edges that belong to E(lat) (must stay closed)."""
        mask = np.zeros(self.box.n_edges, dtype=bool)
        for u, v in self.lat.edges:
            mask[self.box_edge(self.lat.vertex_xy(u), self.lat.vertex_xy(v))] = True
        return mask

    def annulus_edges(self) -> np.ndarray:
        return np.flatnonzero(~self.inner_edge_mask())

    def open_edge(self, a: tuple[int, int], b: tuple[int, int]) -> None:
        e = self.box_edge(a, b)
        self.open_[e] = True

    def validate(self) -> None:
        bad = self.open_ & self.inner_edge_mask()
        if bad.any():
            raise ValueError("annulus configuration opens an edge of E(lat)")


def _ring_cycle(lat: Lattice, j: int) -> list[tuple[int, int]]:
    """Vertices at L-inf distance j from the box, CCW from (-j,-j), global coords."""
    n, l = lat.n, lat.l
    out = [(x, -j) for x in range(-j, n + j)]
    out += [(n + j, y) for y in range(-j, l + j)]
    out += [(x, l + j) for x in range(n + j, -j, -1)]
    out += [(-j, y) for y in range(l + j, -j, -1)]
    return out


def _ring_projection(lat: Lattice, pos: int, j: int) -> tuple[int, int]:
    """Radial projection of boundary-cycle position ``pos`` onto ring j."""
    n, l = lat.n, lat.l
    x, y = boundary_cycle(lat)[pos]
    sx = -j if x == 0 else (n + j if x == n else x)
    sy = -j if y == 0 else (l + j if y == l else y)
    return sx, sy


def _arm_path(lat: Lattice, pos: int, h: int) -> list[tuple[int, int]]:
    """Lattice path from a boundary vertex out to its ring-h projection.

    Straight for side vertices; corner vertices take an L: first the leg away
    from the box along their side's outward direction, then along ring h to
    the ring corner.  Every vertex of the L stays at L-inf distance <= h, so
    arms never touch arcs routed at higher rings.
    """
    n, l = lat.n, lat.l
    x, y = boundary_cycle(lat)[pos]
    path = [(x, y)]
    if 0 < x < n:  # north/south side: straight vertical
        d = -1 if y == 0 else 1
        path += [(x, y + d * k) for k in range(1, h + 1)]
    elif 0 < y < l:  # east/west side: straight horizontal
        d = -1 if x == 0 else 1
        path += [(x + d * k, y) for k in range(1, h + 1)]
    else:  # corner: vertical leg then horizontal leg
        dy = -1 if y == 0 else 1
        dx = -1 if x == 0 else 1
        path += [(x, y + dy * k) for k in range(1, h + 1)]
        path += [(x + dx * k, y + dy * h) for k in range(1, h + 1)]
    return path


def block_heights(bc: BoundaryCondition) -> dict[int, int]:
    """Ring height per non-singleton block: 1 + max height nested inside.

    Nesting is interval containment of [min, max] spans in the linear order;
    an enclosing block must be routed strictly above everything it encloses
    so its arc clears their arms.
    """
    spans = [(blk[0], blk[-1]) for blk in bc.blocks]
    heights = [0] * len(spans)
    order = sorted(range(len(spans)), key=lambda i: spans[i][1] - spans[i][0])
    for i in order:
        lo, hi = spans[i]
        h = 1
        for k in order:
            if k == i or heights[k] == 0:
                continue
            klo, khi = spans[k]
            if lo < klo and khi < hi:
                h = max(h, heights[k] + 1)
        heights[i] = h
    return {i: heights[i] for i in range(len(spans))}


def realize(bc: BoundaryCondition, lat: Lattice) -> AnnulusConfig:
    """Annulus configuration whose induced partition equals ``bc`` exactly.

    Gadget per block: one arm per member vertex rising to the block's ring,
    joined by an arc along that ring between the extremal projections.  Ring
    heights follow nesting depth, so distinct blocks' gadgets are vertex
    disjoint and the round trip through :func:`induce_bc` is an identity.
    """
    if (bc.n, bc.l) != (lat.n, lat.l):
        raise ValueError("boundary condition and lattice dimensions differ")
    if not is_realizable(bc):
        raise ValueError("cannot realize a crossing boundary partition")
    heights = block_heights(bc)
    max_h = max(heights.values(), default=0)
    ann = AnnulusConfig.empty(lat, max_h + 2)

    for i, blk in enumerate(bc.blocks):
        h = heights[i]
        for pos in blk:
            path = _arm_path(lat, pos, h)
            for a, b in zip(path, path[1:]):
                ann.open_edge(a, b)
        ring = _ring_cycle(lat, h)
        ring_idx = {v: k for k, v in enumerate(ring)}
        lo = ring_idx[_ring_projection(lat, blk[0], h)]
        hi = ring_idx[_ring_projection(lat, blk[-1], h)]
        for k in range(lo, hi):
            ann.open_edge(ring[k], ring[k + 1])
    ann.validate()
    return ann


def induce_bc(ann: AnnulusConfig) -> BoundaryCondition:
    """Partition of the inner boundary by annulus connectivity."""
    ann.validate()
    uf = UnionFind(ann.box.n_vertices)
    ea = ann.box.edge_array
    for e in np.flatnonzero(ann.open_):
        uf.union(int(ea[e, 0]), int(ea[e, 1]))
    groups: dict[int, list[int]] = {}
    for pos, (x, y) in enumerate(boundary_cycle(ann.lat)):
        root = uf.find(ann.box_vertex(x, y))
        groups.setdefault(root, []).append(pos)
    blocks = tuple(tuple(g) for g in groups.values() if len(g) > 1)
    return BoundaryCondition(ann.lat.n, ann.lat.l, blocks)


def random_annulus(lat: Lattice, pad: int, p: float, rng: RngStream) -> AnnulusConfig:
    """Independent percolation at density p on the annulus edges (test oracle)."""
    ann = AnnulusConfig.empty(lat, pad)
    for e in ann.annulus_edges():
        if rng.uniform() < p:
            ann.open_[e] = True
    return ann


# ---------------------------------------------------------------------------
# Duality
# ---------------------------------------------------------------------------

def _crossing_primal_edge(a: tuple[int, int], b: tuple[int, int]):
    """Global primal edge crossed by a global dual edge (face coords)."""
    (ax, ay), (bx, by) = a, b
    if ay == by:  # dual horizontal -> primal vertical at column max(ax,bx)
        x = max(ax, bx)
        return (x, ay), (x, ay + 1)
    y = max(ay, by)  # dual vertical -> primal horizontal at row max
    return (ax, y), (ax + 1, y)


def dual_bc(bc: BoundaryCondition, lat: Lattice) -> BoundaryCondition:
    """Boundary condition induced on the dual rectangle.

    Computed operationally: realize ``bc`` outside the modified-variant box,
    complement the annulus configuration across the edge-crossing bijection of
    the padded plane, and read off the induced partition on the dual boundary.
    """
    if lat.variant != "modified":
        raise VariantError("dual_bc needs the modified edge-set variant")
    if not is_realizable(bc):
        raise ValueError("dual_bc requires a realizable boundary condition")
    ann = realize(bc, lat)
    dual_lat, _ = dual_lattice(lat)
    dual_ann = AnnulusConfig.empty(dual_lat, ann.pad)
    inner = dual_ann.inner_edge_mask()
    pd = dual_ann.pad
    for e in range(dual_ann.box.n_edges):
        if inner[e]:
            continue
        u, v = dual_ann.box.edges[e]
        ux, uy = dual_ann.box.vertex_xy(u)
        vx, vy = dual_ann.box.vertex_xy(v)
        a, b = _crossing_primal_edge((ux - pd, uy - pd), (vx - pd, vy - pd))
        dual_ann.open_[e] = not ann.open_[ann.box_edge(a, b)]
    return induce_bc(dual_ann)


def strip_corner_wirings(bc: BoundaryCondition, lat: Lattice) -> BoundaryCondition:
    """Canonical form modulo corner attachments on the modified edge set.

    Corner vertices of a modified-variant rectangle are isolated (no incident
    edges), so putting a corner into any block shifts c(S;xi) by a constant
    independent of S: the measure cannot see corner wirings.  This strips
    corners back to singletons, picking the canonical representative of each
    measure-equivalence class.
    """
    corners = set(corner_positions(lat))
    blocks = tuple(tuple(p for p in blk if p not in corners) for blk in bc.blocks)
    return BoundaryCondition(bc.n, bc.l, blocks)


def dual_bc_inverse(bc_star: BoundaryCondition, lat: Lattice) -> BoundaryCondition:
    """Inverse of :func:`dual_bc` under the primal/dual identification.

    ``bc_star`` lives on the full (n-1)-by-(l-1) dual of the modified ``lat``;
    the result lives on ``lat`` itself, in the canonical corner-stripped form
    (see :func:`strip_corner_wirings`; the raw complement construction can
    attach isolated corners to adjacent blocks, which the measure ignores).
    """
    if lat.variant != "modified":
        raise VariantError("dual_bc_inverse needs the modified primal lattice")
    dual_lat, _ = dual_lattice(lat)
    if (bc_star.n, bc_star.l) != (dual_lat.n, dual_lat.l):
        raise ValueError("bc_star dimensions do not match the dual lattice")
    dual_ann = realize(bc_star, dual_lat)
    ann = AnnulusConfig.empty(lat, dual_ann.pad)
    # Complement direction: a primal annulus edge is open unless the dual edge
    # crossing it is open; primal edges whose dual partner falls outside the
    # dual box count as crossed-by-closed (the gadget never reaches that far).
    ann.open_[~ann.inner_edge_mask()] = True
    inner_star = dual_ann.inner_edge_mask()
    pd = dual_ann.pad
    for e in np.flatnonzero(dual_ann.open_):
        if inner_star[e]:
            continue
        u, v = dual_ann.box.edges[e]
        ux, uy = dual_ann.box.vertex_xy(u)
        vx, vy = dual_ann.box.vertex_xy(v)
        a, b = _crossing_primal_edge((ux - pd, uy - pd), (vx - pd, vy - pd))
        ann.open_[ann.box_edge(a, b)] = False
    return strip_corner_wirings(induce_bc(ann), lat)


# ---------------------------------------------------------------------------
# Induced conditions on regions
# ---------------------------------------------------------------------------

def induced_region_bc(
    lat: Lattice,
    region: Region,
    bc: BoundaryCondition,
    outside_open: np.ndarray,
) -> list[tuple[int, ...]]:
    """Partition of the region's boundary vertices induced by outside data.

    ``outside_open`` is a bool vector over all lattice edges; only entries on
    E^c(region) are read.  Components of (open outside edges) + (bc wirings)
    partition the region boundary; singleton classes are omitted.  Returned
    blocks are tuples of lattice vertex indices.
    """
    uf = UnionFind(lat.n_vertices)
    for blk in bc.vertex_blocks(lat):
        for v in blk[1:]:
            uf.union(blk[0], v)
    ecomp = region.edge_complement_mask
    ea = lat.edge_array
    for e in np.flatnonzero(np.asarray(outside_open, dtype=bool) & ecomp):
        uf.union(int(ea[e, 0]), int(ea[e, 1]))
    groups: dict[int, list[int]] = {}
    for v in region.boundary_vertices():
        groups.setdefault(uf.find(v), []).append(v)
    return [tuple(g) for g in groups.values() if len(g) > 1]


# ---------------------------------------------------------------------------
# Localization, corner modification, partition distance
# ---------------------------------------------------------------------------

def localization(bc: BoundaryCondition, lat: Lattice) -> int:
    """max over classes of the smallest boundary-cycle arc containing it."""
    B = bc.n_positions
    best = 1 if bc.block_count() > len(bc.blocks) else 0
    for blk in bc.blocks:
        gaps = [blk[i + 1] - blk[i] for i in range(len(blk) - 1)]
        gaps.append(blk[0] + B - blk[-1])
        best = max(best, B - max(gaps) + 1)
    return best


def in_C_alpha(bc: BoundaryCondition, lat: Lattice, alpha: float) -> bool:
    return localization(bc, lat) <= alpha * float(np.log(lat.n))


def corner_free_modification(bc: BoundaryCondition, lat: Lattice, ell: int) -> BoundaryCondition:
    """Free every boundary vertex within cycle distance ell of a corner."""
    B = bc.n_positions
    corners = corner_positions(lat)
    def near(p):
        return any(min(abs(p - c), B - abs(p - c)) <= ell for c in corners)
    blocks = []
    for blk in bc.blocks:
        kept = tuple(p for p in blk if not near(p))
        if len(kept) > 1:
            blocks.append(kept)
    return BoundaryCondition(bc.n, bc.l, tuple(blocks))


def _as_partition(obj) -> list[tuple[int, ...]]:
    if isinstance(obj, BoundaryCondition):
        return obj.full_partition()
    return [tuple(sorted(b)) for b in obj]


def partition_distance(rho, rho_prime) -> int:
    """D(rho, rho') = difference of class counts, through the join if needed."""
    pa, pb = _as_partition(rho), _as_partition(rho_prime)
    ground = sorted({x for b in pa for x in b})
    if ground != sorted({x for b in pb for x in b}):
        raise ValueError("partition_distance needs partitions of the same set")
    idx = {x: i for i, x in enumerate(ground)}

    def canon(p):
        return {tuple(sorted(idx[x] for x in b)) for b in p}

    ca, cb = canon(pa), canon(pb)
    na, nb = len(ca), len(cb)

    def refines(fine, coarse):
        owner = {}
        for i, b in enumerate(coarse):
            for x in b:
                owner[x] = i
        return all(len({owner[x] for x in b}) == 1 for b in fine)

    if refines(ca, cb):
        return na - nb
    if refines(cb, ca):
        return nb - na
    uf = UnionFind(len(ground))
    for p in (ca, cb):
        for b in p:
            for x in b[1:]:
                uf.union(b[0], x)
    njoin = len({uf.find(i) for i in range(len(ground))})
    return na - njoin + nb - njoin


# ---------------------------------------------------------------------------
# Random generators (seeded; used by the oracle suites)
# ---------------------------------------------------------------------------

def random_noncrossing_bc(
    lat: Lattice,
    rng: RngStream,
    positions: list[int] | None = None,
    p_open: float = 0.35,
    p_join: float = 0.5,
    p_close: float = 0.5,
) -> BoundaryCondition:
    """Random non-crossing partition via a stack construction.

    Walking the allowed positions in cycle order with a stack of unfinished
    blocks reaches exactly the non-crossing partitions.  Not uniform; tuned
    for structural diversity (nesting, long arcs, singletons).
    """
    B = 2 * lat.n + 2 * lat.l
    pos_list = sorted(positions) if positions is not None else list(range(B))
    stack: list[list[int]] = []
    done: list[list[int]] = []
    for p in pos_list:
        if stack and rng.uniform() < p_join:
            stack[-1].append(p)
            if rng.uniform() < p_close:
                done.append(stack.pop())
        elif rng.uniform() < p_open:
            stack.append([p])
        # else singleton: implicit
    done.extend(stack)
    blocks = tuple(tuple(b) for b in done if len(b) > 1)
    return BoundaryCondition(lat.n, lat.l, blocks)


def north_positions(lat: Lattice, x_lo: int, x_hi: int) -> list[int]:
    """Cycle positions of north-row vertices with x in [x_lo, x_hi]."""
    n, l = lat.n, lat.l
    return [n + l + (n - x) for x in range(x_hi, x_lo - 1, -1)]
