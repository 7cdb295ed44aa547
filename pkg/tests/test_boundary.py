import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fkdyn.boundary import (
    BoundaryCondition,
    corner_free_modification,
    dual_bc,
    dual_bc_inverse,
    in_C_alpha,
    induce_bc,
    induced_region_bc,
    is_free,
    is_realizable,
    is_wired,
    localization,
    make_free,
    make_wired,
    partition_distance,
    random_annulus,
    random_noncrossing_bc,
    realize,
    strip_corner_wirings,
)
from fkdyn.boundary import UnionFind
from fkdyn.lattice import MODIFIED, Region, build_rect
from fkdyn.rng import RngStream


def test_free_and_wired_shapes():
    lat = build_rect(1, 1)
    assert make_free(lat).blocks == ()
    assert make_free(lat).block_count() == 4
    w = make_wired(lat)
    assert len(w.blocks) == 1 and len(w.blocks[0]) == 4
    assert make_wired(build_rect(2, 2)).blocks[0] == tuple(range(8))


def test_partition_validation():
    with pytest.raises(ValueError):
        BoundaryCondition(1, 1, ((0, 1), (1, 2)))
    with pytest.raises(ValueError):
        BoundaryCondition(1, 1, ((0, 9),))


def test_crossing_detected():
    bc = BoundaryCondition(2, 2, ((0, 2), (1, 3)))
    assert not is_realizable(bc)


def test_nested_and_disjoint_arcs_ok():
    bc = BoundaryCondition(2, 2, ((0, 7), (1, 2)))
    assert is_realizable(bc)


def test_free_always_realizable():
    assert is_realizable(make_free(build_rect(5, 3)))


def test_realize_free_is_all_closed():
    lat = build_rect(2, 2)
    ann = realize(make_free(lat), lat)
    assert not ann.open_.any()
    assert is_free(induce_bc(ann))


def test_realize_wired_unit_square():
    lat = build_rect(2, 2)
    ann = realize(make_wired(lat), lat)
    assert is_wired(induce_bc(ann))


def test_induce_all_open_annulus_is_wired():
    lat = build_rect(2, 3)
    ann = random_annulus(lat, 2, 1.1, RngStream(0))  # p > 1 opens everything
    assert is_wired(induce_bc(ann))


@pytest.mark.parametrize("seed", range(40))
def test_realize_induce_roundtrip_random(seed):
    lat = build_rect(4, 3)
    bc = random_noncrossing_bc(lat, RngStream(seed))
    assert is_realizable(bc)
    assert induce_bc(realize(bc, lat)) == bc


def test_roundtrip_oracle_thousand():
    # acceptance criterion 9 at unit scale: 1000 random non-crossing partitions
    lat = build_rect(5, 4)
    rng = RngStream(20240917)
    for i in range(1000):
        bc = random_noncrossing_bc(lat, rng.split(i))
        assert induce_bc(realize(bc, lat)) == bc


def test_percolation_annuli_induce_realizable():
    lat = build_rect(4, 4)
    rng = RngStream(7)
    for i in range(300):
        ann = random_annulus(lat, 3, 0.5, rng.split(i))
        assert is_realizable(induce_bc(ann))


def _all_noncrossing_partitions(B):
    """Enumerate non-crossing partitions of [0,B) via the stack grammar."""
    out = []

    def rec(p, stack, done):
        if p == B:
            if not stack:
                out.append([blk for blk in done if len(blk) > 1])
            return
        # open a new block at p (to be closed later)
        rec(p + 1, stack + [[p]], done)
        # singleton
        rec(p + 1, stack, done + [[p]])
        if stack:
            top = stack[-1] + [p]
            # join top and keep open
            rec(p + 1, stack[:-1] + [top], done)
            # join top and close
            rec(p + 1, stack[:-1], done + [top])

    def rec_close(items):
        pass

    rec(0, [], [])
    return out


def test_exhaustive_roundtrip_small_cycles():
    # every non-crossing partition of the boundary cycle, up to |cycle| = 8
    for n, l in [(1, 1), (2, 1), (2, 2)]:
        lat = build_rect(n, l)
        B = 2 * n + 2 * l
        seen = set()
        for blocks in _all_noncrossing_partitions(B):
            bc = BoundaryCondition(n, l, tuple(tuple(b) for b in blocks))
            if bc in seen:
                continue
            seen.add(bc)
            assert is_realizable(bc)
            assert induce_bc(realize(bc, lat)) == bc
        # Catalan numbers 4, 14, 1430
        assert len(seen) == {4: 14, 6: 132, 8: 1430}[B]


def test_dual_of_free_is_wired():
    lat = build_rect(3, 3, MODIFIED)
    assert is_wired(dual_bc(make_free(lat), lat))
    assert is_free(dual_bc(make_wired(lat), lat))


@pytest.mark.parametrize("seed", range(25))
def test_dual_involution(seed):
    # corners of the modified lattice are isolated vertices, so partitions are
    # compared in the canonical corner-stripped form (measure equivalence)
    lat = build_rect(4, 4, MODIFIED)
    bc = random_noncrossing_bc(lat, RngStream(1000 + seed))
    back = dual_bc_inverse(dual_bc(bc, lat), lat)
    assert back == strip_corner_wirings(bc, lat)


@pytest.mark.parametrize("seed", range(15))
def test_dual_involution_reverse_direction(seed):
    lat = build_rect(4, 3, MODIFIED)
    bc = random_noncrossing_bc(lat, RngStream(4000 + seed))
    d = dual_bc(bc, lat)
    assert dual_bc(dual_bc_inverse(d, lat), lat) == d


def test_induced_region_interior_wired():
    lat = build_rect(4, 4)
    reg = Region.from_box(lat, 1, 3, 1, 3)
    outside = np.ones(lat.n_edges, dtype=bool)
    blocks = induced_region_bc(lat, reg, make_free(lat), outside)
    assert len(blocks) == 1
    assert set(blocks[0]) == set(reg.boundary_vertices())


def test_induced_region_free_outside_free_bc():
    lat = build_rect(4, 4)
    reg = Region.from_box(lat, 1, 3, 1, 3)
    outside = np.zeros(lat.n_edges, dtype=bool)
    assert induced_region_bc(lat, reg, make_free(lat), outside) == []


@pytest.mark.parametrize("seed", range(20))
def test_induced_region_matches_bfs_oracle(seed):
    lat = build_rect(5, 5)
    reg = Region.from_box(lat, 1, 3, 1, 3)
    rng = RngStream(3000 + seed)
    bc = random_noncrossing_bc(lat, rng.split(0))
    outside = np.array([rng.uniform() < 0.5 for _ in range(lat.n_edges)])
    got = {frozenset(b) for b in induced_region_bc(lat, reg, bc, outside)}

    # oracle: independent union-find over the augmented outside graph
    uf = UnionFind(lat.n_vertices)
    ea = lat.edge_array
    ecomp = reg.edge_complement_mask
    for e in range(lat.n_edges):
        if outside[e] and ecomp[e]:
            uf.union(int(ea[e, 0]), int(ea[e, 1]))
    for blk in bc.vertex_blocks(lat):
        for v in blk[1:]:
            uf.union(blk[0], v)
    byroot = {}
    for v in reg.boundary_vertices():
        byroot.setdefault(uf.find(v), []).append(v)
    want = {frozenset(g) for g in byroot.values() if len(g) > 1}
    assert got == want


def test_localization_values():
    lat = build_rect(8, 8)
    assert localization(make_free(lat), lat) == 1
    assert localization(make_wired(lat), lat) == 32
    # single block {(1,l),(4,l)}: north positions of x=1 and x=4
    pos = [8 + 8 + (8 - 4), 8 + 8 + (8 - 1)]
    bc = BoundaryCondition(8, 8, (tuple(sorted(pos)),))
    assert localization(bc, lat) == 4


def test_in_C_alpha():
    lat = build_rect(8, 8)
    assert in_C_alpha(make_free(lat), lat, 1.0)
    assert not in_C_alpha(make_wired(lat), lat, 3.0)  # 32 > 3 log 8


def test_corner_free_modification_free_unchanged():
    lat = build_rect(8, 8)
    assert corner_free_modification(make_free(lat), lat, 2) == make_free(lat)


def test_corner_free_modification_wired():
    # every vertex within cycle distance 1 of a corner (corners + 2 neighbours
    # each = 12 vertices) becomes a singleton; the other 20 stay one block
    lat = build_rect(8, 8)
    out = corner_free_modification(make_wired(lat), lat, 1)
    assert len(out.blocks) == 1
    assert len(out.blocks[0]) == 32 - 12
    assert out.block_count() == 1 + 12


@pytest.mark.parametrize("seed", range(30))
def test_corner_free_modification_preserves_realizability(seed):
    lat = build_rect(6, 4)
    bc = random_noncrossing_bc(lat, RngStream(500 + seed))
    assert is_realizable(corner_free_modification(bc, lat, 2))


def test_partition_distance_examples():
    assert partition_distance([(1,), (2,), (3,), (4,)], [(1, 2, 3, 4)]) == 3
    assert partition_distance([(1, 2), (3, 4)], [(1, 2), (3, 4)]) == 0
    assert partition_distance([(1, 2), (3,), (4,)], [(1,), (2,), (3, 4)]) == 2


@given(st.integers(0, 10_000))
def test_partition_distance_symmetric_and_zero_iff_equal(seed):
    lat = build_rect(3, 2)
    rng = RngStream(seed)
    a = random_noncrossing_bc(lat, rng.split(0))
    b = random_noncrossing_bc(lat, rng.split(1))
    dab = partition_distance(a, b)
    assert dab == partition_distance(b, a)
    assert (dab == 0) == (a == b)


def test_json_roundtrip():
    lat = build_rect(3, 2)
    bc = random_noncrossing_bc(lat, RngStream(99))
    assert BoundaryCondition.from_json(bc.to_json()) == bc
