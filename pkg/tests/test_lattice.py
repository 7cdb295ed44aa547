import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fkdyn.lattice import (
    FULL,
    MODIFIED,
    Region,
    VariantError,
    boundary_cycle,
    build_rect,
    corner_positions,
    dual_lattice,
)


def test_unit_square_counts():
    lat = build_rect(1, 1, FULL)
    assert lat.n_vertices == 4
    assert lat.n_edges == 4


def test_2x2_counts():
    lat = build_rect(2, 2, FULL)
    assert lat.n_vertices == 9
    assert lat.n_edges == 12


def test_2x2_modified_only_center_edges():
    lat = build_rect(2, 2, MODIFIED)
    assert lat.n_vertices == 9
    assert lat.n_edges == 4
    center = lat.vertex_index(1, 1)
    for u, v in lat.edges:
        assert center in (u, v)


def test_rejects_degenerate_dims():
    with pytest.raises(ValueError):
        build_rect(0, 3)
    with pytest.raises(ValueError):
        build_rect(3, 0)


@given(st.integers(1, 7), st.integers(1, 7))
def test_full_edge_count_formula(n, l):
    lat = build_rect(n, l, FULL)
    assert lat.n_edges == n * (l + 1) + l * (n + 1)
    assert lat.n_vertices == (n + 1) * (l + 1)


@given(st.integers(1, 7), st.integers(1, 7))
def test_edge_index_roundtrip(n, l):
    lat = build_rect(n, l, FULL)
    for e in range(lat.n_edges):
        a, b = lat.edge_vertices(e)
        assert lat.edge_index(a, b) == e
        assert lat.edge_index(b, a) == e


@given(st.integers(1, 7), st.integers(1, 7))
def test_vertex_index_roundtrip(n, l):
    lat = build_rect(n, l, FULL)
    for idx in range(lat.n_vertices):
        x, y = lat.vertex_xy(idx)
        assert lat.vertex_index(x, y) == idx


def test_every_edge_is_unit_length():
    lat = build_rect(4, 3, FULL)
    for e in range(lat.n_edges):
        (x1, y1), (x2, y2) = lat.edge_vertices(e)
        assert abs(x1 - x2) + abs(y1 - y2) == 1


def test_boundary_cycle_unit_square():
    lat = build_rect(1, 1)
    assert boundary_cycle(lat) == [(0, 0), (1, 0), (1, 1), (0, 1)]


def test_boundary_cycle_lambda2():
    lat = build_rect(2, 2)
    cyc = boundary_cycle(lat)
    assert len(cyc) == 8
    assert cyc[0] == (0, 0)
    assert cyc[-1] == (0, 1)


def test_boundary_cycle_thin_strip_is_everything():
    lat = build_rect(3, 1)
    cyc = boundary_cycle(lat)
    assert len(cyc) == 8
    assert len(set(cyc)) == lat.n_vertices


@given(st.integers(1, 8), st.integers(1, 8))
def test_boundary_cycle_length_and_distinctness(n, l):
    lat = build_rect(n, l)
    cyc = boundary_cycle(lat)
    assert len(cyc) == 2 * n + 2 * l
    assert len(set(cyc)) == len(cyc)
    for (x1, y1), (x2, y2) in zip(cyc, cyc[1:] + cyc[:1]):
        assert abs(x1 - x2) + abs(y1 - y2) == 1


def test_corner_positions_match_cycle():
    lat = build_rect(5, 3)
    cyc = boundary_cycle(lat)
    sw, se, ne, nw = corner_positions(lat)
    assert cyc[sw] == (0, 0)
    assert cyc[se] == (5, 0)
    assert cyc[ne] == (5, 3)
    assert cyc[nw] == (0, 3)


def test_dual_of_modified_3x3():
    lat = build_rect(3, 3, MODIFIED)
    dual, dual_of = dual_lattice(lat)
    assert (dual.n, dual.l, dual.variant) == (2, 2, FULL)
    assert lat.n_edges == 12 and dual.n_edges == 12
    assert sorted(dual_of) == list(range(12))


def test_dual_of_modified_2x2():
    lat = build_rect(2, 2, MODIFIED)
    dual, dual_of = dual_lattice(lat)
    assert (dual.n, dual.l) == (1, 1)
    assert lat.n_edges == 4 and dual.n_edges == 4


def test_dual_rejects_full_variant():
    with pytest.raises(VariantError):
        dual_lattice(build_rect(2, 2, FULL))


@settings(max_examples=20)
@given(st.integers(3, 7), st.integers(3, 7))
def test_dual_edges_cross(n, l):
    # each dual edge must geometrically cross its primal edge at midpoints
    lat = build_rect(n, l, MODIFIED)
    dual, dual_of = dual_lattice(lat)
    for e in range(lat.n_edges):
        (x1, y1), (x2, y2) = lat.edge_vertices(e)
        (a1, b1), (a2, b2) = dual.edge_vertices(dual_of[e])
        pm = ((x1 + x2) / 2, (y1 + y2) / 2)
        dm = ((a1 + a2) / 2 + 0.5, (b1 + b2) / 2 + 0.5)
        assert pm == dm


def test_region_edge_split():
    lat = build_rect(3, 3, FULL)
    reg = Region.from_box(lat, 1, 2, 1, 2)
    em = reg.edge_mask
    assert em.sum() == 4
    assert (em | reg.edge_complement_mask).all()
    assert not (em & reg.edge_complement_mask).any()


def test_region_boundary_of_interior_box():
    lat = build_rect(4, 4, FULL)
    reg = Region.from_box(lat, 1, 3, 1, 3)
    bd = set(reg.boundary_vertices())
    assert lat.vertex_index(2, 2) not in bd
    assert lat.vertex_index(1, 1) in bd
    assert len(bd) == 8


def test_region_of_whole_lattice_boundary_is_lattice_boundary():
    lat = build_rect(3, 2, FULL)
    reg = Region.everything(lat)
    assert len(reg.boundary_vertices()) == 2 * 3 + 2 * 2
