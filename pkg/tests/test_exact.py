import math

import numpy as np
import pytest

from fkdyn.boundary import make_free, make_wired, random_noncrossing_bc
from fkdyn.exact import (
    ExactChain,
    TinyGraph,
    block_transition_matrix,
    component_table,
    conductance,
    cut_mask,
    enumerate_pi,
    fk_transition_matrix,
    largest_component_table,
    mhb_transition_matrix,
    min_conductance,
    reversibility_error,
    spectral_gap,
    stationarity_error,
    tv_mixing_time,
)
from fkdyn.lattice import MODIFIED, build_rect
from fkdyn.rng import RngStream
from fkdyn.state import Params, component_count, is_cut_edge, log_weight

P12Q2 = Params(0.5, 2.0)


def bitconfig(s, E):
    return np.array([(s >> i) & 1 for i in range(E)], dtype=bool)


def test_single_edge_pi():
    g = TinyGraph.single_edge()
    pi = enumerate_pi(g, P12Q2)
    # isolated edge is always a cut-edge: pi(open) = p_hat = 1/3
    assert pi[1] == pytest.approx(1.0 / 3.0, abs=1e-14)
    assert pi[0] == pytest.approx(2.0 / 3.0, abs=1e-14)


def test_q1_is_product_measure():
    lat = build_rect(2, 1)
    g = TinyGraph.from_lattice(lat, make_free(lat))
    params = Params(0.37, 1.0)
    pi = enumerate_pi(g, params)
    for s in range(g.n_states):
        k = bin(s).count("1")
        assert pi[s] == pytest.approx(params.p ** k * (1 - params.p) ** (g.n_edges - k), rel=1e-12)


def test_lambda1_wired_pi_empty():
    lat = build_rect(1, 1)
    g = TinyGraph.from_lattice(lat, make_wired(lat))
    pi = enumerate_pi(g, P12Q2)
    # pi(0) proportional to (1/16) * q^c(empty; wired) = (1/16) * 2
    logs = []
    for s in range(16):
        logs.append(log_weight(lat, bitconfig(s, 4), make_wired(lat), P12Q2))
    w = np.exp(np.array(logs) - max(logs))
    assert pi[0] == pytest.approx(w[0] / w.sum(), rel=1e-12)


def test_component_table_matches_reference():
    lat = build_rect(2, 2)
    for bc in [make_free(lat), make_wired(lat), random_noncrossing_bc(lat, RngStream(5))]:
        g = TinyGraph.from_lattice(lat, bc)
        c = component_table(g)
        for s in [0, 1, 37, 1023, 4095, 2048]:
            assert c[s] == component_count(lat, bitconfig(s, 12), bc)


def test_cut_mask_matches_reference():
    lat = build_rect(2, 1)
    bc = make_wired(lat)
    g = TinyGraph.from_lattice(lat, bc)
    c = component_table(g)
    for e in range(g.n_edges):
        cm = cut_mask(g, e, c)
        for s in range(g.n_states):
            assert cm[s] == is_cut_edge(lat, bitconfig(s, g.n_edges), bc, e)


def test_single_edge_fk_matrix():
    g = TinyGraph.single_edge()
    chain = fk_transition_matrix(g, P12Q2)
    ph = P12Q2.p_hat
    expect = np.array([[1 - ph, ph], [1 - ph, ph]])
    assert np.allclose(chain.dense(), expect, atol=1e-15)
    assert spectral_gap(chain) == pytest.approx(1.0, abs=1e-12)
    assert tv_mixing_time(chain) == 1


@pytest.mark.parametrize("maker", ["free", "wired", "random"])
def test_fk_detailed_balance_unit_square(maker):
    lat = build_rect(1, 1)
    bc = {
        "free": make_free(lat),
        "wired": make_wired(lat),
        "random": random_noncrossing_bc(lat, RngStream(3)),
    }[maker]
    chain = fk_transition_matrix(TinyGraph.from_lattice(lat, bc), Params(0.4, 2.5))
    assert stationarity_error(chain) < 1e-14
    assert reversibility_error(chain) < 1e-14


def test_mhb_and_block_stationarity():
    lat = build_rect(2, 1)
    g = TinyGraph.from_lattice(lat, make_free(lat))
    params = Params(0.3, 1.5)
    L = [0, 1]
    mhb = mhb_transition_matrix(g, params, L)
    assert stationarity_error(mhb) < 1e-13
    assert reversibility_error(mhb) < 1e-13
    blk = block_transition_matrix(g, params, [[0, 1, 2], [2, 3, 4, 5, 6]])
    assert stationarity_error(blk) < 1e-13
    assert reversibility_error(blk) < 1e-13


def test_block_single_block_rows_are_pi():
    lat = build_rect(1, 1)
    g = TinyGraph.from_lattice(lat, make_free(lat))
    params = Params(0.6, 3.0)
    chain = block_transition_matrix(g, params, [list(range(4))])
    assert np.allclose(chain.dense(), np.tile(chain.pi, (chain.n_states, 1)), atol=1e-14)
    assert spectral_gap(chain) == pytest.approx(1.0, abs=1e-10)


def test_mhb_L_empty_resamples_everything():
    lat = build_rect(1, 1)
    g = TinyGraph.from_lattice(lat, make_free(lat))
    chain = mhb_transition_matrix(g, Params(0.5, 2.0), [])
    assert np.allclose(chain.dense(), np.tile(chain.pi, (chain.n_states, 1)), atol=1e-14)


def test_mhb_L_everything_equals_fk():
    lat = build_rect(1, 1)
    g = TinyGraph.from_lattice(lat, make_free(lat))
    params = Params(0.5, 2.0)
    mhb = mhb_transition_matrix(g, params, range(4))
    fk = fk_transition_matrix(g, params)
    assert np.allclose(mhb.dense(), fk.dense(), atol=1e-14)


def test_block_requires_cover():
    lat = build_rect(1, 1)
    g = TinyGraph.from_lattice(lat, make_free(lat))
    with pytest.raises(ValueError):
        block_transition_matrix(g, Params(0.5, 2.0), [[0, 1]])


def test_gap_zero_for_reducible_control():
    # block-diagonal fixture: two disconnected copies of the one-edge chain
    ph = 1.0 / 3.0
    P = np.zeros((4, 4))
    P[:2, :2] = [[1 - ph, ph], [1 - ph, ph]]
    P[2:, 2:] = [[1 - ph, ph], [1 - ph, ph]]
    pi = np.array([1 - ph, ph, 1 - ph, ph]) / 2.0
    chain = ExactChain(TinyGraph.single_edge(), P12Q2, pi, P, "fixture")
    assert spectral_gap(chain) == pytest.approx(0.0, abs=1e-12)


def test_gap_regression_unit_square_free():
    lat = build_rect(1, 1)
    chain = fk_transition_matrix(TinyGraph.from_lattice(lat, make_free(lat)), P12Q2)
    # frozen from this oracle (eigenvalue computation), regression anchor
    assert spectral_gap(chain) == pytest.approx(0.22980073411155588, abs=1e-12)


def test_single_edge_conductance_of_empty_state():
    g = TinyGraph.single_edge()
    chain = fk_transition_matrix(g, P12Q2)
    assert conductance(chain, [0]) == pytest.approx(P12Q2.p_hat, abs=1e-15)


def test_exhaustive_min_conductance_cheeger_unit_square():
    lat = build_rect(1, 1)
    for bc in [make_free(lat), make_wired(lat)]:
        for params in [Params(0.3, 1.5), Params(0.5, 2.0)]:
            chain = fk_transition_matrix(TinyGraph.from_lattice(lat, bc), params)
            gap = spectral_gap(chain)
            phi = min_conductance(chain)
            assert phi * phi / 2.0 <= gap + 1e-12
            assert gap <= 2.0 * phi + 1e-12


def test_gap_tmix_sandwich_small():
    lat = build_rect(2, 1)
    for bc in [make_free(lat), make_wired(lat)]:
        chain = fk_transition_matrix(TinyGraph.from_lattice(lat, bc), Params(0.4, 2.0))
        gap = spectral_gap(chain)
        tmix = tv_mixing_time(chain)
        mu_min = chain.pi.min()
        assert 1.0 / gap - 1.0 <= tmix
        assert tmix <= math.log(2.0 * math.e / mu_min) / gap


def test_tmix_submultiplicativity():
    lat = build_rect(2, 1)
    chain = fk_transition_matrix(TinyGraph.from_lattice(lat, make_free(lat)), Params(0.4, 2.0))
    tmix = tv_mixing_time(chain)
    for eps in (0.1, 0.01):
        t_eps = tv_mixing_time(chain, eps=eps)
        assert t_eps <= math.ceil(math.log2(1.0 / eps)) * tmix


def test_boundary_modification_bound():
    # q^{-2D} pi' <= pi <= q^{2D} pi' entrywise
    from fkdyn.boundary import partition_distance

    lat = build_rect(2, 1)
    params = Params(0.45, 2.0)
    rng = RngStream(11)
    for i in range(10):
        a = random_noncrossing_bc(lat, rng.split(2 * i))
        b = random_noncrossing_bc(lat, rng.split(2 * i + 1))
        D = partition_distance(a, b)
        pa = enumerate_pi(TinyGraph.from_lattice(lat, a), params)
        pb = enumerate_pi(TinyGraph.from_lattice(lat, b), params)
        bound = params.q ** (2 * D)
        assert (pa <= bound * pb + 1e-12).all()
        assert (pa >= pb / bound - 1e-12).all()


def test_largest_component_table():
    g = TinyGraph.complete(3)
    lc = largest_component_table(g)
    assert lc[0] == 1
    assert lc[0b111] == 3
    assert lc[0b001] == 2
