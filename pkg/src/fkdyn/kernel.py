"""Hot loops: connectivity queries and chain evolution, numba-compiled.

The dynamics spends essentially all its time deciding whether the endpoints
of a proposed edge are connected without it.  The kernel runs a bidirectional
BFS over open edges of the contracted graph (boundary blocks and any fixed
open outside edges are pre-merged into super-vertices), expanding the smaller
frontier, so each query costs about the smaller of the two cluster sizes.

Counter-based randomness mirrors :mod:`fkdyn.rng` bit for bit: step t of a
run consumes counters (2t, 2t+1) of its stream key, and coupling-from-the-
past reuses the counters of earlier epochs by indexing steps from time 0
backwards.  All kernels are deterministic functions of (arrays, key).
"""

from __future__ import annotations

import numpy as np
from numba import njit

U64 = np.uint64
_GOLDEN = U64(0x9E3779B97F4A7C15)
_M1 = U64(0xBF58476D1CE4E5B9)
_M2 = U64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0


@njit(cache=True, inline="always")
def _u01(key, ctr):
    z = key + (ctr + U64(1)) * _GOLDEN
    z = (z ^ (z >> U64(30))) * _M1
    z = (z ^ (z >> U64(27))) * _M2
    z = z ^ (z >> U64(31))
    return (z >> U64(11)) * _INV53


@njit(cache=True)
def kernel_uniform(key, ctr):  # exposed for the rng-equivalence test
    return _u01(U64(key), U64(ctr))


@njit(cache=True, inline="always")
def _connected_excl(indptr, adj_v, adj_e, open_, excl, src, dst,
                    visit_a, visit_b, queue_a, queue_b, stamp):
    """Bidirectional BFS over open edges, ignoring edge ``excl``."""
    if src == dst:
        return True
    visit_a[src] = stamp
    visit_b[dst] = stamp
    queue_a[0] = src
    queue_b[0] = dst
    ha, ta = 0, 1
    hb, tb = 0, 1
    while ha < ta and hb < tb:
        if ta - ha <= tb - hb:
            u = queue_a[ha]
            ha += 1
            for k in range(indptr[u], indptr[u + 1]):
                e = adj_e[k]
                if e == excl or not open_[e]:
                    continue
                v = adj_v[k]
                if visit_b[v] == stamp:
                    return True
                if visit_a[v] != stamp:
                    visit_a[v] = stamp
                    queue_a[ta] = v
                    ta += 1
        else:
            u = queue_b[hb]
            hb += 1
            for k in range(indptr[u], indptr[u + 1]):
                e = adj_e[k]
                if e == excl or not open_[e]:
                    continue
                v = adj_v[k]
                if visit_a[v] == stamp:
                    return True
                if visit_b[v] != stamp:
                    visit_b[v] = stamp
                    queue_b[tb] = v
                    tb += 1
    return False


@njit(cache=True)
def connectivity_query(indptr, adj_v, adj_e, open_, excl, src, dst):
    n = indptr.shape[0] - 1
    va = np.zeros(n, dtype=np.int64)
    vb = np.zeros(n, dtype=np.int64)
    qa = np.empty(n, dtype=np.int32)
    qb = np.empty(n, dtype=np.int32)
    return _connected_excl(indptr, adj_v, adj_e, open_, excl, src, dst, va, vb, qa, qb, 1)


@njit(cache=True)
def glauber_run(indptr, adj_v, adj_e, eu, ev, open_, p, phat, key, ctr0, steps):
    """Evolve one chain in place for ``steps`` heat-bath updates."""
    n = indptr.shape[0] - 1
    nE = eu.shape[0]
    va = np.zeros(n, dtype=np.int64)
    vb = np.zeros(n, dtype=np.int64)
    qa = np.empty(n, dtype=np.int32)
    qb = np.empty(n, dtype=np.int32)
    stamp = np.int64(0)
    key = U64(key)
    for t in range(steps):
        c = U64(ctr0) + U64(2) * U64(t)
        e = np.int64(_u01(key, c) * nE)
        if e >= nE:
            e = nE - 1
        r = _u01(key, c + U64(1))
        stamp += 1
        cut = not _connected_excl(indptr, adj_v, adj_e, open_, e, eu[e], ev[e],
                                  va, vb, qa, qb, stamp)
        open_[e] = r < (phat if cut else p)
    return steps


@njit(cache=True)
def coupled_run(indptr, adj_v, adj_e, eu, ev, x, y, p, phat, key, ctr0,
                max_steps, check_order):
    """Identity-coupled pair; returns (meeting step or -1, order violations).

    The meeting step is the number of updates performed when the two
    configurations first agree on every edge; once met they stay together so
    the remaining steps need not run.
    """
    n = indptr.shape[0] - 1
    nE = eu.shape[0]
    va = np.zeros(n, dtype=np.int64)
    vb = np.zeros(n, dtype=np.int64)
    qa = np.empty(n, dtype=np.int32)
    qb = np.empty(n, dtype=np.int32)
    stamp = np.int64(0)
    key = U64(key)
    violations = 0
    D = 0
    for e in range(nE):
        if x[e] != y[e]:
            D += 1
    if D == 0:
        return 0, 0
    for t in range(max_steps):
        c = U64(ctr0) + U64(2) * U64(t)
        e = np.int64(_u01(key, c) * nE)
        if e >= nE:
            e = nE - 1
        r = _u01(key, c + U64(1))
        stamp += 1
        cut_x = not _connected_excl(indptr, adj_v, adj_e, x, e, eu[e], ev[e],
                                    va, vb, qa, qb, stamp)
        stamp += 1
        cut_y = not _connected_excl(indptr, adj_v, adj_e, y, e, eu[e], ev[e],
                                    va, vb, qa, qb, stamp)
        nx = r < (phat if cut_x else p)
        ny = r < (phat if cut_y else p)
        if x[e] != y[e]:
            D -= 1
        x[e] = nx
        y[e] = ny
        if nx != ny:
            D += 1
        if check_order and nx and not ny:
            violations += 1
        if D == 0:
            return t + 1, violations
    return -1, violations


@njit(cache=True)
def _cftp_epoch(indptr, adj_v, adj_e, eu, ev, top, bot, p, phat, key, T):
    """Run the coupled extremal pair from time -T to 0; returns disagreements."""
    n = indptr.shape[0] - 1
    nE = eu.shape[0]
    va = np.zeros(n, dtype=np.int64)
    vb = np.zeros(n, dtype=np.int64)
    qa = np.empty(n, dtype=np.int32)
    qb = np.empty(n, dtype=np.int32)
    stamp = np.int64(0)
    key = U64(key)
    D = 0
    for e in range(nE):
        if top[e] != bot[e]:
            D += 1
    for tt in range(T, 0, -1):  # absolute time -tt; counters fixed per time
        c = U64(2) * (U64(tt) - U64(1))
        e = np.int64(_u01(key, c) * nE)
        if e >= nE:
            e = nE - 1
        r = _u01(key, c + U64(1))
        if D > 0:
            stamp += 1
            cut_t = not _connected_excl(indptr, adj_v, adj_e, top, e, eu[e], ev[e],
                                        va, vb, qa, qb, stamp)
            stamp += 1
            cut_b = not _connected_excl(indptr, adj_v, adj_e, bot, e, eu[e], ev[e],
                                        va, vb, qa, qb, stamp)
            nt = r < (phat if cut_t else p)
            nb = r < (phat if cut_b else p)
            if top[e] != bot[e]:
                D -= 1
            top[e] = nt
            bot[e] = nb
            if nt != nb:
                D += 1
        else:  # coalesced: both chains evolve identically
            stamp += 1
            cut = not _connected_excl(indptr, adj_v, adj_e, top, e, eu[e], ev[e],
                                      va, vb, qa, qb, stamp)
            nt = r < (phat if cut else p)
            top[e] = nt
            bot[e] = nt
    return D


@njit(cache=True)
def cftp_run(indptr, adj_v, adj_e, eu, ev, p, phat, key, T0, max_epochs):
    """Monotone CFTP with doubling epochs and reused randomness.

    Returns (ok, config, total_steps); ok = 0 means the epoch cap was hit.
    """
    nE = eu.shape[0]
    top = np.empty(nE, dtype=np.bool_)
    bot = np.empty(nE, dtype=np.bool_)
    T = T0
    total = 0
    for _ in range(max_epochs):
        for e in range(nE):
            top[e] = True
            bot[e] = False
        D = _cftp_epoch(indptr, adj_v, adj_e, eu, ev, top, bot, p, phat, key, T)
        total += T
        if D == 0:
            return 1, top, total
        T *= 2
    return 0, top, total


@njit(cache=True)
def cftp_pair_run(indptr0, adj_v0, adj_e0, eu0, ev0,
                  indptr1, adj_v1, adj_e1, eu1, ev1,
                  p, phat, key, T0, max_epochs):
    """CFTP for two systems on the same edge list with shared randomness.

    Used by the spatial-mixing estimator: system 0 and 1 differ only in their
    vertex contraction (e.g. free vs wired outside).  Both extremal pairs see
    the same (edge, threshold) sequence, so for ordered contractions the two
    returned samples are a monotone coupling.  Returns (ok, cfg0, cfg1, steps).
    """
    nE = eu0.shape[0]
    n0 = indptr0.shape[0] - 1
    n1 = indptr1.shape[0] - 1
    top0 = np.empty(nE, dtype=np.bool_)
    bot0 = np.empty(nE, dtype=np.bool_)
    top1 = np.empty(nE, dtype=np.bool_)
    bot1 = np.empty(nE, dtype=np.bool_)
    va0 = np.zeros(n0, dtype=np.int64)
    vb0 = np.zeros(n0, dtype=np.int64)
    qa0 = np.empty(n0, dtype=np.int32)
    qb0 = np.empty(n0, dtype=np.int32)
    va1 = np.zeros(n1, dtype=np.int64)
    vb1 = np.zeros(n1, dtype=np.int64)
    qa1 = np.empty(n1, dtype=np.int32)
    qb1 = np.empty(n1, dtype=np.int32)
    key = U64(key)
    T = T0
    total = 0
    stamp0 = np.int64(0)
    stamp1 = np.int64(0)
    for _ in range(max_epochs):
        for e in range(nE):
            top0[e] = True
            bot0[e] = False
            top1[e] = True
            bot1[e] = False
        D0 = nE
        D1 = nE
        for tt in range(T, 0, -1):
            c = U64(2) * (U64(tt) - U64(1))
            e = np.int64(_u01(key, c) * nE)
            if e >= nE:
                e = nE - 1
            r = _u01(key, c + U64(1))
            if D0 > 0:
                stamp0 += 1
                cut_t = not _connected_excl(indptr0, adj_v0, adj_e0, top0, e, eu0[e], ev0[e],
                                            va0, vb0, qa0, qb0, stamp0)
                stamp0 += 1
                cut_b = not _connected_excl(indptr0, adj_v0, adj_e0, bot0, e, eu0[e], ev0[e],
                                            va0, vb0, qa0, qb0, stamp0)
                nt = r < (phat if cut_t else p)
                nb = r < (phat if cut_b else p)
                if top0[e] != bot0[e]:
                    D0 -= 1
                top0[e] = nt
                bot0[e] = nb
                if nt != nb:
                    D0 += 1
            else:
                stamp0 += 1
                cut = not _connected_excl(indptr0, adj_v0, adj_e0, top0, e, eu0[e], ev0[e],
                                          va0, vb0, qa0, qb0, stamp0)
                nt = r < (phat if cut else p)
                top0[e] = nt
                bot0[e] = nt
            if D1 > 0:
                stamp1 += 1
                cut_t = not _connected_excl(indptr1, adj_v1, adj_e1, top1, e, eu1[e], ev1[e],
                                            va1, vb1, qa1, qb1, stamp1)
                stamp1 += 1
                cut_b = not _connected_excl(indptr1, adj_v1, adj_e1, bot1, e, eu1[e], ev1[e],
                                            va1, vb1, qa1, qb1, stamp1)
                nt = r < (phat if cut_t else p)
                nb = r < (phat if cut_b else p)
                if top1[e] != bot1[e]:
                    D1 -= 1
                top1[e] = nt
                bot1[e] = nb
                if nt != nb:
                    D1 += 1
            else:
                stamp1 += 1
                cut = not _connected_excl(indptr1, adj_v1, adj_e1, top1, e, eu1[e], ev1[e],
                                          va1, vb1, qa1, qb1, stamp1)
                nt = r < (phat if cut else p)
                top1[e] = nt
                bot1[e] = nt
        total += T
        if D0 == 0 and D1 == 0:
            return 1, top0, top1, total
        T *= 2
    return 0, top0, top1, total


@njit(cache=True)
def multichain_run(indptr, adj_v, adj_e, eu, ev, configs, p, phat, key, ctr0, steps):
    """Evolve K identity-coupled chains; returns count of order violations
    between consecutive rows (row k must stay a subset of row k+1)."""
    n = indptr.shape[0] - 1
    nE = eu.shape[0]
    K = configs.shape[0]
    va = np.zeros(n, dtype=np.int64)
    vb = np.zeros(n, dtype=np.int64)
    qa = np.empty(n, dtype=np.int32)
    qb = np.empty(n, dtype=np.int32)
    stamp = np.int64(0)
    key = U64(key)
    violations = 0
    for t in range(steps):
        c = U64(ctr0) + U64(2) * U64(t)
        e = np.int64(_u01(key, c) * nE)
        if e >= nE:
            e = nE - 1
        r = _u01(key, c + U64(1))
        for k in range(K):
            stamp += 1
            cut = not _connected_excl(indptr, adj_v, adj_e, configs[k], e, eu[e], ev[e],
                                      va, vb, qa, qb, stamp)
            configs[k, e] = r < (phat if cut else p)
        for k in range(K - 1):
            if configs[k, e] and not configs[k + 1, e]:
                violations += 1
    return violations
