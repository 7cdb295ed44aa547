"""FK Glauber dynamics, monotone couplings, CFTP, MHB and block dynamics.

A :class:`ChainSystem` packages the contracted graph (boundary blocks and any
conditioning merged into super-vertices) plus parameters in kernel-ready
arrays.  Python-level single steps are reference implementations; bulk runs
and exact sampling dispatch to :mod:`fkdyn.kernel`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernel
from .boundary import BoundaryCondition, UnionFind
from .lattice import Lattice, Region
from .rng import RngStream
from .state import FkConfig, Params, is_cut_edge

DEFAULT_MAX_EPOCHS = 34


class CftpCapError(RuntimeError):
    """Coupling from the past exceeded its epoch cap without coalescing."""


@dataclass
class ChainSystem:
    """Contracted graph over the active edge set, ready for the kernels."""

    n_super: int
    eu: np.ndarray
    ev: np.ndarray
    indptr: np.ndarray
    adj_v: np.ndarray
    adj_e: np.ndarray
    params: Params
    active_edges: np.ndarray  # global edge indices, local index order
    n_global_edges: int

    @property
    def n_edges(self) -> int:
        return len(self.eu)

    def kernel_args(self):
        return self.indptr, self.adj_v, self.adj_e, self.eu, self.ev

    def local_config(self, config: FkConfig) -> np.ndarray:
        return np.ascontiguousarray(config[self.active_edges])

    def write_back(self, config: FkConfig, local: np.ndarray) -> None:
        config[self.active_edges] = local


def _build_system(
    labels: np.ndarray,
    n_super: int,
    endpoint_pairs,
    active_edges: np.ndarray,
    params: Params,
    n_global: int,
) -> ChainSystem:
    eu = np.array([labels[u] for u, _ in endpoint_pairs], dtype=np.int32)
    ev = np.array([labels[v] for _, v in endpoint_pairs], dtype=np.int32)
    deg = np.zeros(n_super + 1, dtype=np.int64)
    for i in range(len(eu)):
        if eu[i] != ev[i]:
            deg[eu[i] + 1] += 1
            deg[ev[i] + 1] += 1
    indptr = np.cumsum(deg)
    adj_v = np.empty(indptr[-1], dtype=np.int32)
    adj_e = np.empty(indptr[-1], dtype=np.int32)
    cursor = indptr[:-1].copy()
    for i in range(len(eu)):
        a, b = eu[i], ev[i]
        if a == b:
            continue
        adj_v[cursor[a]] = b
        adj_e[cursor[a]] = i
        cursor[a] += 1
        adj_v[cursor[b]] = a
        adj_e[cursor[b]] = i
        cursor[b] += 1
    return ChainSystem(
        n_super, eu, ev, indptr, adj_v, adj_e, params,
        np.asarray(active_edges, dtype=np.int64), n_global,
    )


def _contract(n_vertices: int, merge_groups) -> tuple[np.ndarray, int]:
    uf = UnionFind(n_vertices)
    for grp in merge_groups:
        grp = list(grp)
        for v in grp[1:]:
            uf.union(grp[0], v)
    roots = {}
    labels = np.empty(n_vertices, dtype=np.int64)
    for v in range(n_vertices):
        r = uf.find(v)
        labels[v] = roots.setdefault(r, len(roots))
    return labels, len(roots)


def lattice_system(lat: Lattice, bc: BoundaryCondition, params: Params) -> ChainSystem:
    """Whole-lattice dynamics under a boundary condition."""
    labels, n_super = _contract(lat.n_vertices, bc.vertex_blocks(lat))
    return _build_system(labels, n_super, lat.edges,
                         np.arange(lat.n_edges), params, lat.n_edges)


def graph_system(n_vertices: int, edges, params: Params, wiring=()) -> ChainSystem:
    """Dynamics on an arbitrary small graph (single edge, K_l, ...)."""
    labels, n_super = _contract(n_vertices, wiring)
    edges = [tuple(e) for e in edges]
    return _build_system(labels, n_super, edges,
                         np.arange(len(edges)), params, len(edges))


def conditional_system(
    lat: Lattice,
    bc: BoundaryCondition,
    params: Params,
    active_mask: np.ndarray,
    fixed_config: FkConfig,
) -> ChainSystem:
    """Dynamics on an edge subset conditional on the rest of the configuration.

    The conditional FK measure on the active edges is the FK measure of the
    graph with wirings given by bc plus the open fixed edges; both are folded
    into the vertex contraction.
    """
    active_mask = np.asarray(active_mask, dtype=bool)
    ea = lat.edge_array
    merges = list(bc.vertex_blocks(lat))
    for e in np.flatnonzero(np.asarray(fixed_config, dtype=bool) & ~active_mask):
        merges.append((int(ea[e, 0]), int(ea[e, 1])))
    labels, n_super = _contract(lat.n_vertices, merges)
    active = np.flatnonzero(active_mask)
    pairs = [lat.edges[int(e)] for e in active]
    return _build_system(labels, n_super, pairs, active, params, lat.n_edges)


# ---------------------------------------------------------------------------
# Single steps (reference implementations)
# ---------------------------------------------------------------------------

def glauber_step(
    lat: Lattice,
    config: FkConfig,
    bc: BoundaryCondition,
    params: Params,
    rng: RngStream,
) -> FkConfig:
    """One heat-bath update; consumes exactly two variates (edge, threshold)."""
    e = rng.randint(lat.n_edges)
    r = rng.uniform()
    out = config.copy()
    p_open = params.p_hat if is_cut_edge(lat, config, bc, e) else params.p
    out[e] = r < p_open
    return out


def identity_coupled_step(
    lat: Lattice,
    x: FkConfig,
    y: FkConfig,
    bc: BoundaryCondition,
    params: Params,
    rng: RngStream,
) -> tuple[FkConfig, FkConfig]:
    """Same edge and same threshold applied to both chains (monotone for q >= 1)."""
    e = rng.randint(lat.n_edges)
    r = rng.uniform()
    xo, yo = x.copy(), y.copy()
    xo[e] = r < (params.p_hat if is_cut_edge(lat, x, bc, e) else params.p)
    yo[e] = r < (params.p_hat if is_cut_edge(lat, y, bc, e) else params.p)
    return xo, yo


# ---------------------------------------------------------------------------
# Bulk runs
# ---------------------------------------------------------------------------

def run_chain(system: ChainSystem, config: np.ndarray, stream: RngStream, steps: int,
              ctr0: int = 0) -> int:
    """Evolve a local configuration in place for ``steps`` updates."""
    kernel.glauber_run(*system.kernel_args(), config,
                       system.params.p, system.params.p_hat,
                       np.uint64(stream.key), np.uint64(ctr0), steps)
    return ctr0 + 2 * steps


@dataclass
class CouplingResult:
    coupled: bool
    steps: int
    violations: int = 0
    x_sizes: list[int] = field(default_factory=list)
    y_sizes: list[int] = field(default_factory=list)


def coupled_run(
    system: ChainSystem,
    stream: RngStream,
    max_steps: int,
    check_order: bool = True,
    checkpoint_every: int = 0,
    x0: np.ndarray | None = None,
    y0: np.ndarray | None = None,
) -> CouplingResult:
    """Identity coupling from the extremal pair (all-closed x, all-open y).

    The extremal pair dominates every other starting pair under the grand
    coupling, so its meeting time upper-bounds all of them.  The order check
    counts steps where x escapes above y (must be zero for q >= 1).  Censored
    runs (no meeting within max_steps) return coupled=False, steps=max_steps.
    """
    x = np.zeros(system.n_edges, dtype=bool) if x0 is None else x0.copy()
    y = np.ones(system.n_edges, dtype=bool) if y0 is None else y0.copy()
    p, phat = system.params.p, system.params.p_hat
    key = np.uint64(stream.key)
    chunk = checkpoint_every if checkpoint_every > 0 else max_steps
    done = 0
    violations = 0
    xs, ys = [], []
    while done < max_steps:
        todo = min(chunk, max_steps - done)
        met, viol = kernel.coupled_run(*system.kernel_args(), x, y, p, phat,
                                       key, np.uint64(2 * done), todo,
                                       check_order)
        violations += viol
        if met >= 0:
            return CouplingResult(True, done + met, violations, xs, ys)
        done += todo
        xs.append(int(x.sum()))
        ys.append(int(y.sum()))
    return CouplingResult(False, max_steps, violations, xs, ys)


def coupling_time(
    system: ChainSystem,
    stream: RngStream,
    max_steps: int,
    reps: int,
) -> list[CouplingResult]:
    """Replicated extremal-pair meeting times; one child stream per replica."""
    return [coupled_run(system, stream.split(i), max_steps) for i in range(reps)]


def censored_median(results: list[CouplingResult], max_steps: int) -> float:
    """Median meeting time; at least max_steps when half the runs censored."""
    vals = sorted(r.steps if r.coupled else max_steps for r in results)
    mid = len(vals) // 2
    if len(vals) % 2:
        return float(vals[mid])
    return 0.5 * (vals[mid - 1] + vals[mid])


def cftp_sample(
    system: ChainSystem,
    stream: RngStream,
    T0: int | None = None,
    max_epochs: int = DEFAULT_MAX_EPOCHS,
) -> np.ndarray:
    """Exact sample from the system's FK measure via monotone CFTP."""
    if system.params.q < 1.0:
        raise ValueError("monotone CFTP requires q >= 1")
    T0 = system.n_edges if T0 is None else T0
    ok, cfg, _total = kernel.cftp_run(*system.kernel_args(),
                                      system.params.p, system.params.p_hat,
                                      np.uint64(stream.key), max(1, T0), max_epochs)
    if not ok:
        raise CftpCapError(f"no coalescence within {max_epochs} doubling epochs")
    return cfg.copy()


def cftp_sample_lattice(
    lat: Lattice,
    bc: BoundaryCondition,
    params: Params,
    stream: RngStream,
    **kw,
) -> FkConfig:
    return cftp_sample(lattice_system(lat, bc, params), stream, **kw)


def cftp_pair_sample(
    system0: ChainSystem,
    system1: ChainSystem,
    stream: RngStream,
    T0: int | None = None,
    max_epochs: int = DEFAULT_MAX_EPOCHS,
) -> tuple[np.ndarray, np.ndarray]:
    """Coupled exact samples from two systems sharing the active edge list.

    With ordered contractions (system0 finer than system1) the samples come
    out pointwise ordered, which the spatial-mixing estimator exploits for
    variance reduction.
    """
    if system0.n_edges != system1.n_edges:
        raise ValueError("paired CFTP needs identical active edge lists")
    T0 = system0.n_edges if T0 is None else T0
    ok, c0, c1, _total = kernel.cftp_pair_run(
        *system0.kernel_args(), *system1.kernel_args(),
        system0.params.p, system0.params.p_hat,
        np.uint64(stream.key), max(1, T0), max_epochs)
    if not ok:
        raise CftpCapError(f"no coalescence within {max_epochs} doubling epochs")
    return c0.copy(), c1.copy()


# ---------------------------------------------------------------------------
# MHB and block dynamics
# ---------------------------------------------------------------------------

def resample_conditional(
    lat: Lattice,
    config: FkConfig,
    bc: BoundaryCondition,
    params: Params,
    active_mask: np.ndarray,
    stream: RngStream,
) -> FkConfig:
    """Replace the configuration on the active edges by an exact conditional
    sample given the rest (CFTP on the contracted conditional system)."""
    system = conditional_system(lat, bc, params, active_mask, config)
    local = cftp_sample(system, stream)
    out = config.copy()
    system.write_back(out, local)
    return out


def mhb_step(
    lat: Lattice,
    config: FkConfig,
    bc: BoundaryCondition,
    L: Region,
    params: Params,
    rng: RngStream,
    step_id: int = 0,
) -> FkConfig:
    """Modified heat-bath update.

    Uniform edge; single-edge heat-bath when both endpoints lie in L,
    otherwise the configuration off E(L) is replaced by an exact conditional
    sample.  The resampling stream is derived from (rng, step_id) so a fixed
    stream and step sequence is fully reproducible.
    """
    e = rng.randint(lat.n_edges)
    if L.edge_mask[e]:
        r = rng.uniform()
        out = config.copy()
        out[e] = r < (params.p_hat if is_cut_edge(lat, config, bc, e) else params.p)
        return out
    return resample_conditional(lat, config, bc, params, L.edge_complement_mask,
                                rng.split(step_id))


def block_dynamics_step(
    lat: Lattice,
    config: FkConfig,
    bc: BoundaryCondition,
    blocks: list[Region],
    params: Params,
    rng: RngStream,
    step_id: int = 0,
) -> FkConfig:
    """Resample a uniformly chosen block from its conditional distribution."""
    union = np.zeros(lat.n_edges, dtype=bool)
    for blk in blocks:
        union |= blk.edge_mask
    if not union.all():
        raise ValueError("block edge sets must cover E(lattice)")
    i = rng.randint(len(blocks))
    return resample_conditional(lat, config, bc, params, blocks[i].edge_mask,
                                rng.split(step_id))
