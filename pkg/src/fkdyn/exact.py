"""Brute-force ground truth on tiny instances.

Enumerates all 2^|E| configurations of a small graph (|E| <= 22 hard cap),
producing stationary vectors, exact transition matrices for the single-edge,
modified heat-bath, and block dynamics, spectral gaps, TV mixing times and
conductances.  Everything downstream that claims exactness is checked against
this module.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from numba import njit

from .boundary import BoundaryCondition
from .lattice import Lattice
from .state import Params

HARD_EDGE_CAP = 22


@dataclass(frozen=True)
class TinyGraph:
    """Small graph with optional ghost wirings (contracted vertex classes)."""

    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    wiring: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if len(self.edges) > HARD_EDGE_CAP:
            raise ValueError(f"exact enumeration capped at {HARD_EDGE_CAP} edges")

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_states(self) -> int:
        return 1 << self.n_edges

    @staticmethod
    def from_lattice(lat: Lattice, bc: BoundaryCondition) -> "TinyGraph":
        wiring = tuple(tuple(blk) for blk in bc.vertex_blocks(lat))
        return TinyGraph(lat.n_vertices, tuple(lat.edges), wiring)

    @staticmethod
    def complete(k: int) -> "TinyGraph":
        edges = tuple((i, j) for i in range(k) for j in range(i + 1, k))
        return TinyGraph(k, edges)

    @staticmethod
    def single_edge() -> "TinyGraph":
        return TinyGraph(2, ((0, 1),))

    def contracted(self) -> tuple[np.ndarray, int]:
        """Vertex -> super-vertex map with wiring classes merged."""
        parent = np.arange(self.n_vertices, dtype=np.int64)

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for blk in self.wiring:
            for v in blk[1:]:
                ra, rb = find(blk[0]), find(v)
                if ra != rb:
                    parent[rb] = ra
        roots = np.array([find(v) for v in range(self.n_vertices)])
        uniq, labels = np.unique(roots, return_inverse=True)
        return labels.astype(np.int64), len(uniq)


@njit(cache=True)
def _component_counts(n_super, eu, ev, n_states):
    E = eu.shape[0]
    out = np.empty(n_states, dtype=np.int64)
    parent = np.empty(n_super, dtype=np.int64)
    for s in range(n_states):
        for v in range(n_super):
            parent[v] = v
        cnt = n_super
        for e in range(E):
            if (s >> e) & 1:
                a = eu[e]
                while parent[a] != a:
                    parent[a] = parent[parent[a]]
                    a = parent[a]
                b = ev[e]
                while parent[b] != b:
                    parent[b] = parent[parent[b]]
                    b = parent[b]
                if a != b:
                    parent[b] = a
                    cnt -= 1
        out[s] = cnt
    return out


@njit(cache=True)
def _largest_component_sizes(n_vertices, eu, ev, n_states):
    E = eu.shape[0]
    out = np.empty(n_states, dtype=np.int64)
    parent = np.empty(n_vertices, dtype=np.int64)
    size = np.empty(n_vertices, dtype=np.int64)
    for s in range(n_states):
        for v in range(n_vertices):
            parent[v] = v
            size[v] = 1
        best = 1
        for e in range(E):
            if (s >> e) & 1:
                a = eu[e]
                while parent[a] != a:
                    parent[a] = parent[parent[a]]
                    a = parent[a]
                b = ev[e]
                while parent[b] != b:
                    parent[b] = parent[parent[b]]
                    b = parent[b]
                if a != b:
                    parent[b] = a
                    size[a] += size[b]
                    if size[a] > best:
                        best = size[a]
        out[s] = best
    return out


def component_table(g: TinyGraph) -> np.ndarray:
    """c(S; xi) for every state bitmask (bit i = edge i open)."""
    labels, n_super = g.contracted()
    eu = np.array([labels[u] for u, _ in g.edges], dtype=np.int64)
    ev = np.array([labels[v] for _, v in g.edges], dtype=np.int64)
    return _component_counts(n_super, eu, ev, g.n_states)


def largest_component_table(g: TinyGraph) -> np.ndarray:
    """Largest component size (ignoring wirings) for every state bitmask."""
    eu = np.array([u for u, _ in g.edges], dtype=np.int64)
    ev = np.array([v for _, v in g.edges], dtype=np.int64)
    return _largest_component_sizes(g.n_vertices, eu, ev, g.n_states)


def popcount_table(n_edges: int) -> np.ndarray:
    states = np.arange(1 << n_edges, dtype=np.int64)
    pop = np.zeros(1 << n_edges, dtype=np.int64)
    for e in range(n_edges):
        pop += (states >> e) & 1
    return pop


def enumerate_pi(g: TinyGraph, params: Params, c_table: np.ndarray | None = None) -> np.ndarray:
    """Stationary vector over all 2^|E| states, normalized in the log domain."""
    c = component_table(g) if c_table is None else c_table
    pop = popcount_table(g.n_edges)
    logs = (
        pop * np.log(params.p)
        + (g.n_edges - pop) * np.log(1.0 - params.p)
        + c * np.log(params.q)
    )
    m = logs.max()
    w = np.exp(logs - m)
    return w / w.sum()


@dataclass
class ExactChain:
    graph: TinyGraph
    params: Params
    pi: np.ndarray
    P: object  # scipy sparse or dense ndarray, row stochastic
    kind: str = "fk"
    c_table: np.ndarray = field(default=None, repr=False)

    @property
    def n_states(self) -> int:
        return self.pi.shape[0]

    def dense(self) -> np.ndarray:
        return self.P.toarray() if sp.issparse(self.P) else self.P


def cut_mask(g: TinyGraph, e: int, c_table: np.ndarray) -> np.ndarray:
    """cut(s, e) for all states: closing e changes the component count."""
    states = np.arange(g.n_states, dtype=np.int64)
    bit = 1 << e
    return (c_table[states & ~bit] - c_table[states | bit]) == 1


def fk_transition_matrix(g: TinyGraph, params: Params) -> ExactChain:
    """Single-edge heat-bath chain: open a cut-edge w.p. p_hat, else p."""
    E, N = g.n_edges, g.n_states
    c = component_table(g)
    states = np.arange(N, dtype=np.int64)
    rows, cols, vals = [], [], []
    for e in range(E):
        bit = 1 << e
        s_open = states | bit
        s_closed = states & ~bit
        p_open = np.where((c[s_closed] - c[s_open]) == 1, params.p_hat, params.p)
        rows.append(states)
        cols.append(s_open)
        vals.append(p_open / E)
        rows.append(states)
        cols.append(s_closed)
        vals.append((1.0 - p_open) / E)
    P = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(N, N),
    ).tocsr()
    return ExactChain(g, params, enumerate_pi(g, params, c), P, "fk", c)


def _resample_kernel(pi: np.ndarray, fixed_mask_bits: int, n_states: int) -> np.ndarray:
    """Dense kernel resampling the free bits conditional on the fixed bits."""
    states = np.arange(n_states, dtype=np.int64)
    keys = states & fixed_mask_bits
    P = np.zeros((n_states, n_states))
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]
    starts = np.flatnonzero(np.r_[True, sorted_keys[1:] != sorted_keys[:-1]])
    bounds = np.r_[starts, len(order)]
    for a, b in zip(bounds[:-1], bounds[1:]):
        idx = order[a:b]
        w = pi[idx]
        w = w / w.sum()
        P[np.ix_(idx, idx)] = w[None, :]
    return P


def mhb_transition_matrix(g: TinyGraph, params: Params, L_edges) -> ExactChain:
    """Modified heat-bath: single-edge moves on L, full resample elsewhere."""
    E, N = g.n_edges, g.n_states
    L_edges = sorted(set(int(e) for e in L_edges))
    c = component_table(g)
    pi = enumerate_pi(g, params, c)
    states = np.arange(N, dtype=np.int64)
    P = np.zeros((N, N))
    for e in L_edges:
        bit = 1 << e
        s_open = states | bit
        s_closed = states & ~bit
        p_open = np.where((c[s_closed] - c[s_open]) == 1, params.p_hat, params.p)
        np.add.at(P, (states, s_open), p_open / E)
        np.add.at(P, (states, s_closed), (1.0 - p_open) / E)
    n_out = E - len(L_edges)
    if n_out:
        L_bits = sum(1 << e for e in L_edges)
        P += (n_out / E) * _resample_kernel(pi, L_bits, N)
    return ExactChain(g, params, pi, P, "mhb", c)


def block_transition_matrix(g: TinyGraph, params: Params, blocks) -> ExactChain:
    """Block dynamics: resample a uniformly chosen edge block conditionally."""
    E, N = g.n_edges, g.n_states
    blocks = [sorted(set(int(e) for e in blk)) for blk in blocks]
    covered = set()
    for blk in blocks:
        covered.update(blk)
    if covered != set(range(E)):
        raise ValueError("block edge sets must cover every edge")
    c = component_table(g)
    pi = enumerate_pi(g, params, c)
    P = np.zeros((N, N))
    for blk in blocks:
        off_bits = sum(1 << e for e in range(E) if e not in blk)
        P += _resample_kernel(pi, off_bits, N) / len(blocks)
    return ExactChain(g, params, pi, P, "block", c)


def stationarity_error(chain: ExactChain) -> float:
    """Max-norm of pi P - pi."""
    piP = chain.pi @ chain.P if not sp.issparse(chain.P) else chain.P.T.dot(chain.pi)
    return float(np.abs(piP - chain.pi).max())


def reversibility_error(chain: ExactChain) -> float:
    F = chain.dense() * chain.pi[:, None]
    return float(np.abs(F - F.T).max())


def spectral_gap(chain: ExactChain, tol: float = 1e-10) -> float:
    """Absolute spectral gap 1 - max(|lambda_2|, |lambda_min|).

    Uses the pi^(1/2) similarity transform to a symmetric matrix; rejects
    chains that are not reversible (the transform would be meaningless).
    """
    pi = chain.pi
    if (pi <= 0).any():
        raise ValueError("stationary vector must be strictly positive")
    rt = np.sqrt(pi)
    A = chain.dense() * (rt[:, None] / rt[None, :])
    if np.abs(A - A.T).max() > 1e-8:
        raise ValueError("chain is not reversible; spectral gap undefined here")
    lam = np.linalg.eigvalsh((A + A.T) / 2.0)
    lam_star = max(abs(lam[0]), abs(lam[-2])) if len(lam) > 1 else 0.0
    if lam_star > 1.0 + tol:
        raise ValueError("eigenvalue outside [-1, 1]; matrix not stochastic?")
    return 1.0 - min(lam_star, 1.0)


def _worst_tv(M: np.ndarray, pi: np.ndarray) -> float:
    return 0.5 * float(np.abs(M - pi[None, :]).sum(axis=1).max())


def _renorm(M: np.ndarray) -> np.ndarray:
    return M / M.sum(axis=1, keepdims=True)


def tv_mixing_time(chain: ExactChain, eps: float = 0.25, t_cap: int = 1 << 24) -> int:
    """Smallest t with worst-start total variation <= eps.

    Row-renormalized repeated squaring to bracket, then binary search using
    products of the stored ladder powers.
    """
    P = chain.dense()
    pi = chain.pi
    if _worst_tv(P, pi) <= eps:
        return 1
    ladder = [P]  # ladder[k] = P^(2^k)
    t = 1
    while True:
        t *= 2
        if t > t_cap:
            raise RuntimeError(f"tv_mixing_time cap {t_cap} exceeded")
        ladder.append(_renorm(ladder[-1] @ ladder[-1]))
        if _worst_tv(ladder[-1], pi) <= eps:
            break
    lo, hi = t // 2, t  # d(lo) > eps >= d(hi)

    def power(t_probe: int) -> np.ndarray:
        M = None
        k = 0
        while (1 << k) <= t_probe:
            if (t_probe >> k) & 1:
                M = ladder[k] if M is None else _renorm(M @ ladder[k])
            k += 1
        return M

    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _worst_tv(power(mid), pi) <= eps:
            hi = mid
        else:
            lo = mid
    return hi


def conductance(chain: ExactChain, A) -> float:
    """Phi(A) = Q(A, A^c) / pi(A) for a state subset (bool mask or index list)."""
    A = np.asarray(A)
    if A.dtype == np.bool_:
        mask = A
    else:
        mask = np.zeros(chain.n_states, dtype=bool)
        mask[A] = True
    piA = chain.pi[mask].sum()
    if piA <= 0.0 or piA >= 1.0:
        raise ValueError("conductance needs a proper nonempty subset")
    if sp.issparse(chain.P):
        flow = chain.pi[mask] @ chain.P[mask][:, ~mask].toarray()
    else:
        flow = chain.pi[mask] @ chain.P[np.ix_(mask, ~mask)]
    return float(np.sum(flow) / piA)


def level_set_candidates(chain: ExactChain) -> list[np.ndarray]:
    """Standard bottleneck candidates: |S| levels and largest-component levels."""
    out = []
    pop = popcount_table(chain.graph.n_edges)
    for k in range(chain.graph.n_edges):
        out.append(pop <= k)
    lc = largest_component_table(chain.graph)
    for t in range(1, int(lc.max())):
        out.append(lc <= t)
    return out


def min_conductance(chain: ExactChain, candidates=None, exhaustive_cap: int = 16) -> float:
    """Phi_star = min over A with pi(A) <= 1/2 of Phi(A).

    Exhaustive over all 2^|Omega| subsets only when |Omega| <= exhaustive_cap
    (the subset count is doubly exponential in |E|); otherwise the minimum is
    taken over the supplied candidate family plus the built-in level sets,
    which upper-bounds the true Phi_star.
    """
    N = chain.n_states
    pi = chain.pi
    F = chain.dense() * pi[:, None]
    best = np.inf
    if candidates is None and N <= exhaustive_cap:
        r = F.sum(axis=1)
        for bits in range(1, (1 << N) - 1):
            mask = np.array([(bits >> i) & 1 for i in range(N)], dtype=bool)
            piA = pi[mask].sum()
            if piA > 0.5:
                continue
            Q = r[mask].sum() - F[np.ix_(mask, mask)].sum()
            best = min(best, Q / piA)
        return float(best)
    cands = list(candidates) if candidates is not None else []
    cands += level_set_candidates(chain)
    for mask in cands:
        mask = np.asarray(mask, dtype=bool)
        piA = pi[mask].sum()
        for m in (mask, ~mask):
            pA = pi[m].sum()
            if 0.0 < pA <= 0.5:
                Q = F[np.ix_(m, ~m)].sum()
                best = min(best, Q / pA)
    if not np.isfinite(best):
        raise ValueError("no admissible candidate subset")
    return float(best)
