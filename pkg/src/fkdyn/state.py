"""FK configurations: component counts, cut-edge queries, weights, duality.

A configuration is a plain bool vector over the lattice's edge indices
(1 = open).  Functions here are the reference implementations; the
performance kernel in :mod:`fkdyn.kernel` must agree with them on the
oracle-equivalence suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boundary import BoundaryCondition, UnionFind
from .lattice import Lattice, VariantError, dual_lattice

FkConfig = np.ndarray  # bool vector over edge indices


@dataclass(frozen=True)
class Params:
    p: float
    q: float

    def __post_init__(self):
        if not (0.0 < self.p < 1.0):
            raise ValueError(f"p must lie in (0,1), got {self.p}")
        if self.q <= 0.0:
            raise ValueError(f"q must be positive, got {self.q}")

    @property
    def p_hat(self) -> float:
        """Heat-bath open probability at a cut-edge: p / (q(1-p) + p)."""
        return self.p / (self.q * (1.0 - self.p) + self.p)

    @property
    def p_star(self) -> float:
        """Dual parameter q(1-p) / (q(1-p) + p)."""
        return self.q * (1.0 - self.p) / (self.q * (1.0 - self.p) + self.p)

    def dual(self) -> "Params":
        return Params(self.p_star, self.q)


def p_c(q: float) -> float:
    """Self-dual point sqrt(q) / (sqrt(q) + 1)."""
    return math.sqrt(q) / (math.sqrt(q) + 1.0)


def empty_config(lat: Lattice) -> FkConfig:
    return np.zeros(lat.n_edges, dtype=bool)


def full_config(lat: Lattice) -> FkConfig:
    return np.ones(lat.n_edges, dtype=bool)


def _augmented_uf(lat: Lattice, config: FkConfig, bc: BoundaryCondition | None) -> UnionFind:
    uf = UnionFind(lat.n_vertices)
    if bc is not None:
        for blk in bc.vertex_blocks(lat):
            for v in blk[1:]:
                uf.union(blk[0], v)
    ea = lat.edge_array
    for e in np.flatnonzero(config):
        uf.union(int(ea[e, 0]), int(ea[e, 1]))
    return uf


def component_count(lat: Lattice, config: FkConfig, bc: BoundaryCondition) -> int:
    """c(S; xi): components of the augmented graph, isolated vertices included."""
    return _augmented_uf(lat, config, bc).count


def connected(
    lat: Lattice,
    config: FkConfig,
    bc: BoundaryCondition | None,
    u: int,
    v: int,
) -> bool:
    """Whether u and v are joined; pass bc=None to ignore the ghost wirings."""
    uf = _augmented_uf(lat, config, bc)
    return uf.find(u) == uf.find(v)


def is_cut_edge(lat: Lattice, config: FkConfig, bc: BoundaryCondition, e: int) -> bool:
    """True iff the endpoints of e are not connected in (S \\ {e})^xi."""
    stripped = config.copy()
    stripped[e] = False
    u, v = lat.edges[e]
    return not connected(lat, stripped, bc, u, v)


def log_weight(lat: Lattice, config: FkConfig, bc: BoundaryCondition, params: Params) -> float:
    """Unnormalized log pi: |S| log p + |E\\S| log(1-p) + c(S;xi) log q."""
    k = int(config.sum())
    c = component_count(lat, config, bc)
    return (
        k * math.log(params.p)
        + (lat.n_edges - k) * math.log(1.0 - params.p)
        + c * math.log(params.q)
    )


def dual_config(lat: Lattice, config: FkConfig) -> FkConfig:
    """Complement through the modified-lattice edge bijection (e* open iff e closed)."""
    if lat.variant != "modified":
        raise VariantError("dual_config needs the modified edge-set variant")
    dual, dual_of = dual_lattice(lat)
    out = np.ones(dual.n_edges, dtype=bool)
    out[dual_of] = ~config
    return out


def config_to_hex(lat: Lattice, config: FkConfig) -> str:
    """Snapshot line: dims header + hex-encoded bit vector (MSB-first)."""
    bits = np.packbits(config.astype(np.uint8))
    return f"FK {lat.n} {lat.l} {lat.variant} {bits.tobytes().hex()}"

def config_from_hex(line: str) -> tuple[int, int, str, FkConfig]:
    tag, n, l, variant, payload = line.strip().split()
    if tag != "FK":
        raise ValueError("not an FK snapshot line")
    from .lattice import build_rect

    lat = build_rect(int(n), int(l), variant)
    raw = np.frombuffer(bytes.fromhex(payload), dtype=np.uint8)
    bits = np.unpackbits(raw)[: lat.n_edges].astype(bool)
    return int(n), int(l), variant, bits
