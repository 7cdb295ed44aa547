"""Rectangle geometry on the 2D integer lattice.

Vertices of an n-by-l rectangle are the integer points ``{0..n} x {0..l}``,
indexed row-major (``idx = y*(n+1) + x``).  Two edge-set variants exist:

* ``full``: every nearest-neighbor pair.
* ``modified``: only edges with at least one endpoint off the boundary.  The
  planar dual of this graph is a plain (n-1)-by-(l-1) rectangle with the full
  edge set, which is the only duality this package exposes.

Edges are stored as index pairs ``(u, v)`` with ``u < v`` and numbered in
lexicographic order of ``(u, v)``; for a given ``u`` the eastward edge sorts
before the northward one.  All indexing is deterministic so runs reproduce
bit-for-bit across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

FULL = "full"
MODIFIED = "modified"


class VariantError(ValueError):
    """Raised when an operation requires the other edge-set variant."""


@dataclass(frozen=True)
class Lattice:
    n: int
    l: int
    variant: str = FULL
    edges: tuple[tuple[int, int], ...] = field(repr=False, default=())

    @property
    def n_vertices(self) -> int:
        return (self.n + 1) * (self.l + 1)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def vertex_index(self, x: int, y: int) -> int:
        if not (0 <= x <= self.n and 0 <= y <= self.l):
            raise ValueError(f"vertex ({x},{y}) outside [[0,{self.n}]]x[[0,{self.l}]]")
        return y * (self.n + 1) + x

    def vertex_xy(self, idx: int) -> tuple[int, int]:
        return idx % (self.n + 1), idx // (self.n + 1)

    def edge_index(self, a: tuple[int, int], b: tuple[int, int]) -> int:
        u, v = self.vertex_index(*a), self.vertex_index(*b)
        if u > v:
            u, v = v, u
        try:
            return self._edge_lookup[(u, v)]
        except KeyError:
            raise ValueError(f"no edge between {a} and {b} in {self.variant} variant")

    def edge_vertices(self, e: int) -> tuple[tuple[int, int], tuple[int, int]]:
        u, v = self.edges[e]
        return self.vertex_xy(u), self.vertex_xy(v)

    def is_boundary(self, x: int, y: int) -> bool:
        return x == 0 or x == self.n or y == 0 or y == self.l

    @property
    def _edge_lookup(self) -> dict[tuple[int, int], int]:
        cache = self.__dict__.get("_edge_lookup_cache")
        if cache is None:
            cache = {uv: i for i, uv in enumerate(self.edges)}
            object.__setattr__(self, "_edge_lookup_cache", cache)
        return cache

    @property
    def edge_array(self) -> np.ndarray:
        """Edge endpoints as an (n_edges, 2) int32 array."""
        arr = self.__dict__.get("_edge_array_cache")
        if arr is None:
            arr = np.asarray(self.edges, dtype=np.int32).reshape(-1, 2)
            object.__setattr__(self, "_edge_array_cache", arr)
        return arr


def build_rect(n: int, l: int, variant: str = FULL) -> Lattice:
    """Rectangle lattice with deterministic vertex/edge indexing."""
    if n < 1 or l < 1:
        raise ValueError(f"rectangle needs n >= 1 and l >= 1, got ({n},{l})")
    if variant not in (FULL, MODIFIED):
        raise ValueError(f"unknown edge-set variant {variant!r}")

    def interior(x, y):
        return 0 < x < n and 0 < y < l

    edges = []
    for y in range(l + 1):
        for x in range(n + 1):
            u = y * (n + 1) + x
            if x < n and (variant == FULL or interior(x, y) or interior(x + 1, y)):
                edges.append((u, u + 1))
            if y < l and (variant == FULL or interior(x, y) or interior(x, y + 1)):
                edges.append((u, u + n + 1))
    edges.sort()
    return Lattice(n=n, l=l, variant=variant, edges=tuple(edges))


def boundary_cycle(lat: Lattice) -> list[tuple[int, int]]:
    """Boundary vertices in counterclockwise order starting at (0,0).

    East along the south side first, then north, west along the north side,
    and south down the west side.  Every boundary vertex appears exactly once;
    the length is 2n + 2l.
    """
    n, l = lat.n, lat.l
    cyc = [(x, 0) for x in range(n)]
    cyc += [(n, y) for y in range(l)]
    cyc += [(x, l) for x in range(n, 0, -1)]
    cyc += [(0, y) for y in range(l, 0, -1)]
    return cyc


def cycle_positions(lat: Lattice) -> dict[tuple[int, int], int]:
    """Map boundary vertex -> position in boundary_cycle order."""
    return {v: i for i, v in enumerate(boundary_cycle(lat))}


def corner_positions(lat: Lattice) -> tuple[int, int, int, int]:
    """Cycle positions of the SW, SE, NE, NW corners."""
    n, l = lat.n, lat.l
    return 0, n, n + l, 2 * n + l


@dataclass(frozen=True)
class Region:
    """Vertex subset of a lattice with its induced/complement edge sets."""

    lat: Lattice
    mask: np.ndarray  # bool over vertex indices

    def __post_init__(self):
        if self.mask.shape != (self.lat.n_vertices,):
            raise ValueError("region mask must cover every lattice vertex")

    @staticmethod
    def from_vertices(lat: Lattice, verts) -> "Region":
        mask = np.zeros(lat.n_vertices, dtype=bool)
        for v in verts:
            mask[lat.vertex_index(*v) if isinstance(v, tuple) else v] = True
        return Region(lat, mask)

    @staticmethod
    def from_box(lat: Lattice, x0: int, x1: int, y0: int, y1: int) -> "Region":
        mask = np.zeros(lat.n_vertices, dtype=bool)
        for y in range(max(0, y0), min(lat.l, y1) + 1):
            base = y * (lat.n + 1)
            mask[base + max(0, x0): base + min(lat.n, x1) + 1] = True
        return Region(lat, mask)

    @staticmethod
    def everything(lat: Lattice) -> "Region":
        return Region(lat, np.ones(lat.n_vertices, dtype=bool))

    @property
    def edge_mask(self) -> np.ndarray:
        """E(R): edges with both endpoints inside, as bool over edge indices."""
        ea = self.lat.edge_array
        return self.mask[ea[:, 0]] & self.mask[ea[:, 1]]

    @property
    def edge_complement_mask(self) -> np.ndarray:
        return ~self.edge_mask

    def boundary_vertices(self) -> list[int]:
        """Vertices of R adjacent (in Z^2) to something outside R."""
        lat, out = self.lat, []
        for idx in np.flatnonzero(self.mask):
            x, y = lat.vertex_xy(idx)
            if lat.is_boundary(x, y):
                out.append(int(idx))
                continue
            for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                if not self.mask[lat.vertex_index(x + dx, y + dy)]:
                    out.append(int(idx))
                    break
        return out


def dual_lattice(lat: Lattice) -> tuple[Lattice, np.ndarray]:
    """Dual of a modified-variant rectangle.

    Returns the full (n-1)-by-(l-1) rectangle whose vertices are the interior
    faces of ``lat``, plus the array ``dual_of`` mapping each primal edge index
    to the index of the dual edge crossing it (a bijection).
    """
    if lat.variant != MODIFIED:
        raise VariantError("dual_lattice is defined on the modified edge-set variant only")
    if lat.n < 2 or lat.l < 2:
        raise ValueError("dual of a modified rectangle needs n >= 2 and l >= 2")
    dual = build_rect(lat.n - 1, lat.l - 1, FULL)
    dual_of = np.empty(lat.n_edges, dtype=np.int64)
    for e, (u, v) in enumerate(lat.edges):
        (x1, y1), (x2, y2) = lat.vertex_xy(u), lat.vertex_xy(v)
        if y1 == y2:  # horizontal primal edge: crossed by a vertical dual edge
            x = min(x1, x2)
            dual_of[e] = dual.edge_index((x, y1 - 1), (x, y1))
        else:  # vertical primal edge: crossed by a horizontal dual edge
            y = min(y1, y2)
            dual_of[e] = dual.edge_index((x1 - 1, y), (x1, y))
    return dual, dual_of
