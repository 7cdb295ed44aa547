"""Counter-based random number streams.

Every stream is a 64-bit key; the i-th uniform variate of a stream is a pure
function of ``(key, i)``, so replaying any index range reproduces the same
numbers (required for coupling-from-the-past, which reuses the randomness of
earlier epochs) and results are bit-identical across platforms.

Stream algorithm (fixed for this release): splitmix64 finalizer applied to
``key + (counter+1) * GOLDEN``; ``split(child)`` derives an independent child
key by hashing ``(key, child)`` through two finalizer rounds.  The numba
kernels reimplement the same arithmetic on uint64; both sides are pinned by
tests/test_dynamics.py::test_kernel_rng_matches_python.
"""

from __future__ import annotations

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_SPLIT_TAG = 0xD6E8FEB86659FD93


def mix64(z: int) -> int:
    """splitmix64 finalizer (bijective on 64-bit words)."""
    z &= MASK
    z = ((z ^ (z >> 30)) * _M1) & MASK
    z = ((z ^ (z >> 27)) * _M2) & MASK
    return z ^ (z >> 31)


def u64_at(key: int, counter: int) -> int:
    return mix64((key + (counter + 1) * GOLDEN) & MASK)


def uniform_at(key: int, counter: int) -> float:
    """Uniform variate in [0, 1) at a given counter, 53-bit resolution."""
    return (u64_at(key, counter) >> 11) * (1.0 / 9007199254740992.0)


def split_key(key: int, child: int) -> int:
    return mix64((mix64(key ^ _SPLIT_TAG) + child * GOLDEN) & MASK)


class RngStream:
    """Sequential view over a counter-indexed stream.

    The instance carries a cursor; ``uniform()`` consumes one counter.  Code
    that needs random access (the CFTP kernel) uses ``key`` directly with the
    module-level ``uniform_at``.
    """

    def __init__(self, seed: int, _key: int | None = None):
        self.seed = int(seed)
        self.key = int(_key) & MASK if _key is not None else mix64(int(seed) & MASK)
        self._counter = 0

    def uniform(self) -> float:
        u = uniform_at(self.key, self._counter)
        self._counter += 1
        return u

    def randint(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("randint needs n >= 1")
        return min(int(self.uniform() * n), n - 1)

    def split(self, child: int) -> "RngStream":
        """Independent child stream; deterministic in (parent key, child id)."""
        return RngStream(self.seed, _key=split_key(self.key, child))

    def __repr__(self) -> str:  # pragma: no cover
        return f"RngStream(seed={self.seed}, key={self.key:#018x}, counter={self._counter})"
