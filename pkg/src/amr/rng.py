"""Counter-based random streams for order-independent, reproducible simulation.

Every draw in the simulator is a pure function of a 64-bit key tuple
(seed, purpose tag, counters such as step or agent index).  Nothing is
stateful on the hot path, so agent decisions can be evaluated in any
order, by any number of workers, and still come out bit-identical.

The mixing function is the splitmix64 finalizer (Steele, Lea & Flood's
SplittableRandom), applied after folding each key part into the running
hash.  It is implemented twice: once on Python ints (reference) and once
vectorized over numpy uint64 arrays; both must agree exactly.
"""

from __future__ import annotations

import math

import numpy as np

MASK64 = (1 << 64) - 1

_GAMMA = 0x9E3779B97F4A7C15  # golden-ratio increment
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

# Purpose tags keep independent draw families (jitter, decisions, ...)
# from colliding even when their counters coincide.
TAG_JITTER = 0x4A49
TAG_DECISION = 0x4445
TAG_REPLICATION = 0x5245
TAG_CHAIN = 0x4348


def mix64(x: int) -> int:
    """splitmix64 finalizer: a bijective scramble of a 64-bit integer."""
    x &= MASK64
    x = ((x ^ (x >> 30)) * _MIX1) & MASK64
    x = ((x ^ (x >> 27)) * _MIX2) & MASK64
    return x ^ (x >> 31)


def fold(key: int, *parts: int) -> int:
    """Absorb integer key parts into a 64-bit hash, one mix per part."""
    h = key & MASK64
    for p in parts:
        h = mix64(((h + _GAMMA) & MASK64) ^ (p & MASK64))
    return h


def u01(bits: int) -> float:
    """Map 64 hash bits to a float in [0, 1) using the top 53 bits."""
    return (bits >> 11) * 2.0**-53


def substream(seed: int, index: int) -> int:
    """Derive the master seed of replication `index` from `seed`."""
    return fold(seed, TAG_REPLICATION, index)


# -- vectorized twins ---------------------------------------------------

_NP_GAMMA = np.uint64(_GAMMA)
_NP_MIX1 = np.uint64(_MIX1)
_NP_MIX2 = np.uint64(_MIX2)


def mix64_array(x: np.ndarray) -> np.ndarray:
    """Vectorized mix64 over a uint64 array (wrapping arithmetic)."""
    x = x ^ (x >> np.uint64(30))
    x = x * _NP_MIX1
    x = x ^ (x >> np.uint64(27))
    x = x * _NP_MIX2
    return x ^ (x >> np.uint64(31))


def fold_array(key: int, parts: np.ndarray) -> np.ndarray:
    """fold(key, p) for every p in `parts` (uint64 array), vectorized."""
    base = np.uint64((key + _GAMMA) & MASK64)
    return mix64_array(base ^ parts)


def fold_matrix(keys: list[int], parts: np.ndarray) -> np.ndarray:
    """fold_array for several keys at once; row k holds fold(keys[k], parts)."""
    base = np.array([(k + _GAMMA) & MASK64 for k in keys], dtype=np.uint64)
    return mix64_array(base[:, None] ^ parts[None, :])


def u01_array(bits: np.ndarray) -> np.ndarray:
    return (bits >> np.uint64(11)).astype(np.float64) * 2.0**-53


class Stream:
    """Sequential view over a counter-based stream.

    Used where an algorithm is inherently serial (the annealing chain):
    draws are still pure functions of (key, draw counter), so replays
    with the same key reproduce the exact sequence.
    """

    def __init__(self, key: int):
        self._key = fold(key, TAG_CHAIN)
        self._count = 0

    def u01(self) -> float:
        u = u01(fold(self._key, self._count))
        self._count += 1
        return u

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.u01()

    def integer(self, n: int) -> int:
        """Uniform int in [0, n). Bias is negligible for small n."""
        return min(int(self.u01() * n), n - 1)

    def gauss(self, mu: float = 0.0, sigma: float = 1.0) -> float:
        """Box-Muller transform; consumes two uniforms per call."""
        u1 = 1.0 - self.u01()  # (0, 1]: keeps the log finite
        u2 = self.u01()
        z = math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)
        return mu + sigma * z
