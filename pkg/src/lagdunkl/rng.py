"""Counter-based SplitMix64 stream.

Sample ``i`` of stream ``seed`` is ``mix(seed + (i + 1) * GAMMA)``, so any
implementation of the 64-bit finalizer reproduces the same numbers, and
substreams can be drawn without advancing shared state.
"""

from __future__ import annotations

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def splitmix64(seed: int, counters) -> np.ndarray:
    """Raw 64-bit outputs for the given counters (0-based)."""
    c = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & _MASK) + (c + np.uint64(1)) * np.uint64(GAMMA)
        return _mix(z)


def derive_seed(seed: int, label: str) -> int:
    """Independent child seed for a named substream."""
    h = seed & _MASK
    for ch in label.encode("utf-8"):
        h = int(splitmix64(h ^ ch, [0])[0])
    return h


class Stream:
    """Sequential view of a counter-based stream."""

    def __init__(self, seed: int):
        if not 0 <= int(seed) <= _MASK:
            raise ValueError("seed must be an unsigned 64-bit integer")
        self.seed = int(seed)
        self.counter = 0

    def u64(self, n: int) -> np.ndarray:
        out = splitmix64(self.seed, np.arange(self.counter, self.counter + n, dtype=np.uint64))
        self.counter += n
        return out

    def uniform(self, n: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
        """Doubles in ``[lo, hi)`` from the top 53 bits."""
        u = (self.u64(n) >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)
        return lo + (hi - lo) * u

    def log_uniform(self, n: int, lo: float, hi: float) -> np.ndarray:
        return np.exp(self.uniform(n, np.log(lo), np.log(hi)))

    def normal(self, n: int) -> np.ndarray:
        """Box-Muller normals (two uniforms per pair)."""
        m = (n + 1) // 2
        u1 = 1.0 - self.uniform(m)
        u2 = self.uniform(m)
        r = np.sqrt(-2.0 * np.log(u1))
        z = np.concatenate([r * np.cos(2 * np.pi * u2), r * np.sin(2 * np.pi * u2)])
        return z[:n]

    def signs(self, n: int) -> np.ndarray:
        return np.where(self.u64(n) >> np.uint64(63), -1.0, 1.0)
