"""Reproducible random streams.

Every stochastic routine in the package draws from a :class:`SeededRng`, a
counter-based Philox-128 generator keyed by ``(seed, stream)``.  Distinct
stream indices under the same seed give statistically independent streams, so
parallel replicas never need to coordinate.  All consumption goes through
uniform doubles (inverse-transform for exponentials), which keeps output
streams stable for a fixed numpy install.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["SeededRng"]

_MASK64 = (1 << 64) - 1


class SeededRng:
    """A named random stream identified by (seed, stream)."""

    def __init__(self, seed: int, stream: int = 0):
        if seed < 0 or stream < 0:
            raise ValueError("seed and stream must be nonnegative integers")
        self.seed = int(seed)
        self.stream = int(stream)
        key = np.array([self.seed & _MASK64, self.stream & _MASK64], dtype=np.uint64)
        self.generator = np.random.Generator(np.random.Philox(key=key))

    def spawn(self, stream: int) -> "SeededRng":
        """Fresh stream under the same seed (independent of this one)."""
        return SeededRng(self.seed, stream)

    def random(self, size=None):
        """Uniform doubles in [0, 1)."""
        return self.generator.random(size)

    def exponential(self, rate: float) -> float:
        """Exp(rate) waiting time via inverse transform of one uniform."""
        if rate <= 0.0:
            raise ValueError("rate must be positive")
        u = self.generator.random()
        return -math.log1p(-u) / rate

    def __repr__(self) -> str:
        return f"SeededRng(seed={self.seed}, stream={self.stream})"
