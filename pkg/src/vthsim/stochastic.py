"""Seedable random deviates for the virtual-time simulations.

Every run owns one :class:`RandomStream`.  Streams are backed by numpy's
PCG64 bit generator (128-bit state, period 2**128), which produces the same
sequence for the same seed on every platform numpy supports.
"""
from __future__ import annotations

import numpy as np

GENERATOR = "numpy.random.PCG64"


def increment_from_uniform(r):
    """Waiting time ``-ln(r)`` for a deviate ``r`` in (0, 1].

    This is the unit-mean exponential inter-event time of a unit-rate
    Poisson process.
    """
    # "+ 0.0" turns -0.0 (r == 1) into 0.0
    return -np.log(r) + 0.0


class RandomStream:
    """Single-owner stream of uniform deviates and time increments."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed})"

    def uniform(self, size=None):
        """Uniform deviate(s) in (0, 1]; zero is excluded so the log is finite."""
        return 1.0 - self._gen.random(size)

    def time_increment(self, size=None):
        return increment_from_uniform(self.uniform(size))

    def integers(self, low: int, high: int, size=None):
        """Uniform integers in the closed range [low, high]."""
        return self._gen.integers(low, high, size=size, endpoint=True)


def spawn_streams(base_seed: int, n: int, start: int = 0) -> list[RandomStream]:
    """Streams for runs ``start .. start+n-1``, seeded ``base_seed + run_index``."""
    return [RandomStream(base_seed + i) for i in range(start, start + n)]
