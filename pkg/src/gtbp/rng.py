"""Deterministic random streams.

Every random draw in this package goes through a RandomStream so that runs
are reproducible bit for bit from a single integer seed. The underlying
generator is numpy's PCG64 and is part of the contract: changing it would
change every downstream result, so it stays fixed.

Child streams are derived from the parent's seed by integer mixing
(SplitMix64 finalizer), never by consuming parent state. This makes
stream derivation independent of how much the parent has been used,
which is what allows trials to run in any order or in parallel.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    """SplitMix64 finalizer. Bijective on 64-bit ints, well scrambled."""
    z &= _MASK64
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
    return z ^ (z >> 31)


class RandomStream:
    """Seedable, splittable source of uniform doubles in [0, 1).

    Parameters
    ----------
    seed : int
        Any Python integer; reduced modulo 2**64.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK64
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def uniform(self) -> float:
        """One uniform double in [0, 1)."""
        return float(self._gen.random())

    def uniforms(self, n: int) -> np.ndarray:
        """Array of n uniform doubles in [0, 1), drawn in index order."""
        if n < 0:
            raise ValueError("n must be >= 0")
        return self._gen.random(n)

    def split(self, key: int) -> "RandomStream":
        """Derive an independent child stream.

        The child seed is mix64(seed XOR mix64((key + 1) * golden)); it
        depends only on (seed, key), not on draws already made.
        """
        k = _mix64(((int(key) + 1) * _GOLDEN) & _MASK64)
        return RandomStream(_mix64(self.seed ^ k))

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed})"


def trial_stream(base_seed: int, trial_index: int) -> RandomStream:
    """Stream for one Monte Carlo trial, independent of all other trials."""
    if trial_index < 0:
        raise ValueError("trial_index must be >= 0")
    return RandomStream(base_seed).split(trial_index)
