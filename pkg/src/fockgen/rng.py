"""Portable seeded random numbers.

A plain splitmix64 stream, so that test states can be reproduced bit for bit
from the seed in any language::

    state += 0x9E3779B97F4A7C15            (mod 2**64)
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    out = z ^ (z >> 31)

Uniform doubles take the top 53 bits: ``(out >> 11) * 2**-53``.  Normal
deviates use Box-Muller on consecutive uniform pairs ``(u1, u2)`` with
``sqrt(-2 ln(1 - u1)) * cos(2 pi u2)``.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


class SplitMix64:
    def __init__(self, seed: int):
        self.state = int(seed) & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def block_u64(self, size: int) -> np.ndarray:
        """The next ``size`` outputs at once (same sequence as repeated :meth:`next_u64`)."""
        steps = np.arange(1, size + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = np.uint64(self.state) + steps * np.uint64(_GOLDEN)
            z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        self.state = (self.state + size * _GOLDEN) & _MASK
        return z ^ (z >> np.uint64(31))

    def uniform(self, size: int | None = None):
        if size is None:
            return (self.next_u64() >> 11) * 2.0**-53
        return (self.block_u64(size) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def normal(self, size: int):
        u = self.uniform(2 * size).reshape(size, 2)
        return np.sqrt(-2.0 * np.log1p(-u[:, 0])) * np.cos(2 * np.pi * u[:, 1])

    def complex_normal(self, size: int):
        return self.normal(size) + 1j * self.normal(size)


def random_hermitian(rng: SplitMix64, M: int) -> np.ndarray:
    z = rng.complex_normal(M * M).reshape(M, M)
    return 0.5 * (z + z.conj().T)


def random_vector(rng: SplitMix64, M: int) -> np.ndarray:
    return rng.complex_normal(M)
