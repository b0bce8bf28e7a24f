"""
Deterministic 64-bit generator for instance sampling
"""
from __future__ import annotations

from fractions import Fraction

MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 stream; identical output on every platform for a given seed."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def thousandths(self, low: int, high: int) -> Fraction:
        """Uniform k/1000 with low < k <= high."""
        return Fraction(low + 1 + self.below(high - low), 1000)

    def coin(self) -> bool:
        return bool(self.next_u64() >> 63)
