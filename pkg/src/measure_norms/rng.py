"""SplitMix64, the single random source behind every generated instance.

State update and output mix follow Steele, Lea and Flood (2014)::

    state += 0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    return z ^ (z >> 31)

all arithmetic modulo 2**64. Uniform doubles use the top 53 bits:
``(next() >> 11) * 2**-53``, a value in [0, 1).
"""

from __future__ import annotations

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

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def integers(self, lo: int, hi: int) -> int:
        """Integer in the closed range [lo, hi]."""
        span = hi - lo + 1
        return lo + int(self.random() * span)

    def uniforms(self, count: int, lo: float = 0.0, hi: float = 1.0) -> list[float]:
        return [self.uniform(lo, hi) for _ in range(count)]

    def fork(self, index: int) -> "SplitMix64":
        """Independent child stream for trial ``index``; does not advance self."""
        child = SplitMix64(self.state ^ ((int(index) * _GOLDEN) & _MASK))
        child.next_u64()
        return child
