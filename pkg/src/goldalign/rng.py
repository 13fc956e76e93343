"""Deterministic 64-bit generator for reproducible sampling.

The generator is splitmix64 (the finalizer of SplittableRandom), written out
here instead of delegating to ``random.Random`` so that a seed means the same
draw sequence in every runtime and on every platform:

    state <- (state + 0x9E3779B97F4A7C15) mod 2^64
    z <- state
    z <- ((z XOR (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2^64
    z <- ((z XOR (z >> 27)) * 0x94D049BB133111EB) mod 2^64
    output <- z XOR (z >> 31)

Bounded draws use rejection sampling, so they are exactly uniform; partial
Fisher-Yates selection builds on them for drawing without replacement.
"""

from __future__ import annotations

from typing import Sequence, TypeVar

T = TypeVar("T")

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    """splitmix64 stream; the seed fixes the entire draw sequence."""

    __slots__ = ("seed", "_state")

    def __init__(self, seed: int):
        self.seed = seed & _MASK64
        self._state = self.seed

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return (z ^ (z >> 31)) & _MASK64

    def below(self, n: int) -> int:
        """Uniform draw from range(n), unbiased via rejection sampling."""
        if n <= 0:
            raise ValueError(f"below() needs a positive bound, got {n}")
        limit = (_MASK64 + 1) - ((_MASK64 + 1) % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def choose(self, seq: Sequence[T], k: int) -> list[T]:
        """Draw k items without replacement (partial Fisher-Yates shuffle)."""
        pool = list(seq)
        if k < 0 or k > len(pool):
            raise ValueError(f"cannot draw {k} items from {len(pool)}")
        for i in range(k):
            j = i + self.below(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]
