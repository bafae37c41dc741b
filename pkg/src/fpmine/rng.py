"""Seeded, portable randomness for reproducible pipeline runs.

Every random decision in the pipeline flows through :class:`SplitMix64`, a
published 64-bit generator (Steele, Lea & Flood 2014) chosen over the stdlib
Mersenne Twister so that byte streams are reproducible from the algorithm
description alone, on any platform.  Shuffling is an explicit Fisher-Yates
so the permutation distribution is exactly uniform given a uniform generator.
"""

from __future__ import annotations

from typing import Iterable, Sequence, TypeVar

_MASK64 = (1 << 64) - 1

T = TypeVar("T")


class SplitMix64:
    """SplitMix64 generator; 64-bit state, 64-bit output per step."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) via rejection sampling (no modulo bias)."""
        if n <= 0:
            raise ValueError("randbelow requires n > 0")
        limit = ((1 << 64) // n) * n
        while True:
            draw = self.next_u64()
            if draw < limit:
                return draw % n

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in the inclusive range [lo, hi]."""
        if hi < lo:
            raise ValueError("empty range")
        return lo + self.randbelow(hi - lo + 1)

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]

    def choice(self, items: Sequence[T]) -> T:
        return items[self.randbelow(len(items))]

    def hex_string(self, n_chars: int) -> str:
        """Lowercase hex string of length n_chars (e.g. fake commit hashes)."""
        out = []
        while len(out) < n_chars:
            out.extend(f"{self.next_u64():016x}")
        return "".join(out[:n_chars])


def shuffle_with_seed(items: Iterable[T], seed: int) -> list[T]:
    """Return a seeded uniform permutation of *items* as a new list.

    Identical (items, seed) pairs yield identical output.
    """
    out = list(items)
    SplitMix64(seed).shuffle(out)
    return out
