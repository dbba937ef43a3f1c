"""Portable seeded randomness.

All randomness in the package flows through :class:`SplitMix64` so that split
files and synthetic collections are reproducible bit-for-bit on any platform and
in any language. The algorithm is pinned:

* generator: SplitMix64 (Steele, Lea & Flood 2014), state += 0x9E3779B97F4A7C15,
  output mixed with constants 0xBF58476D1CE4E5B9 / 0x94D049BB133111EB, shifts 30/27/31;
* substreams: ``derive_seed(seed, *parts)`` folds each integer part into the
  seed with ``h = mix64(h ^ mix64(part + 0x9E3779B97F4A7C15))`` starting from
  ``h = mix64(seed)``;
* bounded integers: rejection sampling on the full 64-bit output, ``x % bound``
  accepted only when ``x < 2**64 - (2**64 % bound)``;
* sampling without replacement: partial Fisher-Yates over ``range(m)``.
"""

from __future__ import annotations

from typing import List, Sequence, TypeVar

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

T = TypeVar("T")


def mix64(z: int) -> int:
    """SplitMix64 output finalizer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *parts: int) -> int:
    h = mix64(seed)
    for part in parts:
        h = mix64(h ^ mix64(part + _GOLDEN))
    return h


class SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    @classmethod
    def substream(cls, seed: int, *parts: int) -> "SplitMix64":
        return cls(derive_seed(seed, *parts))

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & MASK64
        return mix64(self.state)

    def below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)``."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % bound

    def sample_indices(self, m: int, k: int) -> List[int]:
        """``k`` distinct indices from ``range(m)``, in draw order."""
        if not 0 <= k <= m:
            raise ValueError(f"cannot draw {k} items from {m}")
        pool = list(range(m))
        for t in range(k):
            j = t + self.below(m - t)
            pool[t], pool[j] = pool[j], pool[t]
        return pool[:k]

    def shuffled(self, items: Sequence[T]) -> List[T]:
        return [items[i] for i in self.sample_indices(len(items), len(items))]

    def choice(self, items: Sequence[T]) -> T:
        return items[self.below(len(items))]
