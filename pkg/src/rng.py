"""
Seeded, splittable random stream used by every sampling check.

The generator is SplitMix64 in counter mode:

    output_i = mix64(seed + i * 0x9E3779B97F4A7C15)   (mod 2^64, i = 1, 2, ...)

    mix64(z):
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
        z = (z ^ (z >> 27)) * 0x94D049BB133111EB
        return z ^ (z >> 31)

A labelled child stream is seeded with mix64(seed ^ H(label)) where H is the
first 8 bytes (little-endian) of BLAKE2b(label). The child depends only on the
parent seed and the label, never on how much of the parent was consumed.
These formulas are part of the report format and must not change.
"""

import hashlib
import logging
from typing import Sequence, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def label_hash(label: str) -> int:
    digest = hashlib.blake2b(label.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


class Rng:
    """
    Counter-based SplitMix64 stream.

    Example:
        >>> rng = Rng(42)
        >>> child = rng.split("spread")
        >>> child.randbelow(7) == Rng(42).split("spread").randbelow(7)
        True
    """

    def __init__(self, seed: int, counter: int = 0):
        self.seed = seed & MASK64
        self.counter = counter

    def next_u64(self) -> int:
        self.counter += 1
        return mix64(self.seed + self.counter * GOLDEN_GAMMA)

    def split(self, label: str) -> "Rng":
        return Rng(mix64(self.seed ^ label_hash(label)))

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) without modulo bias."""
        if n <= 0:
            raise ValueError(f"randbelow needs a positive bound, got {n}")
        if n == 1:
            return 0
        limit = ((1 << 64) // n) * n
        while True:
            value = self.next_u64()
            if value < limit:
                return value % n

    def choice(self, items: Sequence[T]) -> T:
        if not items:
            raise ValueError("choice from an empty sequence")
        return items[self.randbelow(len(items))]

    def sample(self, items: Sequence[T], k: int) -> list[T]:
        """k distinct items, partial Fisher-Yates over a copy."""
        pool = list(items)
        if k > len(pool):
            raise ValueError(f"cannot sample {k} items from {len(pool)}")
        for i in range(k):
            j = i + self.randbelow(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed:#018x}, counter={self.counter})"
