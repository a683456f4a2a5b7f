"""Seedable, language-neutral random source.

The generator is xoshiro256** (Blackman and Vigna) with its 256-bit state
filled from four successive SplitMix64 outputs of the seed. Bounded draws
use rejection sampling on the raw 64-bit output::

    limit = 2**64 - (2**64 % n)
    repeat x = next64() until x < limit; return x % n

Any implementation following the above reproduces the same queries for the
same seed.
"""

from __future__ import annotations

from math import comb
from typing import MutableSequence, Protocol, Sequence, TypeVar

MASK64 = (1 << 64) - 1
T = TypeVar("T")


class RandomSource(Protocol):
    def randbelow(self, n: int) -> int: ...


def splitmix64(state: int) -> tuple[int, int]:
    """One SplitMix64 step; returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256:
    def __init__(self, seed: int = 0, state: Sequence[int] | None = None):
        if state is None:
            sm = seed & MASK64
            s = []
            for _ in range(4):
                sm, out = splitmix64(sm)
                s.append(out)
        else:
            s = [v & MASK64 for v in state]
        if len(s) != 4 or not any(s):
            raise ValueError("state must be four 64-bit words, not all zero")
        self.s = s

    def next64(self) -> int:
        s = self.s
        result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def randbelow(self, n: int) -> int:
        if n <= 0:
            raise ValueError("n must be positive")
        if n == 1:
            return 0
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next64()
            if x < limit:
                return x % n

    def random(self) -> float:
        return (self.next64() >> 11) * (1.0 / (1 << 53))


def shuffle(rng: RandomSource, items: MutableSequence[T]) -> None:
    """In-place Fisher-Yates, walking from the end."""
    for i in range(len(items) - 1, 0, -1):
        j = rng.randbelow(i + 1)
        items[i], items[j] = items[j], items[i]


def unrank_combination(n: int, k: int, rank: int) -> list[int]:
    """The ``rank``-th k-subset of range(n) in lexicographic order."""
    out = []
    start = 0
    for slot in range(k, 0, -1):
        for x in range(start, n):
            c = comb(n - x - 1, slot - 1)
            if rank < c:
                out.append(x)
                start = x + 1
                break
            rank -= c
    return out


def choose_subset(rng: RandomSource, pool: Sequence[T], k: int) -> list[T]:
    """Uniform k-subset of ``pool`` (kept in pool order) from a single draw."""
    if not 0 <= k <= len(pool):
        raise ValueError("subset size out of range")
    idx = unrank_combination(len(pool), k, rng.randbelow(comb(len(pool), k)))
    return [pool[i] for i in idx]


def set_partition(rng: RandomSource, items: Sequence[T], block: int) -> list[list[T]]:
    """Uniform partition of ``items`` into unordered blocks of size ``block``.

    The block holding the smallest remaining item is filled first, so each
    partition corresponds to exactly one sequence of draws.
    """
    rest = sorted(items)
    if block <= 0 or len(rest) % block:
        raise ValueError("item count must be a multiple of the block size")
    blocks = []
    while rest:
        head, tail = rest[0], rest[1:]
        mates = choose_subset(rng, tail, block - 1)
        blocks.append([head, *mates])
        taken = set(mates)
        rest = [x for x in tail if x not in taken]
    return blocks
