"""Portable seeded random streams.

Every stream is a xoshiro256** generator whose 256-bit state is filled by four
successive splitmix64 outputs. The splitmix64 seed of a named stream is

    sub_seed = int.from_bytes(blake2b(seed.to_bytes(8, "little") + name.encode("utf-8"),
                                      digest_size=8).digest(), "little")

so the sequence depends only on (global seed, name) and is identical on every
platform. Floats are built from the top 53 bits of a 64-bit draw.
"""

import hashlib
import math
from typing import List, MutableSequence, TypeVar

MASK64 = (1 << 64) - 1

T = TypeVar("T")


def splitmix64(state: int) -> tuple:
    """Advance a splitmix64 state; returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def derive_seed(seed: int, name: str) -> int:
    """Hash (global seed, stream name) into a 64-bit sub-seed."""
    digest = hashlib.blake2b(
        (seed & MASK64).to_bytes(8, "little") + name.encode("utf-8"),
        digest_size=8,
    ).digest()
    return int.from_bytes(digest, "little")


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class RandomStream:
    """A named, reproducible stream of pseudo-random numbers."""

    def __init__(self, name: str, seed: int):
        self.name = name
        self.seed = seed & MASK64
        state = derive_seed(self.seed, name)
        words = []
        for _ in range(4):
            state, out = splitmix64(state)
            words.append(out)
        if not any(words):
            words[0] = 1
        self._s: List[int] = words
        self._spare_gauss = None

    def __repr__(self) -> str:
        return f"RandomStream(name={self.name!r}, seed={self.seed})"

    def next_u64(self) -> int:
        """Next raw 64-bit output (xoshiro256**)."""
        s = self._s
        result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def random(self) -> float:
        """Uniform float in [0, 1)."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, a: float, b: float) -> float:
        return a + (b - a) * self.random()

    def randbelow(self, n: int) -> int:
        """Unbiased integer in [0, n) by rejection sampling."""
        if n <= 0:
            raise ValueError("n must be positive")
        bits = n.bit_length()
        while True:
            r = self.next_u64() >> (64 - bits) if bits < 64 else self.next_u64()
            if r < n:
                return r

    def gauss(self, mu: float = 0.0, sigma: float = 1.0) -> float:
        """Normal variate via the Box-Muller transform."""
        if self._spare_gauss is not None:
            z = self._spare_gauss
            self._spare_gauss = None
            return mu + sigma * z
        u1 = 1.0 - self.random()  # (0, 1]
        u2 = self.random()
        radius = math.sqrt(-2.0 * math.log(u1))
        self._spare_gauss = radius * math.sin(2.0 * math.pi * u2)
        return mu + sigma * radius * math.cos(2.0 * math.pi * u2)

    def shuffle(self, seq: MutableSequence[T]) -> None:
        """Fisher-Yates shuffle in place."""
        for i in range(len(seq) - 1, 0, -1):
            j = self.randbelow(i + 1)
            seq[i], seq[j] = seq[j], seq[i]

    def uniform_array(self, low: float, high: float, count: int) -> List[float]:
        return [self.uniform(low, high) for _ in range(count)]

    def fork(self, name: str) -> "RandomStream":
        """A child stream named ``<parent>/<name>`` under the same seed."""
        return RandomStream(f"{self.name}/{name}", self.seed)
