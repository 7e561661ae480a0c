"""Portable 64-bit pseudo random numbers.

SplitMix64 is used everywhere randomness is needed so that generated datasets and
algorithm runs are reproducible bit-for-bit across platforms and implementations:

    state  <- state + 0x9E3779B97F4A7C15            (mod 2**64)
    z      <- state
    z      <- (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9  (mod 2**64)
    z      <- (z ^ (z >> 27)) * 0x94D049BB133111EB  (mod 2**64)
    output <- z ^ (z >> 31)

Floats in [0, 1) take the top 53 bits of one output. Normal deviates use the
Box-Muller transform on two consecutive uniforms (cosine branch only).
"""

import math

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z):
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed, *keys):
    """Split ``seed`` into an independent stream identified by ``keys``.

    Keys may be ints or strings; strings are folded in byte by byte.
    """
    h = mix64((seed + GOLDEN) & MASK64)
    for key in keys:
        if isinstance(key, str):
            values = list(key.encode("utf-8")) + [0xFF]
        else:
            values = [int(key) & MASK64]
        for v in values:
            h = mix64(((h ^ v) + GOLDEN) & MASK64)
    return h


class SplitMix64:
    def __init__(self, seed):
        self.state = int(seed) & MASK64

    def next_u64(self):
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def random(self):
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, low, high):
        return low + (high - low) * self.random()

    def integers(self, low, high):
        """Uniform integer in ``[low, high)`` by rejection (no modulo bias)."""
        span = high - low
        if span <= 0:
            raise ValueError("empty range")
        limit = (1 << 64) - ((1 << 64) % span)
        while True:
            v = self.next_u64()
            if v < limit:
                return low + v % span

    def normal(self, mu=0.0, sigma=1.0):
        u1 = self.random()
        u2 = self.random()
        # 1 - u1 lies in (0, 1], keeping the log finite
        r = math.sqrt(-2.0 * math.log(1.0 - u1))
        return mu + sigma * r * math.cos(2.0 * math.pi * u2)

    def permutation(self, n):
        """Fisher-Yates shuffle of ``range(n)``."""
        p = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.integers(0, i + 1)
            p[i], p[j] = p[j], p[i]
        return p

    def choice(self, n, k):
        """``k`` distinct indices from ``range(n)`` in draw order."""
        return self.permutation(n)[:k]
