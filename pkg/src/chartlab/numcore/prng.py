"""Seeded splitmix64 random streams.

Every random decision in the project flows through a PrngStream so that
(seed, stream_id) fully determines a draw sequence on any platform.
splitmix64 is counter-based: output k is a pure function of
state0 + (k+1)*GAMMA, which makes vectorised array draws exact replicas
of repeated scalar draws.
"""

from __future__ import annotations

import math

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_U64_GAMMA = np.uint64(GAMMA)
_U64_MIX1 = np.uint64(_MIX1)
_U64_MIX2 = np.uint64(_MIX2)


def mix64(x: int) -> int:
    """splitmix64 output scrambler (no gamma increment). mix64(0) == 0."""
    z = x & MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def fnv1a64(text: str) -> int:
    """FNV-1a hash of a string, for deriving stream components from ids."""
    h = 0xCBF29CE484222325
    for b in text.encode("utf-8"):
        h = ((h ^ b) * 0x100000001B3) & MASK64
    return h


def _fold_components(stream_id: int, components) -> int:
    h = stream_id & MASK64
    for c in components:
        h = mix64(h ^ ((int(c) + GAMMA) & MASK64))
    return h


class PrngStream:
    """One independent splitmix64 sequence.

    stream_id 0 reproduces the reference splitmix64 sequence for the seed;
    nonzero ids perturb the initial state through the output scrambler.
    """

    algorithm = "splitmix64"

    __slots__ = ("seed", "stream_id", "state")

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = seed & MASK64
        self.stream_id = stream_id & MASK64
        self.state = (self.seed ^ mix64(self.stream_id)) & MASK64

    def child(self, *components) -> "PrngStream":
        """Derive an independent stream keyed by integer components.

        String components are hashed; the parent's own state is untouched.
        """
        ints = [fnv1a64(c) if isinstance(c, str) else int(c) for c in components]
        return PrngStream(self.seed, _fold_components(self.stream_id, ints))

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)

    def next_u64_array(self, n: int) -> np.ndarray:
        ks = np.arange(1, n + 1, dtype=np.uint64)
        z = np.uint64(self.state) + ks * _U64_GAMMA
        z = (z ^ (z >> np.uint64(30))) * _U64_MIX1
        z = (z ^ (z >> np.uint64(27))) * _U64_MIX2
        z = z ^ (z >> np.uint64(31))
        self.state = (self.state + n * GAMMA) & MASK64
        return z

    def uniform(self) -> float:
        """One draw in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform_array(self, n: int) -> np.ndarray:
        return (self.next_u64_array(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def uniform_range(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.uniform()

    def randrange(self, n: int) -> int:
        """Integer in [0, n) via the multiply-shift reduction."""
        if n <= 0:
            raise ValueError("randrange needs n >= 1")
        return (self.next_u64() * n) >> 64

    def randint(self, lo: int, hi: int) -> int:
        """Integer in [lo, hi] inclusive."""
        return lo + self.randrange(hi - lo + 1)

    def choice(self, seq):
        return seq[self.randrange(len(seq))]

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randrange(i + 1)
            items[i], items[j] = items[j], items[i]

    def normal(self) -> float:
        """Standard normal via Box-Muller; consumes two uniforms."""
        u1 = 1.0 - self.uniform()  # (0, 1], keeps log finite
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def normal_array(self, n: int) -> np.ndarray:
        m = (n + 1) // 2
        u1 = 1.0 - self.uniform_array(m)
        u2 = self.uniform_array(m)
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * np.pi * u2
        out = np.empty(2 * m, dtype=np.float64)
        out[0::2] = r * np.cos(theta)
        out[1::2] = r * np.sin(theta)
        return out[:n]
