"""Pinned portable random number generator.

The stream is xoshiro256** seeded through splitmix64, implemented in pure
integer arithmetic so that any language can replay a seed bit-for-bit.
Constants are the published ones for both algorithms; the derived helpers
(unit doubles, bounded integers, normal deviates, seed splitting) are part
of the pinned contract and documented in the README.
"""

from __future__ import annotations

import math

MASK64 = 0xFFFFFFFFFFFFFFFF

_SM_GAMMA = 0x9E3779B97F4A7C15
_SM_MIX1 = 0xBF58476D1CE4E5B9
_SM_MIX2 = 0x94D049BB133111EB


def _splitmix64(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state; returns (new_state, output)."""
    state = (state + _SM_GAMMA) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * _SM_MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _SM_MIX2) & MASK64
    z = z ^ (z >> 31)
    return state, z


def splitmix64_sequence(seed: int, count: int) -> list[int]:
    """First `count` splitmix64 outputs for `seed` (64-bit wrap-around)."""
    state = seed & MASK64
    out = []
    for _ in range(count):
        state, z = _splitmix64(state)
        out.append(z)
    return out


def mix_seed(master_seed: int, index: int) -> int:
    """Derive a stream seed for ensemble member `index` from a master seed.

    Uses one splitmix64 step over master_seed + (index + 1) * gamma, so
    member streams are decorrelated and order-independent.
    """
    base = (master_seed + ((index + 1) * _SM_GAMMA)) & MASK64
    _, z = _splitmix64(base)
    return z


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256StarStar:
    """xoshiro256** stream with splitmix64 seeding.

    Not thread-safe; each pursuit owns a private instance.
    """

    def __init__(self, seed: int):
        self.seed = seed & MASK64
        state = self.seed
        s = []
        for _ in range(4):
            state, z = _splitmix64(state)
            s.append(z)
        self._s = s
        self._spare_normal: float | None = None

    def next_u64(self) -> int:
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
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def below(self, bound: int) -> int:
        """Integer in [0, bound) via 128-bit multiply-shift (Lemire)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        return (self.next_u64() * bound) >> 64

    def normal(self) -> float:
        """Standard normal deviate via Box-Muller; the pair's second value
        is cached so consecutive calls consume two uniforms per pair."""
        if self._spare_normal is not None:
            z = self._spare_normal
            self._spare_normal = None
            return z
        # u1 in (0, 1] so the log is finite.
        u1 = ((self.next_u64() >> 11) + 1) * 2.0**-53
        u2 = (self.next_u64() >> 11) * 2.0**-53
        r = math.sqrt(-2.0 * math.log(u1))
        theta = 2.0 * math.pi * u2
        self._spare_normal = r * math.sin(theta)
        return r * math.cos(theta)

    def normals(self, count: int) -> list[float]:
        return [self.normal() for _ in range(count)]
