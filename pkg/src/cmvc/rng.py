"""Deterministic hashing and pseudorandom streams.

Fixed-width integer arithmetic only, so identical seeds give identical
output on every platform. The random keyframe sampler, the text
modulation field and the text-placeholder frames all depend on this.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash of a byte string."""
    h = _FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * _FNV_PRIME) & _MASK64
    return h


def _mix(z: int) -> int:
    z ^= z >> 30
    z = (z * _MIX1) & _MASK64
    z ^= z >> 27
    z = (z * _MIX2) & _MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Sequential splitmix64 stream."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        return _mix(self._state)

    def next_below(self, bound: int) -> int:
        if bound <= 0:
            raise ValueError("bound must be positive")
        return self.next_u64() % bound

    def next_unit(self) -> float:
        """Uniform float in [0, 1) with 53 bits of entropy."""
        return (self.next_u64() >> 11) * 2.0**-53


def splitmix64_array(seed: int, count: int) -> np.ndarray:
    """The first `count` draws of SplitMix64(seed), vectorised.

    Draw i equals mix(seed + i * gamma), which is exactly what the
    sequential stream produces; uint64 arithmetic wraps mod 2**64.
    """
    if count == 0:
        return np.empty(0, dtype=np.uint64)
    idx = np.arange(1, count + 1, dtype=np.uint64)
    z = np.uint64(seed & _MASK64) + idx * np.uint64(_GAMMA)
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(_MIX1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def uniform_field(seed: int, shape: tuple[int, ...]) -> np.ndarray:
    """Deterministic field of floats in [-1, 1) with the given shape."""
    n = int(np.prod(shape)) if shape else 1
    draws = splitmix64_array(seed, n)
    unit = (draws >> np.uint64(11)).astype(np.float64) * 2.0**-53
    return (2.0 * unit - 1.0).reshape(shape)


def byte_field(seed: int, shape: tuple[int, ...]) -> np.ndarray:
    """Deterministic uint8 field with the given shape."""
    n = int(np.prod(shape)) if shape else 1
    draws = splitmix64_array(seed, n)
    return (draws & np.uint64(0xFF)).astype(np.uint8).reshape(shape)
