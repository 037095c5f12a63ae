"""Counter-based random streams, one per walker.

Every uniform is a pure function of ``(seed, walker_index, draw_counter)``:
the stream key is a hash of the seed and walker index, and draw ``k`` is the
SplitMix64 finalizer applied to ``key + (k + 1) * GOLDEN``. Walks can therefore
run in any order, on any number of threads, and still consume identical
numbers.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

from .geometry import Vec3

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_INDEX_GAMMA = np.uint64(0xD1B54A32D192ED03)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_INV_2_53 = 1.0 / 9007199254740992.0

U64_MASK = (1 << 64) - 1


@njit(cache=True)
def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True)
def stream_key(seed, index):
    return mix64(mix64(seed + _GOLDEN) + (index + _ONE) * _INDEX_GAMMA)


@njit(cache=True)
def uniform_at(key, counter):
    """Draw number ``counter`` (0-based) of the stream with ``key``; in [0, 1)."""
    bits = mix64(key + (counter + _ONE) * _GOLDEN)
    return float(bits >> _S11) * _INV_2_53


@njit(cache=True)
def direction_from_uniforms(u, v):
    cos_t = 2.0 * u - 1.0
    sin_t = math.sqrt(max(0.0, 1.0 - cos_t * cos_t))
    phi = 2.0 * math.pi * v
    return sin_t * math.cos(phi), sin_t * math.sin(phi), cos_t


def _as_u64(value: int, name: str) -> np.uint64:
    value = int(value)
    if not 0 <= value <= U64_MASK:
        raise ValueError(f"{name} must be in [0, 2**64), got {value}")
    return np.uint64(value)


class RngStream:
    """Independent uniform stream for one walker.

    ``counter`` is the number of draws consumed so far.
    """

    __slots__ = ("seed", "index", "counter", "_key")

    def __init__(self, seed: int, index: int, counter: int = 0):
        self.seed = int(seed)
        self.index = int(index)
        self.counter = int(counter)
        # numba boxes uint64 results as Python ints; keep the numpy type
        self._key = np.uint64(stream_key(_as_u64(seed, "seed"), _as_u64(index, "walker_index")))

    @property
    def key(self) -> np.uint64:
        return self._key

    def uniform(self) -> float:
        u = uniform_at(self._key, np.uint64(self.counter))
        self.counter += 1
        return u

    def uniforms(self, n: int) -> np.ndarray:
        """Next ``n`` draws as an array (same values as ``n`` calls to ``uniform``)."""
        out = _fill(self._key, np.uint64(self.counter), n)
        self.counter += n
        return out

    def sample_unit_sphere(self) -> Vec3:
        """Uniform direction on the unit sphere; consumes ``cos(theta)`` then azimuth."""
        u = self.uniform()
        v = self.uniform()
        return Vec3(*direction_from_uniforms(u, v))

    def unit_vectors(self, n: int) -> np.ndarray:
        """``n`` successive ``sample_unit_sphere`` results as an ``(n, 3)`` array."""
        out = _fill_directions(self._key, np.uint64(self.counter), n)
        self.counter += 2 * n
        return out

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, index={self.index}, counter={self.counter})"


@njit(cache=True)
def _fill(key, start, n):
    out = np.empty(n)
    for i in range(n):
        out[i] = uniform_at(key, start + np.uint64(i))
    return out


@njit(cache=True)
def _fill_directions(key, start, n):
    out = np.empty((n, 3))
    c = start
    for i in range(n):
        u = uniform_at(key, c)
        v = uniform_at(key, c + np.uint64(1))
        c += np.uint64(2)
        out[i, 0], out[i, 1], out[i, 2] = direction_from_uniforms(u, v)
    return out


def make_stream(seed: int, walker_index: int) -> RngStream:
    return RngStream(seed, walker_index)
