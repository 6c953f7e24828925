"""Deterministic randomness helpers built on the keyed-RNG kernels.

Scalar helpers use plain Python integers (mod 2^64) and agree bit-for-bit
with the vectorized kernels; the tests cross-check this.
"""

from __future__ import annotations

import math

import numpy as np

from . import kernels

MASK64 = (1 << 64) - 1

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_SM_GAMMA = 0x9E3779B97F4A7C15
_SM_MIX1 = 0xBF58476D1CE4E5B9
_SM_MIX2 = 0x94D049BB133111EB


def splitmix64_int(x: int) -> int:
    """First SplitMix64 output for a single u64."""
    z = (x + _SM_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * _SM_MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _SM_MIX2) & MASK64
    return z ^ (z >> 31)


def fnv1a64_int(components) -> int:
    """FNV-1a-64 over u64 components serialized little-endian."""
    h = _FNV_OFFSET
    for comp in components:
        comp &= MASK64
        for b in range(8):
            h = ((h ^ ((comp >> (8 * b)) & 0xFF)) * _FNV_PRIME) & MASK64
    return h


def keyed_uniform(seed: int, index) -> float:
    """Single uniform in [0, 1) keyed by (seed, multi-index)."""
    key = (seed & MASK64) ^ fnv1a64_int(index)
    return splitmix64_int(key) * 2.0**-64


def derive_seed(seed: int, i: int) -> int:
    """Per-trial / per-restart seed: SplitMix64(seed XOR i)."""
    return splitmix64_int((seed & MASK64) ^ (i & MASK64))


def trial_seeds(seed: int, trials: int) -> np.ndarray:
    """Vectorized derive_seed for trial indices 0..trials-1."""
    return kernels.splitmix64(np.uint64(seed) ^ np.arange(trials, dtype=np.uint64))


class SplitMixStream:
    """Sequential SplitMix64 stream for internal use (start vectors etc.)."""

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _SM_GAMMA) & MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _SM_MIX1) & MASK64
        z = ((z ^ (z >> 27)) * _SM_MIX2) & MASK64
        return z ^ (z >> 31)

    def uniforms(self, k: int) -> np.ndarray:
        # output i is mix(state + (i+1) gamma), i.e. splitmix64(state + i gamma)
        base = (np.uint64(self._state)
                + np.arange(k, dtype=np.uint64) * np.uint64(_SM_GAMMA))
        self._state = (self._state + k * _SM_GAMMA) & MASK64
        return kernels.splitmix64(base).astype(np.float64) * 2.0**-64

    def gaussians(self, k: int) -> np.ndarray:
        """Standard normals via Box-Muller on consecutive uniform pairs."""
        m = (k + 1) // 2
        u1 = np.maximum(self.uniforms(m), 2.0**-64)
        u2 = self.uniforms(m)
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * math.pi * u2
        out = np.concatenate([r * np.cos(theta), r * np.sin(theta)])
        return out[:k]


def keyed_gaussians(seed: int, indices: np.ndarray) -> np.ndarray:
    """Standard normals keyed per index row via Box-Muller on keyed uniforms.

    For index row r the two uniforms come from rows (r, 0) and (r, 1).
    """
    indices = np.ascontiguousarray(indices, dtype=np.uint64)
    n = indices.shape[0]
    ext = np.empty((n, indices.shape[1] + 1), dtype=np.uint64)
    ext[:, :-1] = indices
    ext[:, -1] = 0
    u1 = np.maximum(kernels.keyed_uniforms(seed, ext), 2.0**-64)
    ext[:, -1] = 1
    u2 = kernels.keyed_uniforms(seed, ext)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * math.pi * u2)
