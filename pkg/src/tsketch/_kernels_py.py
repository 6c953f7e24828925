"""Numpy implementation of the keyed-RNG kernels.

Fallback used when the Cython extension is unavailable.  Both
implementations are bit-identical: uint64 arithmetic wraps mod 2^64.

Keyed-RNG contract: key = seed XOR FNV-1a-64 over the d little-endian
u64 index components; the uniform is SplitMix64(key)'s first output
scaled by 2^-64.
"""

import numpy as np

IMPL_NAME = "python"

_FNV_OFFSET = np.uint64(0xCBF29CE484222325)
_FNV_PRIME = np.uint64(0x100000001B3)
_SM_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_SM_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_SM_MIX2 = np.uint64(0x94D049BB133111EB)
_BYTE = np.uint64(0xFF)


def fnv1a64(indices):
    """FNV-1a-64 over rows of a (N, d) uint64 index array."""
    indices = np.ascontiguousarray(indices, dtype=np.uint64)
    if indices.ndim != 2:
        raise ValueError("indices must be a 2-d array")
    h = np.full(indices.shape[0], _FNV_OFFSET, dtype=np.uint64)
    for j in range(indices.shape[1]):
        comp = indices[:, j]
        for b in range(8):
            h = (h ^ ((comp >> np.uint64(8 * b)) & _BYTE)) * _FNV_PRIME
    return h


def splitmix64(x):
    """First SplitMix64 output for each uint64 in x."""
    z = np.asarray(x, dtype=np.uint64) + _SM_GAMMA
    z = (z ^ (z >> np.uint64(30))) * _SM_MIX1
    z = (z ^ (z >> np.uint64(27))) * _SM_MIX2
    return z ^ (z >> np.uint64(31))


def keyed_uniforms(seed, indices):
    """Uniforms in [0, 1) keyed by (seed, multi-index) per the RNG contract."""
    keys = np.uint64(seed) ^ fnv1a64(indices)
    return splitmix64(keys).astype(np.float64) * 2.0**-64
