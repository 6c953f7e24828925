# cython: boundscheck=False, wraparound=False, cdivision=True
"""Cython implementation of the keyed-RNG kernels (hot path).

Bit-identical to tsketch._kernels_py; see that module for the contract.
"""

import numpy as np

from libc.stdint cimport uint64_t

IMPL_NAME = "cython"

cdef uint64_t FNV_OFFSET = 0xCBF29CE484222325UL
cdef uint64_t FNV_PRIME = 0x100000001B3UL
cdef uint64_t SM_GAMMA = 0x9E3779B97F4A7C15UL
cdef uint64_t SM_MIX1 = 0xBF58476D1CE4E5B9UL
cdef uint64_t SM_MIX2 = 0x94D049BB133111EBUL


cdef inline uint64_t _fnv_row(const uint64_t* row, Py_ssize_t d) nogil:
    cdef uint64_t h = FNV_OFFSET
    cdef uint64_t comp
    cdef Py_ssize_t j
    cdef int b
    for j in range(d):
        comp = row[j]
        for b in range(8):
            h = (h ^ ((comp >> (8 * b)) & 0xFFUL)) * FNV_PRIME
    return h


cdef inline uint64_t _splitmix(uint64_t x) nogil:
    cdef uint64_t z = x + SM_GAMMA
    z = (z ^ (z >> 30)) * SM_MIX1
    z = (z ^ (z >> 27)) * SM_MIX2
    return z ^ (z >> 31)


def fnv1a64(indices):
    """FNV-1a-64 over rows of a (N, d) uint64 index array."""
    cdef uint64_t[:, ::1] idx = np.ascontiguousarray(indices, dtype=np.uint64)
    cdef Py_ssize_t n = idx.shape[0], d = idx.shape[1], i
    out = np.empty(n, dtype=np.uint64)
    cdef uint64_t[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = _fnv_row(&idx[i, 0], d)
    return out


def splitmix64(x):
    """First SplitMix64 output for each uint64 in x."""
    arr = np.ascontiguousarray(np.asarray(x, dtype=np.uint64).ravel())
    cdef uint64_t[::1] v = arr
    cdef Py_ssize_t n = v.shape[0], i
    out = np.empty(n, dtype=np.uint64)
    cdef uint64_t[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = _splitmix(v[i])
    return out.reshape(np.shape(x))


def keyed_uniforms(seed, indices):
    """Uniforms in [0, 1) keyed by (seed, multi-index) per the RNG contract."""
    cdef uint64_t s = <uint64_t> int(seed)
    cdef uint64_t[:, ::1] idx = np.ascontiguousarray(indices, dtype=np.uint64)
    cdef Py_ssize_t n = idx.shape[0], d = idx.shape[1], i
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef double scale = 2.0 ** -64
    with nogil:
        for i in range(n):
            o[i] = _splitmix(s ^ _fnv_row(&idx[i, 0], d)) * scale
    return out
