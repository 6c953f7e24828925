"""Keyed-RNG kernels against an independent big-integer oracle."""

import numpy as np
import pytest

from tsketch import _kernels_py, kernels
from tsketch.rng import SplitMixStream, derive_seed, keyed_uniform, trial_seeds

MASK = (1 << 64) - 1


def oracle_fnv1a64(components):
    h = 0xCBF29CE484222325
    for comp in components:
        for byte in int(comp).to_bytes(8, "little"):
            h = ((h ^ byte) * 0x100000001B3) & MASK
    return h


def oracle_splitmix64(x):
    z = (x + 0x9E3779B97F4A7C15) & MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def oracle_uniform(seed, index):
    return oracle_splitmix64((seed & MASK) ^ oracle_fnv1a64(index)) * 2.0**-64


def test_splitmix64_known_vector():
    # first output of the reference SplitMix64 stream seeded with 0
    assert int(kernels.splitmix64(np.array([0], dtype=np.uint64))[0]) == 0xE220A8397B1DCDAF


@pytest.mark.parametrize("d", [1, 2, 3, 5])
def test_keyed_uniforms_match_oracle(d):
    rng = np.random.default_rng(d)
    idx = rng.integers(0, 2**63, size=(200, d)).astype(np.uint64)
    seed = int(rng.integers(0, 2**63))
    got = kernels.keyed_uniforms(seed, idx)
    want = [oracle_uniform(seed, row) for row in idx]
    assert got.tolist() == want


def test_python_fallback_bit_identical():
    rng = np.random.default_rng(7)
    idx = rng.integers(0, 2**64, size=(500, 3), dtype=np.uint64)
    seed = 0xDEADBEEF
    a = kernels.keyed_uniforms(seed, idx)
    b = _kernels_py.keyed_uniforms(seed, idx)
    assert np.array_equal(a, b)
    assert np.array_equal(kernels.fnv1a64(idx), _kernels_py.fnv1a64(idx))
    keys = rng.integers(0, 2**64, size=100, dtype=np.uint64)
    assert np.array_equal(kernels.splitmix64(keys), _kernels_py.splitmix64(keys))


def test_scalar_helpers_match_kernels():
    idx = np.array([[3, 1, 4]], dtype=np.uint64)
    assert keyed_uniform(42, [3, 1, 4]) == kernels.keyed_uniforms(42, idx)[0]
    assert derive_seed(42, 5) == oracle_splitmix64(42 ^ 5)
    assert trial_seeds(42, 10).tolist() == [oracle_splitmix64(42 ^ i) for i in range(10)]


def test_stream_is_sequential_splitmix():
    s = SplitMixStream(99)
    first = s.next_u64()
    assert first == oracle_splitmix64(99)
    s2 = SplitMixStream(99)
    outs = [s2.next_u64() for _ in range(3)]
    assert outs[0] == first
    assert len(set(outs)) == 3


def test_gaussians_shape_and_determinism():
    a = SplitMixStream(1).gaussians(7)
    b = SplitMixStream(1).gaussians(7)
    assert a.shape == (7,)
    assert np.array_equal(a, b)
