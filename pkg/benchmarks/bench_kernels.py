"""Benchmark the compiled keyed-RNG kernels against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--rows N] [--repeat K]
"""

import argparse
import time

import numpy as np

from tsketch import _kernels_py, kernels
from tsketch.tensor import DenseTensor
from tsketch.sparsify import sparsify


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rows", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    idx = rng.integers(0, 2**63, size=(args.rows, 3)).astype(np.uint64)
    seed = 12345

    impls = [("active ({})".format(kernels.IMPL_NAME), kernels)]
    if kernels.IMPL_NAME != "python":
        impls.append(("python", _kernels_py))

    print(f"keyed_uniforms on {args.rows} x 3 indices (best of {args.repeat}):")
    base = None
    for name, mod in impls:
        t = _time(lambda m=mod: m.keyed_uniforms(seed, idx), args.repeat)
        speedup = "" if base is None else f"  ({t / base:.1f}x slower than active)"
        base = base or t
        print(f"  {name:>16}: {t * 1e3:8.2f} ms{speedup}")

    n = 400
    t = DenseTensor(rng.standard_normal((n, n)))
    print(f"\nsparsify of a {n}x{n} gaussian matrix, s = {n}:")
    dt = _time(lambda: sparsify(t, float(n), seed=1), args.repeat)
    print(f"  active ({kernels.IMPL_NAME}): {dt * 1e3:8.2f} ms")
    print("\n(set TSKETCH_PURE_PYTHON=1 to force the fallback package-wide)")


if __name__ == "__main__":
    main()
