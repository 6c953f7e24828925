"""Threshold-plus-sample sparsification of cubic tensors.

Classification of an entry with squared magnitude a2 (thresholds from
compute_thresholds): a2 <= zero_threshold drops it, a2 >= keep_threshold
keeps it verbatim, and the middle band keeps it with probability
p = s * a2 / ||A||_F^2, rescaled to value / p.  The sampling decision is a
deterministic function of (seed, multi-index) via the keyed RNG, so the
sketch is bit-identical across runs and entry orders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .tensor import DenseTensor, SparseTensor

_STREAM_CHUNK = 1 << 16


class _ExactSum:
    """Shewchuk exact accumulation: correctly-rounded, order-independent total."""

    def __init__(self):
        self._partials = []

    def add(self, x: float) -> None:
        partials = self._partials
        i = 0
        for y in partials:
            if abs(x) < abs(y):
                x, y = y, x
            hi = x + y
            lo = y - (hi - x)
            if lo:
                partials[i] = lo
                i += 1
            x = hi
        partials[i:] = [x]

    def value(self) -> float:
        return math.fsum(self._partials)


@dataclass(frozen=True)
class Thresholds:
    zero_threshold: float
    keep_threshold: float
    frob_sq: float
    s: float


@dataclass(frozen=True)
class SketchResult:
    sketch: SparseTensor
    thresholds: Thresholds
    kept_large: int
    zeroed_small: int
    middle_sampled_kept: int
    middle_sampled_dropped: int
    seed: int
    expected_nnz: float


@dataclass(frozen=True)
class LevelBands:
    """Dyadic decomposition by squared magnitude relative to ||A||_F^2 / s."""

    bands: list  # SparseTensor for levels 1..len(bands)
    tail: SparseTensor
    s: float
    frob_sq: float
    ell: int  # floor(log2(n^(d/2) / ln^2 n))


def compute_thresholds(frob_sq: float, s: float, n: int, d: int) -> Thresholds:
    """Keep threshold frob_sq/s; zero threshold (ln^2 n / n^(d/2)) * frob_sq / s."""
    if frob_sq <= 0:
        raise ValueError("frob_sq must be positive")
    if s <= 0:
        raise ValueError("sampling parameter s must be positive")
    if n < 2 or d < 1:
        raise ValueError("need n >= 2 and d >= 1")
    keep = frob_sq / s
    zero = (math.log(n) ** 2 / n ** (d / 2)) * keep
    return Thresholds(zero_threshold=zero, keep_threshold=keep, frob_sq=frob_sq, s=s)


def _require_cubic(t: DenseTensor) -> None:
    if not t.is_cubic:
        raise ValueError(f"tensor must be cubic, got dims {t.dims}")


def _classify(sq: np.ndarray, th: Thresholds):
    """Boolean masks (small, large, middle) over nonzero squared magnitudes.

    Matches Algorithm order: the small test wins ties with the large test.
    """
    nz = sq > 0.0
    small = nz & (sq <= th.zero_threshold)
    large = nz & ~small & (sq >= th.keep_threshold)
    middle = nz & ~small & ~large
    return small, large, middle


def sparsify(t: DenseTensor, s: float, seed: int) -> SketchResult:
    """Run the sparsification algorithm on a cubic tensor."""
    _require_cubic(t)
    flat = t.values
    sq = flat * flat
    frob_sq = math.fsum(sq)  # exactly rounded: order-independent
    if frob_sq == 0.0:
        raise ValueError("cannot sparsify the zero tensor")
    th = compute_thresholds(frob_sq, s, t.dims[0], t.order)

    small, large, middle = _classify(sq, th)
    mid_flat = np.nonzero(middle)[0]
    p = s * sq[mid_flat] / frob_sq
    if mid_flat.size:
        mid_idx = np.column_stack(np.unravel_index(mid_flat, t.dims)).astype(np.uint64)
        u = kernels.keyed_uniforms(seed, mid_idx)
        keep_mask = u < p
    else:
        keep_mask = np.zeros(0, dtype=bool)

    large_flat = np.nonzero(large)[0]
    kept_flat = np.concatenate([large_flat, mid_flat[keep_mask]])
    kept_vals = np.concatenate([flat[large_flat], flat[mid_flat[keep_mask]] / p[keep_mask]])
    order = np.argsort(kept_flat, kind="stable")
    kept_flat = kept_flat[order]
    kept_vals = kept_vals[order]
    idx = np.column_stack(np.unravel_index(kept_flat, t.dims)).astype(np.int64)
    sketch = SparseTensor(t.dims, idx.reshape(len(kept_flat), t.order), kept_vals)

    return SketchResult(
        sketch=sketch,
        thresholds=th,
        kept_large=int(large.sum()),
        zeroed_small=int(small.sum()),
        middle_sampled_kept=int(keep_mask.sum()),
        middle_sampled_dropped=int((~keep_mask).sum()),
        seed=int(seed),
        expected_nnz=float(large.sum() + p.sum()),
    )


def expected_nnz(t: DenseTensor, s: float) -> float:
    """kept-verbatim count plus the sum of middle-band keep probabilities (<= 2s)."""
    _require_cubic(t)
    sq = t.values ** 2
    frob_sq = math.fsum(sq)  # exactly rounded: order-independent
    if frob_sq == 0.0:
        raise ValueError("cannot sparsify the zero tensor")
    th = compute_thresholds(frob_sq, s, t.dims[0], t.order)
    _, large, middle = _classify(sq, th)
    return float(large.sum() + (s * sq[middle] / frob_sq).sum())


def middle_band_probabilities(t: DenseTensor, s: float):
    """(multi-index array, p array) for the middle band; used by verifiers."""
    _require_cubic(t)
    sq = t.values ** 2
    frob_sq = math.fsum(sq)  # exactly rounded: order-independent
    if frob_sq == 0.0:
        raise ValueError("cannot sparsify the zero tensor")
    th = compute_thresholds(frob_sq, s, t.dims[0], t.order)
    _, _, middle = _classify(sq, th)
    mid_flat = np.nonzero(middle)[0]
    idx = np.column_stack(np.unravel_index(mid_flat, t.dims)).astype(np.int64)
    return idx.reshape(mid_flat.size, t.order), s * sq[mid_flat] / frob_sq


def level_decompose(t: DenseTensor, s: float) -> LevelBands:
    """Partition nonzeros into dyadic bands; summing all bands reconstructs A.

    Level 1 holds a2 >= frob_sq / (2 s); level k >= 2 holds
    a2 in [2^-k, 2^-k+1) * frob_sq / s.  Levels beyond
    ceil(log2(frob_sq / (s * min nonzero a2))) go to the tail band.
    """
    _require_cubic(t)
    if s <= 0:
        raise ValueError("sampling parameter s must be positive")
    flat = t.values
    sq = flat * flat
    frob_sq = float(np.sum(sq))
    if frob_sq == 0.0:
        raise ValueError("cannot decompose the zero tensor")
    nz = np.nonzero(sq)[0]
    r = s * sq[nz] / frob_sq
    level = np.maximum(1, -np.floor(np.log2(r))).astype(np.int64)
    min_r = float(r.min())
    kmax = max(1, math.ceil(-math.log2(min_r))) if min_r < 1.0 else 1

    def band(mask):
        sel = nz[mask]
        idx = np.column_stack(np.unravel_index(sel, t.dims)).astype(np.int64)
        return SparseTensor(t.dims, idx.reshape(sel.size, t.order), flat[sel])

    bands = [band(level == k) for k in range(1, kmax + 1)]
    tail = band(level > kmax)
    n, d = t.dims[0], t.order
    ell = math.floor(math.log2(n ** (d / 2) / math.log(n) ** 2))
    return LevelBands(bands=bands, tail=tail, s=float(s), frob_sq=frob_sq, ell=ell)


def stream_sparsify(entry_stream, dims, s: float, seed: int,
                    check_duplicates: bool = True) -> SketchResult:
    """Two-pass streaming variant: pass 1 accumulates the Frobenius norm,
    pass 2 classifies.  Output is bit-identical to sparsify() on the
    materialized tensor, regardless of stream order.

    entry_stream yields (multi-index, value) pairs; pass it as a re-iterable
    sequence or a zero-argument callable returning a fresh iterator.
    check_duplicates=False skips the seen-index set (O(input) memory) when
    the caller guarantees uniqueness.
    """
    dims = tuple(int(n) for n in dims)
    d = len(dims)
    if len(set(dims)) != 1:
        raise ValueError(f"dims must be cubic, got {dims}")
    if s <= 0:
        raise ValueError("sampling parameter s must be positive")

    def fresh():
        return iter(entry_stream()) if callable(entry_stream) else iter(entry_stream)

    acc = _ExactSum()
    count1 = 0
    seen = set() if check_duplicates else None
    for idx, v in fresh():
        idx = tuple(int(c) for c in idx)
        if len(idx) != d or any(c < 0 or c >= dims[j] for j, c in enumerate(idx)):
            raise ValueError(f"index {idx} out of range for dims {dims}")
        if seen is not None:
            if idx in seen:
                raise ValueError(f"duplicate index {idx} in stream")
            seen.add(idx)
        acc.add(float(v) * float(v))
        count1 += 1
    frob_sq = acc.value()
    if frob_sq == 0.0:
        raise ValueError("cannot sparsify the zero tensor")
    th = compute_thresholds(frob_sq, s, dims[0], d)

    kept_idx: list = []
    kept_val: list = []
    kept_large = zeroed_small = mid_kept = mid_dropped = 0
    exp_nnz = 0.0
    count2 = 0
    buf_idx: list = []
    buf_val: list = []

    def flush():
        nonlocal mid_kept, mid_dropped, exp_nnz
        if not buf_idx:
            return
        idx_arr = np.asarray(buf_idx, dtype=np.uint64)
        val_arr = np.asarray(buf_val, dtype=np.float64)
        p = s * val_arr * val_arr / frob_sq
        u = kernels.keyed_uniforms(seed, idx_arr)
        keep = u < p
        mid_kept += int(keep.sum())
        mid_dropped += int((~keep).sum())
        exp_nnz += float(p.sum())
        for row, v in zip(idx_arr[keep], val_arr[keep] / p[keep]):
            kept_idx.append(tuple(int(c) for c in row))
            kept_val.append(float(v))
        buf_idx.clear()
        buf_val.clear()

    for idx, v in fresh():
        idx = tuple(int(c) for c in idx)
        v = float(v)
        count2 += 1
        a2 = v * v
        if a2 == 0.0:
            continue
        if a2 <= th.zero_threshold:
            zeroed_small += 1
        elif a2 >= th.keep_threshold:
            kept_large += 1
            kept_idx.append(idx)
            kept_val.append(v)
        else:
            buf_idx.append(idx)
            buf_val.append(v)
            if len(buf_idx) >= _STREAM_CHUNK:
                flush()
    flush()
    if count2 != count1:
        raise ValueError("stream changed length between passes")
    exp_nnz += kept_large

    order = sorted(range(len(kept_idx)), key=lambda i: kept_idx[i])
    idx_arr = np.asarray([kept_idx[i] for i in order], dtype=np.int64)
    sketch = SparseTensor(
        dims, idx_arr.reshape(len(order), d), [kept_val[i] for i in order]
    )
    return SketchResult(
        sketch=sketch,
        thresholds=th,
        kept_large=kept_large,
        zeroed_small=zeroed_small,
        middle_sampled_kept=mid_kept,
        middle_sampled_dropped=mid_dropped,
        seed=int(seed),
        expected_nnz=exp_nnz,
    )
