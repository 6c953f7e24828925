"""Dense and sparse tensor types, norms, mode contractions, and file I/O.

Conventions: row-major flat storage (last index fastest), 0-based indices
everywhere, float64 values.  Modes are numbered 1..d in the contraction
API.  All types are immutable after construction.
"""

from __future__ import annotations

import struct
from typing import Iterable, Sequence, Union

import numpy as np

DENSE_MAGIC = b"DTNS"
DENSE_VERSION = 1


class TensorFormatError(ValueError):
    """Malformed on-disk tensor data."""


class DenseTensor:
    """Order-d array of float64 values."""

    __slots__ = ("_data",)

    def __init__(self, data):
        arr = np.array(data, dtype=np.float64, order="C")
        if arr.ndim < 1:
            raise ValueError("tensor order must be >= 1")
        if any(n < 1 for n in arr.shape):
            raise ValueError("all dims must be >= 1")
        if not np.all(np.isfinite(arr)):
            raise ValueError("tensor values must be finite")
        arr.setflags(write=False)
        self._data = arr

    @classmethod
    def from_flat(cls, dims: Sequence[int], values: Sequence[float]) -> "DenseTensor":
        dims = tuple(int(n) for n in dims)
        vals = np.asarray(values, dtype=np.float64)
        expected = int(np.prod(dims))
        if vals.size != expected:
            raise ValueError(
                f"values length {vals.size} does not match product of dims {expected}"
            )
        return cls(vals.reshape(dims))

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def order(self) -> int:
        return self._data.ndim

    @property
    def dims(self) -> tuple:
        return self._data.shape

    @property
    def values(self) -> np.ndarray:
        """Flat row-major view of the values."""
        return self._data.reshape(-1)

    @property
    def is_cubic(self) -> bool:
        return len(set(self._data.shape)) == 1

    def __eq__(self, other):
        if not isinstance(other, DenseTensor):
            return NotImplemented
        return self.dims == other.dims and np.array_equal(self._data, other._data)

    def __hash__(self):
        return hash((self.dims, self._data.tobytes()))

    def __repr__(self):
        return f"DenseTensor(dims={self.dims})"


class SparseTensor:
    """Coordinate-list tensor: strictly lex-sorted unique indices, no zeros."""

    __slots__ = ("_dims", "_indices", "_values")

    def __init__(self, dims: Sequence[int], indices, values):
        dims = tuple(int(n) for n in dims)
        if len(dims) < 1 or any(n < 1 for n in dims):
            raise ValueError("invalid dims")
        idx = np.asarray(indices, dtype=np.int64).reshape(-1, len(dims))
        vals = np.asarray(values, dtype=np.float64).reshape(-1)
        if idx.shape[0] != vals.size:
            raise ValueError("indices/values length mismatch")
        if np.any(idx < 0) or np.any(idx >= np.asarray(dims, dtype=np.int64)):
            raise ValueError("index component out of range")
        if np.any(vals == 0.0):
            raise ValueError("stored zero value")
        if idx.shape[0] > 1:
            flat = np.ravel_multi_index(idx.T, dims)
            if np.any(np.diff(flat) <= 0):
                raise ValueError("indices not strictly lexicographically sorted")
        idx.setflags(write=False)
        vals.setflags(write=False)
        self._dims = dims
        self._indices = idx
        self._values = vals

    @classmethod
    def from_entries(cls, dims: Sequence[int], entries: Iterable) -> "SparseTensor":
        """Build from (multi-index, value) pairs; sorts and drops nothing."""
        entries = sorted(entries, key=lambda e: tuple(e[0]))
        idx = [tuple(e[0]) for e in entries]
        vals = [float(e[1]) for e in entries]
        arr = np.asarray(idx, dtype=np.int64).reshape(len(vals), len(tuple(dims)))
        return cls(dims, arr, vals)

    @property
    def dims(self) -> tuple:
        return self._dims

    @property
    def order(self) -> int:
        return len(self._dims)

    @property
    def indices(self) -> np.ndarray:
        return self._indices

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def nnz(self) -> int:
        return self._values.size

    @property
    def entries(self) -> list:
        return [
            (tuple(int(c) for c in row), float(v))
            for row, v in zip(self._indices, self._values)
        ]

    def __eq__(self, other):
        if not isinstance(other, SparseTensor):
            return NotImplemented
        return (
            self._dims == other._dims
            and np.array_equal(self._indices, other._indices)
            and np.array_equal(self._values, other._values)
        )

    def __hash__(self):
        return hash((self._dims, self._indices.tobytes(), self._values.tobytes()))

    def __repr__(self):
        return f"SparseTensor(dims={self._dims}, nnz={self.nnz})"


def frobenius_norm(t: Union[DenseTensor, SparseTensor]) -> float:
    """Square root of the sum of squared entries."""
    if isinstance(t, SparseTensor):
        return float(np.sqrt(np.sum(t.values**2)))
    return float(np.sqrt(np.sum(t.data**2)))


def mode_contract(t: DenseTensor, x, mode: int):
    """Contract mode `mode` (1-based) with vector x; order drops by one.

    Returns a DenseTensor of order d-1, or a float when d == 1.
    """
    if not 1 <= mode <= t.order:
        raise ValueError(f"mode {mode} out of range [1, {t.order}]")
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.size != t.dims[mode - 1]:
        raise ValueError(
            f"vector length {x.size} does not match dim {t.dims[mode - 1]} of mode {mode}"
        )
    out = np.tensordot(t.data, x, axes=([mode - 1], [0]))
    if out.ndim == 0:
        return float(out)
    return DenseTensor(out)


def multi_contract(t: DenseTensor, xs: Sequence, modes: Sequence[int]):
    """Contract several distinct modes; contracting all d modes yields a float.

    Index bookkeeping: contractions are applied in decreasing mode order so
    that earlier contractions never shift the axes of later ones.
    """
    modes = [int(m) for m in modes]
    if len(xs) != len(modes):
        raise ValueError("xs and modes must have the same length")
    if len(set(modes)) != len(modes):
        raise ValueError("repeated mode in multi_contract")
    for m, x in zip(modes, xs):
        if not 1 <= m <= t.order:
            raise ValueError(f"mode {m} out of range [1, {t.order}]")
        if np.asarray(x).reshape(-1).size != t.dims[m - 1]:
            raise ValueError(f"vector length mismatch for mode {m}")
    cur = t
    for m, x in sorted(zip(modes, xs), key=lambda mx: -mx[0]):
        if isinstance(cur, float):
            raise ValueError("cannot contract a scalar")
        cur = mode_contract(cur, x, m)
    return cur


def to_sparse(t: DenseTensor) -> SparseTensor:
    """Drop exact zeros; indices come out lex-sorted (row-major scan)."""
    flat = t.values
    nz = np.nonzero(flat)[0]
    idx = np.column_stack(np.unravel_index(nz, t.dims)).astype(np.int64)
    return SparseTensor(t.dims, idx.reshape(len(nz), t.order), flat[nz])


def to_dense(s: SparseTensor) -> DenseTensor:
    arr = np.zeros(s.dims, dtype=np.float64)
    if s.nnz:
        arr[tuple(s.indices.T)] = s.values
    return DenseTensor(arr)


def store_dense(t: DenseTensor, path) -> None:
    """Binary format: "DTNS", version u32, order u32, dims u32..., f64 payload (all LE)."""
    with open(path, "wb") as f:
        f.write(DENSE_MAGIC)
        f.write(struct.pack("<II", DENSE_VERSION, t.order))
        f.write(struct.pack(f"<{t.order}I", *t.dims))
        f.write(np.ascontiguousarray(t.data, dtype="<f8").tobytes())


def load_dense(path) -> DenseTensor:
    with open(path, "rb") as f:
        raw = f.read()
    if raw[:4] != DENSE_MAGIC:
        raise TensorFormatError(f"bad magic {raw[:4]!r}, expected {DENSE_MAGIC!r}")
    if len(raw) < 12:
        raise TensorFormatError("truncated header")
    version, order = struct.unpack_from("<II", raw, 4)
    if version != DENSE_VERSION:
        raise TensorFormatError(f"unsupported version {version}")
    if order < 1:
        raise TensorFormatError("order must be >= 1")
    if len(raw) < 12 + 4 * order:
        raise TensorFormatError("truncated dims")
    dims = struct.unpack_from(f"<{order}I", raw, 12)
    if any(n < 1 for n in dims):
        raise TensorFormatError("dims must be >= 1")
    payload = raw[12 + 4 * order :]
    expected = int(np.prod(dims)) * 8
    if len(payload) != expected:
        raise TensorFormatError(
            f"payload length {len(payload)} does not match dims (expected {expected})"
        )
    vals = np.frombuffer(payload, dtype="<f8")
    return DenseTensor.from_flat(dims, vals)


def store_sparse(s: SparseTensor, path) -> None:
    """Text format: header "d dims... nnz", then "i1 ... id value" lines (lex-sorted)."""
    lines = [" ".join([str(s.order), *map(str, s.dims), str(s.nnz)])]
    for row, v in zip(s.indices, s.values):
        lines.append(" ".join([*map(str, (int(c) for c in row)), repr(float(v))]))
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def load_sparse(path) -> SparseTensor:
    with open(path, "r", encoding="utf-8") as f:
        lines = [ln for ln in f.read().split("\n") if ln != ""]
    if not lines:
        raise TensorFormatError("empty sparse file")
    head = lines[0].split()
    try:
        nums = [int(tok) for tok in head]
    except ValueError as exc:
        raise TensorFormatError(f"non-integer header field: {exc}") from None
    if len(nums) < 3:
        raise TensorFormatError("header must be 'd dims... nnz'")
    order, dims, nnz = nums[0], tuple(nums[1:-1]), nums[-1]
    if order != len(dims):
        raise TensorFormatError(f"header order {order} does not match {len(dims)} dims")
    if nnz != len(lines) - 1:
        raise TensorFormatError(f"header nnz {nnz} does not match {len(lines) - 1} lines")
    idx = np.empty((nnz, order), dtype=np.int64)
    vals = np.empty(nnz, dtype=np.float64)
    for i, ln in enumerate(lines[1:]):
        toks = ln.split()
        if len(toks) != order + 1:
            raise TensorFormatError(f"line {i + 2}: expected {order + 1} fields")
        try:
            idx[i] = [int(tok) for tok in toks[:-1]]
        except ValueError:
            raise TensorFormatError(f"line {i + 2}: non-integer index") from None
        try:
            vals[i] = float(toks[-1])
        except ValueError:
            raise TensorFormatError(f"line {i + 2}: non-numeric value") from None
    for i in range(nnz):
        if np.any(idx[i] < 0) or np.any(idx[i] >= np.asarray(dims)):
            raise TensorFormatError(f"line {i + 2}: index out of range")
        if vals[i] == 0.0:
            raise TensorFormatError(f"line {i + 2}: stored zero value")
    if nnz > 1:
        flat = np.ravel_multi_index(idx.T, dims)
        if np.any(np.diff(flat) <= 0):
            raise TensorFormatError("entries not strictly sorted by index")
    return SparseTensor(dims, idx, vals)
