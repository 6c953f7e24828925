"""tensor core: norms, contractions, conversions, file I/O."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsketch import (
    DenseTensor,
    SparseTensor,
    TensorFormatError,
    frobenius_norm,
    load_dense,
    load_sparse,
    mode_contract,
    multi_contract,
    store_dense,
    store_sparse,
    to_dense,
    to_sparse,
)


def rand_tensor(dims, seed):
    rng = np.random.default_rng(seed)
    return DenseTensor(rng.standard_normal(dims))


class TestFrobenius:
    def test_zero_matrix(self):
        assert frobenius_norm(DenseTensor(np.zeros((2, 2)))) == 0.0

    def test_all_ones_cube(self):
        assert frobenius_norm(DenseTensor(np.ones((2, 2, 2)))) == pytest.approx(
            math.sqrt(8), abs=1e-12
        )

    def test_3_4_5(self):
        assert frobenius_norm(DenseTensor([[3.0, 0.0], [0.0, 4.0]])) == 5.0

    def test_zero_iff_all_zero(self):
        t = rand_tensor((3, 3), 0)
        assert frobenius_norm(t) > 0


class TestModeContract:
    def test_basis_vector_selects_row(self):
        a = rand_tensor((4, 4), 1)
        for i in range(4):
            e = np.zeros(4)
            e[i] = 1.0
            row = mode_contract(a, e, 1)
            assert np.allclose(row.data, a.data[i])

    def test_all_ones_cube(self):
        t = DenseTensor(np.ones((2, 2, 2)))
        out = mode_contract(t, np.ones(2), 1)
        assert np.array_equal(out.data, 2.0 * np.ones((2, 2)))

    def test_triple_loop_oracle(self):
        t = rand_tensor((3, 3, 3), 2)
        x = np.random.default_rng(3).standard_normal(3)
        for mode in (1, 2, 3):
            got = mode_contract(t, x, mode).data
            want = np.zeros((3, 3))
            for i in range(3):
                for j in range(3):
                    for k in range(3):
                        idx = [i, j, k]
                        xi = idx.pop(mode - 1)
                        want[idx[0], idx[1]] += t.data[i, j, k] * x[xi]
            assert np.allclose(got, want, rtol=1e-12)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError, match="length"):
            mode_contract(rand_tensor((3, 3), 0), np.ones(4), 1)

    def test_linearity(self):
        t = rand_tensor((4, 4, 4), 5)
        rng = np.random.default_rng(6)
        x, y = rng.standard_normal(4), rng.standard_normal(4)
        a, b = 0.7, -1.3
        lhs = mode_contract(t, a * x + b * y, 2).data
        rhs = a * mode_contract(t, x, 2).data + b * mode_contract(t, y, 2).data
        assert np.allclose(lhs, rhs, rtol=1e-12)


class TestMultiContract:
    def test_single_entry(self):
        arr = np.zeros((2, 2, 2))
        arr[0, 0, 0] = 5.0
        e = np.array([1.0, 0.0])
        assert multi_contract(DenseTensor(arr), [e, e, e], [1, 2, 3]) == 5.0

    def test_unit_rank_one(self):
        rng = np.random.default_rng(7)
        u, v, w = (x / np.linalg.norm(x) for x in rng.standard_normal((3, 4)))
        t = DenseTensor(np.einsum("i,j,k->ijk", u, v, w))
        val = multi_contract(t, [u, v, w], [1, 2, 3])
        assert val == pytest.approx(1.0, abs=1e-12)

    def test_nested_loop_oracle(self):
        t = rand_tensor((4, 4, 4), 8)
        rng = np.random.default_rng(9)
        x, y = rng.standard_normal(4), rng.standard_normal(4)
        got = multi_contract(t, [x, y], [1, 2]).data
        want = np.zeros(4)
        for i in range(4):
            for j in range(4):
                for k in range(4):
                    want[k] += t.data[i, j, k] * x[i] * y[j]
        assert np.allclose(got, want, rtol=1e-12)

    def test_order_independence(self):
        t = rand_tensor((4, 4, 4), 10)
        rng = np.random.default_rng(11)
        x, y = rng.standard_normal(4), rng.standard_normal(4)
        a = multi_contract(t, [x, y], [1, 2]).data
        b = multi_contract(t, [y, x], [2, 1]).data
        assert np.allclose(a, b, rtol=1e-12)

    def test_repeated_mode_rejected(self):
        t = rand_tensor((3, 3, 3), 0)
        with pytest.raises(ValueError, match="repeated"):
            multi_contract(t, [np.ones(3), np.ones(3)], [1, 1])

    def test_length_mismatch_rejected(self):
        t = rand_tensor((3, 3, 3), 0)
        with pytest.raises(ValueError, match="mismatch"):
            multi_contract(t, [np.ones(4)], [2])


class TestSparseDense:
    def test_identity_three_entries(self):
        s = to_sparse(DenseTensor(np.eye(3)))
        assert s.nnz == 3
        assert s.entries == [((0, 0), 1.0), ((1, 1), 1.0), ((2, 2), 1.0)]

    def test_zero_tensor_empty(self):
        assert to_sparse(DenseTensor(np.zeros((2, 2)))).nnz == 0

    def test_round_trip_bit_identical(self):
        t = rand_tensor((3, 4, 2), 12)
        assert to_dense(to_sparse(t)) == t

    def test_frobenius_preserved(self):
        t = rand_tensor((4, 4), 13)
        s = to_sparse(t)
        assert math.sqrt(sum(v * v for _, v in s.entries)) == pytest.approx(
            frobenius_norm(t), rel=1e-12
        )

    def test_invariants_enforced(self):
        with pytest.raises(ValueError, match="zero"):
            SparseTensor((2, 2), [[0, 0]], [0.0])
        with pytest.raises(ValueError, match="range"):
            SparseTensor((2, 2), [[0, 5]], [1.0])
        with pytest.raises(ValueError, match="sorted"):
            SparseTensor((2, 2), [[1, 0], [0, 0]], [1.0, 2.0])
        with pytest.raises(ValueError, match="sorted"):
            SparseTensor((2, 2), [[1, 0], [1, 0]], [1.0, 2.0])


class TestDenseIO:
    def test_round_trip(self, tmp_path):
        t = rand_tensor((3, 2, 4), 14)
        p = tmp_path / "t.dtns"
        store_dense(t, p)
        assert load_dense(p) == t

    def test_single_value_layout(self, tmp_path):
        # magic(4) + version(4) + order(4) + one dim(4) + one f64(8)
        p = tmp_path / "one.dtns"
        store_dense(DenseTensor([2.5]), p)
        raw = p.read_bytes()
        assert len(raw) == 24
        assert raw[:4] == b"DTNS"
        assert load_dense(p).values[0] == 2.5

    def test_bad_magic(self, tmp_path):
        p = tmp_path / "bad.dtns"
        p.write_bytes(b"XXXX" + bytes(20))
        with pytest.raises(TensorFormatError, match="magic"):
            load_dense(p)

    def test_truncated(self, tmp_path):
        t = rand_tensor((3, 3), 15)
        p = tmp_path / "t.dtns"
        store_dense(t, p)
        (tmp_path / "trunc.dtns").write_bytes(p.read_bytes()[:30])
        with pytest.raises(TensorFormatError):
            load_dense(tmp_path / "trunc.dtns")

    def test_payload_mismatch(self, tmp_path):
        t = rand_tensor((2, 2), 16)
        p = tmp_path / "t.dtns"
        store_dense(t, p)
        (tmp_path / "extra.dtns").write_bytes(p.read_bytes() + b"\x00" * 8)
        with pytest.raises(TensorFormatError, match="payload"):
            load_dense(tmp_path / "extra.dtns")


class TestSparseIO:
    def test_empty_header_only(self, tmp_path):
        s = SparseTensor((3, 3), np.zeros((0, 2), dtype=np.int64), [])
        p = tmp_path / "e.sptx"
        store_sparse(s, p)
        assert p.read_text() == "2 3 3 0\n"
        assert load_sparse(p) == s

    def test_round_trip(self, tmp_path):
        t = rand_tensor((3, 3), 17)
        s = to_sparse(t)
        p = tmp_path / "s.sptx"
        store_sparse(s, p)
        assert load_sparse(p) == s

    def test_out_of_range_index(self, tmp_path):
        p = tmp_path / "bad.sptx"
        p.write_text("2 4 4 1\n7 0 1.5\n")
        with pytest.raises(TensorFormatError, match="range"):
            load_sparse(p)

    def test_non_numeric_value(self, tmp_path):
        p = tmp_path / "bad.sptx"
        p.write_text("2 4 4 1\n0 0 abc\n")
        with pytest.raises(TensorFormatError, match="non-numeric"):
            load_sparse(p)

    def test_unsorted_rejected(self, tmp_path):
        p = tmp_path / "bad.sptx"
        p.write_text("2 4 4 2\n1 0 1.5\n0 0 2.5\n")
        with pytest.raises(TensorFormatError, match="sorted"):
            load_sparse(p)

    def test_duplicate_rejected(self, tmp_path):
        p = tmp_path / "bad.sptx"
        p.write_text("2 4 4 2\n0 0 1.5\n0 0 2.5\n")
        with pytest.raises(TensorFormatError, match="sorted"):
            load_sparse(p)

    def test_nnz_mismatch(self, tmp_path):
        p = tmp_path / "bad.sptx"
        p.write_text("2 4 4 3\n0 0 1.5\n")
        with pytest.raises(TensorFormatError, match="nnz"):
            load_sparse(p)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=8, max_size=8))
def test_dense_io_round_trip_property(tmp_path_factory, vals):
    t = DenseTensor.from_flat((2, 2, 2), vals)
    p = tmp_path_factory.mktemp("io") / "t.dtns"
    store_dense(t, p)
    assert load_dense(p) == t
