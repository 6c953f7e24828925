"""CLI front end: exit codes, output determinism, file round trips."""

import json

import numpy as np
import pytest

from tsketch import DenseTensor, load_dense, load_sparse, store_dense, to_dense
from tsketch.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


@pytest.fixture
def diag_path(tmp_path):
    p = tmp_path / "diag.dtns"
    store_dense(DenseTensor([[3.0, 0.0], [0.0, 4.0]]), p)
    return p


class TestRequiredS:
    def test_reference_value(self, capsys):
        code, out, _ = run(capsys, "required-s", "--n", "300", "--d", "2",
                           "--st", "1.0", "--eps", "0.5")
        assert code == 0
        assert out.strip() == "7296591692.189449"

    def test_bad_args_exit_2(self, capsys):
        code, _, err = run(capsys, "required-s", "--n", "1", "--d", "2",
                           "--st", "1.0", "--eps", "0.5")
        assert code == 2
        assert "error" in err


class TestGen:
    def test_gen_deterministic(self, tmp_path, capsys):
        a, b = tmp_path / "a.dtns", tmp_path / "b.dtns"
        for p in (a, b):
            code, _, _ = run(capsys, "gen", "--kind", "gaussian", "--n", "4",
                             "--d", "3", "--seed", "9", "--out", str(p))
            assert code == 0
        assert a.read_bytes() == b.read_bytes()
        assert load_dense(a).dims == (4, 4, 4)

    def test_gen_bad_kind_exit_2(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as e:
            main(["gen", "--kind", "cauchy", "--n", "4", "--d", "2",
                  "--out", str(tmp_path / "x.dtns")])
        assert e.value.code == 2


class TestSparsify:
    def test_all_large_round_trip(self, tmp_path, diag_path, capsys):
        out = tmp_path / "sketch.sptx"
        stats = tmp_path / "stats.json"
        code, _, _ = run(capsys, "sparsify", "--in", str(diag_path), "--s", "3.0",
                         "--out", str(out), "--stats", str(stats))
        assert code == 0
        sk = load_sparse(out)
        assert to_dense(sk) == load_dense(diag_path)
        st = json.loads(stats.read_text())
        assert st["kept_large"] == 2
        assert st["zeroed_small"] == 0
        assert st["expected_nnz"] == 2.0
        assert st["seed"] == 0

    def test_missing_input_exit_2(self, tmp_path, capsys):
        code, _, err = run(capsys, "sparsify", "--in", str(tmp_path / "no.dtns"),
                           "--s", "2.0", "--out", str(tmp_path / "o.sptx"))
        assert code == 2
        assert "error" in err

    def test_nonpositive_s_exit_2(self, tmp_path, diag_path, capsys):
        code, _, _ = run(capsys, "sparsify", "--in", str(diag_path), "--s", "0",
                         "--out", str(tmp_path / "o.sptx"))
        assert code == 2


class TestNorm:
    def test_power_value(self, diag_path, capsys):
        code, out, _ = run(capsys, "norm", "--in", str(diag_path),
                           "--method", "power")
        assert code == 0
        lines = dict(line.split(" ", 1) for line in out.strip().splitlines())
        assert float(lines["value"]) == pytest.approx(4.0, abs=1e-8)
        assert lines["direction"] == "converged_estimate"
        assert lines["method"] == "power_iteration"

    def test_hopm_on_matrix_exit_2(self, diag_path, capsys):
        code, _, err = run(capsys, "norm", "--in", str(diag_path),
                           "--method", "hopm")
        assert code == 2
        assert "error" in err

    def test_net_method(self, tmp_path, capsys):
        p = tmp_path / "t.dtns"
        store_dense(DenseTensor(np.eye(2)), p)
        code, out, _ = run(capsys, "norm", "--in", str(p), "--method", "net",
                           "--net-m", "3")
        assert code == 0
        lines = dict(line.split(" ", 1) for line in out.strip().splitlines())
        assert float(lines["value"]) >= 1.0
        assert lines["direction"] == "upper_bound"


class TestSweep:
    def test_rerun_byte_identical_and_threads_invariant(self, tmp_path, capsys):
        t = tmp_path / "t.dtns"
        rng = np.random.default_rng(21)
        store_dense(DenseTensor(rng.standard_normal((4, 4))), t)
        outs = []
        for name, threads in (("a.csv", "1"), ("b.csv", "1"), ("c.csv", "4")):
            out = tmp_path / name
            code, _, _ = run(capsys, "sweep", "--in", str(t), "--s-list", "2,4",
                             "--trials", "3", "--seed", "5", "--threads", threads,
                             "--out", str(out))
            assert code == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1] == outs[2]
        header = outs[0].decode().splitlines()[0]
        assert header == "s,trial,rel_error,nnz,expected_nnz,seed,norm_proxy"

    def test_bad_s_list_exit_2(self, tmp_path, capsys):
        t = tmp_path / "t.dtns"
        store_dense(DenseTensor(np.eye(2)), t)
        code, _, err = run(capsys, "sweep", "--in", str(t), "--s-list", "2,x",
                           "--trials", "1", "--out", str(tmp_path / "o.csv"))
        assert code == 2
        assert "s-list" in err


class TestVerify:
    def test_unbiased_pass(self, capsys):
        code, out, _ = run(capsys, "verify", "unbiased", "--trials", "20000",
                           "--seed", "3")
        assert code == 0
        assert out.startswith("PASS")

    def test_bennett_pass(self, capsys):
        code, out, _ = run(capsys, "verify", "bennett", "--n-vars", "40",
                           "--trials", "20000", "--seed", "4")
        assert code == 0
        assert all(line.startswith("PASS") for line in out.strip().splitlines())

    def test_lemma_net_pass(self, capsys):
        code, out, _ = run(capsys, "verify", "lemma-net", "--count", "3",
                           "--n", "3", "--m", "4", "--seed", "5")
        assert code == 0
        assert len(out.strip().splitlines()) == 3

    def test_theorem2_pass_and_csv(self, tmp_path, capsys):
        out_csv = tmp_path / "rep.csv"
        code, out, _ = run(capsys, "verify", "theorem2", "--n-list", "8,16",
                           "--trials", "30", "--seed", "6", "--out", str(out_csv))
        assert code == 0
        assert all(line.startswith("PASS") for line in out.strip().splitlines())
        lines = out_csv.read_text().splitlines()
        assert lines[0] == "n,d,q,trials,norm_proxy,lhs,rhs_core,ratio,seed"
        assert len(lines) == 3


class TestUsage:
    def test_no_command_exit_2(self):
        with pytest.raises(SystemExit) as e:
            main([])
        assert e.value.code == 2

    def test_unknown_command_exit_2(self):
        with pytest.raises(SystemExit) as e:
            main(["frobnicate"])
        assert e.value.code == 2

    def test_bad_threads_exit_2(self, diag_path):
        with pytest.raises(SystemExit) as e:
            main(["norm", "--in", str(diag_path), "--method", "power",
                  "--threads", "0"])
        assert e.value.code == 2
