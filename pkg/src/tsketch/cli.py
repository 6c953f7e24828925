"""Command-line front end.

Exit codes: 0 success / all checks PASS, 1 any check FAIL, 2 usage or
input errors.  Every run is fully described by its flags and --seed;
--threads is a worker budget and never changes output.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys


from . import bounds, experiments, spectral, tensor
from .sparsify import sparsify as _sparsify


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="u64 seed (default 0)")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="worker budget; output is independent of this")


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tsketch")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a random tensor (dense binary)")
    g.add_argument("--kind", required=True, choices=experiments.GENERATOR_KINDS)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--rank", type=int, default=1)
    g.add_argument("--sigma", type=float, default=0.0)
    g.add_argument("--exponent", type=float, default=1.0)
    g.add_argument("--out", required=True)
    _common_flags(g)

    sp = sub.add_parser("sparsify", help="sketch a dense tensor (sparse text)")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--stats", help="optional JSON stats path")
    _common_flags(sp)

    nm = sub.add_parser("norm", help="estimate the spectral norm")
    nm.add_argument("--in", dest="input", required=True)
    nm.add_argument("--method", required=True, choices=["power", "hopm", "net"])
    nm.add_argument("--tol", type=float, default=spectral.DEFAULT_TOL)
    nm.add_argument("--max-iter", type=int, default=spectral.DEFAULT_MAX_ITER)
    nm.add_argument("--restarts", type=int, default=0,
                    help="0 picks the method default")
    nm.add_argument("--net-m", type=int, default=4)
    _common_flags(nm)

    sw = sub.add_parser("sweep", help="sparsification error sweep (CSV)")
    sw.add_argument("--in", dest="input", required=True)
    sw.add_argument("--s-list", required=True, help="comma-separated s values")
    sw.add_argument("--trials", type=int, required=True)
    sw.add_argument("--norm-proxy", default="hopm_lower",
                    choices=["hopm_lower", "net_upper"])
    sw.add_argument("--net-m", type=int, default=4)
    sw.add_argument("--out", required=True)
    _common_flags(sw)

    vf = sub.add_parser("verify", help="run a verification suite")
    vsub = vf.add_subparsers(dest="check", required=True)

    vb = vsub.add_parser("bennett")
    vb.add_argument("--n-vars", type=int, default=40)
    vb.add_argument("--trials", type=int, default=100_000)
    _common_flags(vb)

    vt = vsub.add_parser("theorem2")
    vt.add_argument("--n-list", default="20,40,80")
    vt.add_argument("--trials", type=int, default=200)
    vt.add_argument("--out", help="optional CSV path")
    _common_flags(vt)

    vu = vsub.add_parser("unbiased")
    vu.add_argument("--s", type=float, default=2.0)
    vu.add_argument("--trials", type=int, default=20_000)
    vu.add_argument("--in", dest="input",
                    help="dense tensor path (default: built-in [[3,0],[0,4]])")
    _common_flags(vu)

    vn = vsub.add_parser("lemma-net")
    vn.add_argument("--count", type=int, default=50)
    vn.add_argument("--n", type=int, default=3)
    vn.add_argument("--m", type=int, default=6)
    _common_flags(vn)

    rq = sub.add_parser("required-s", help="sampling budget from the bound")
    rq.add_argument("--n", type=int, required=True)
    rq.add_argument("--d", type=int, required=True)
    rq.add_argument("--st", type=float, required=True)
    rq.add_argument("--eps", type=float, required=True)
    rq.add_argument("--C", type=float, default=1.0)
    _common_flags(rq)

    return ap


def _cmd_gen(args) -> int:
    params = {}
    if args.kind == "low_rank_plus_noise":
        params = {"rank": args.rank, "sigma": args.sigma}
    elif args.kind == "power_law":
        params = {"exponent": args.exponent}
    spec = experiments.GeneratorSpec(kind=args.kind, n=args.n, d=args.d,
                                     seed=args.seed, params=params)
    tensor.store_dense(experiments.gen_random_tensor(spec), args.out)
    return 0


def _cmd_sparsify(args) -> int:
    t = tensor.load_dense(args.input)
    res = _sparsify(t, args.s, args.seed)
    tensor.store_sparse(res.sketch, args.out)
    if args.stats:
        stats = {
            "kept_large": res.kept_large,
            "zeroed_small": res.zeroed_small,
            "sampled_kept": res.middle_sampled_kept,
            "sampled_dropped": res.middle_sampled_dropped,
            "keep_threshold": res.thresholds.keep_threshold,
            "zero_threshold": res.thresholds.zero_threshold,
            "expected_nnz": res.expected_nnz,
            "seed": res.seed,
        }
        with open(args.stats, "w", encoding="utf-8", newline="\n") as f:
            json.dump(stats, f, indent=2, sort_keys=True)
            f.write("\n")
    return 0


def _cmd_norm(args) -> int:
    t = tensor.load_dense(args.input)
    if args.method == "power":
        restarts = args.restarts or spectral.DEFAULT_RESTARTS_MATRIX
        est = spectral.spectral_norm_matrix(t, tol=args.tol, max_iter=args.max_iter,
                                            restarts=restarts, seed=args.seed)
    elif args.method == "hopm":
        restarts = args.restarts or spectral.DEFAULT_RESTARTS_TENSOR
        est = spectral.spectral_norm_tensor_hopm(t, tol=args.tol,
                                                 max_iter=args.max_iter,
                                                 restarts=restarts, seed=args.seed)
    else:
        net = spectral.build_epsilon_net(t.dims[0], args.net_m)
        est = spectral.net_upper_bound(t, net)
    print(f"value {est.value!r}")
    print(f"direction {est.direction}")
    print(f"method {est.method}")
    print(f"restarts {est.restarts} iterations {est.iterations} tolerance {est.tolerance!r}")
    return 0


def _cmd_sweep(args) -> int:
    t = tensor.load_dense(args.input)
    try:
        s_values = [float(tok) for tok in args.s_list.split(",") if tok]
    except ValueError:
        raise ValueError(f"--s-list: non-numeric value in {args.s_list!r}") from None
    net = None
    if args.norm_proxy == "net_upper":
        net = spectral.build_epsilon_net(t.dims[0], args.net_m)
    rows = experiments.error_sweep(t, s_values, args.trials, args.seed,
                                   norm_proxy=args.norm_proxy, net=net)
    with open(args.out, "w", encoding="utf-8", newline="\n") as f:
        f.write(experiments.sweep_to_csv(rows))
    return 0


def _cmd_verify_bennett(args) -> int:
    sigma_sq = args.n_vars / 4.0
    grid = [1.5 * sigma_sq, 2.0 * sigma_sq, 3.0 * sigma_sq]
    checks = experiments.verify_bennett(args.n_vars, grid, args.trials, args.seed)
    ok = True
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        ok &= c.passed
        print(f"{status} bennett t={c.t!r} empirical={c.empirical!r} "
              f"bound={c.bound!r} se={c.se!r}")
    return 0 if ok else 1


def _cmd_verify_theorem2(args) -> int:
    try:
        n_list = [int(tok) for tok in args.n_list.split(",") if tok]
    except ValueError:
        raise ValueError(f"--n-list: non-integer value in {args.n_list!r}") from None
    configs = [
        (experiments.GeneratorSpec(kind="rademacher", n=n, d=2), math.log(n), args.trials)
        for n in n_list
    ]
    reports = experiments.verify_theorem2_suite(configs, args.seed)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as f:
            f.write(experiments.reports_to_csv(reports))
    ok = True
    for rep in reports:
        passed = rep.ratio <= 10.0
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'} theorem2 n={rep.n} ratio={rep.ratio!r}")
    for prev, cur in zip(reports, reports[1:]):
        if cur.n == 2 * prev.n and prev.ratio > 0:
            growth = cur.ratio / prev.ratio
            passed = growth <= 1.5
            ok &= passed
            print(f"{'PASS' if passed else 'FAIL'} theorem2 growth "
                  f"n={prev.n}->{cur.n} ratio_growth={growth!r}")
    return 0 if ok else 1


def _cmd_verify_unbiased(args) -> int:
    if args.input:
        t = tensor.load_dense(args.input)
    else:
        t = tensor.DenseTensor([[3.0, 0.0], [0.0, 4.0]])
    rows = experiments.verify_unbiasedness(t, args.s, args.trials, args.seed)
    if not rows:
        print("PASS unbiased (no middle-band entries)")
        return 0
    ok = True
    for idx, p, z in rows:
        passed = abs(z) < 4.0
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'} unbiased index={idx} p={p!r} z={z!r}")
    return 0 if ok else 1


def _cmd_verify_lemma_net(args) -> int:
    net = spectral.build_epsilon_net(args.n, args.m)
    ok = True
    for i in range(args.count):
        spec = experiments.GeneratorSpec(kind="gaussian", n=args.n, d=3,
                                         seed=experiments.derive_seed(args.seed, i))
        t = experiments.gen_random_tensor(spec)
        lower = spectral.spectral_norm_tensor_hopm(t, seed=args.seed).value
        upper = spectral.net_upper_bound(t, net).value
        passed = lower <= upper
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'} lemma-net instance={i} "
              f"hopm={lower!r} net_upper={upper!r}")
    return 0 if ok else 1


def _cmd_required_s(args) -> int:
    print(repr(bounds.required_s(args.n, args.d, args.st, args.eps, args.C)))
    return 0


def main(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        ap.error("--threads must be >= 1")
    try:
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command == "sparsify":
            return _cmd_sparsify(args)
        if args.command == "norm":
            return _cmd_norm(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "verify":
            return {
                "bennett": _cmd_verify_bennett,
                "theorem2": _cmd_verify_theorem2,
                "unbiased": _cmd_verify_unbiased,
                "lemma-net": _cmd_verify_lemma_net,
            }[args.check](args)
        if args.command == "required-s":
            return _cmd_required_s(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unhandled command")


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
