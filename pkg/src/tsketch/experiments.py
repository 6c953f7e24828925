"""Random tensor generators, sparsification error sweeps, and the Monte
Carlo verification drivers.

Every driver is a deterministic function of its seed: per-trial seeds are
SplitMix64(seed XOR trial_index), generator entries come from the keyed RNG,
and CSV output is assembled in fixed (s, trial) order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .bounds import BoundReport, bennett_tail, theorem2_verify, proxy_spectral_norm
from .rng import derive_seed, fnv1a64_int, keyed_gaussians, splitmix64_int
from .sparsify import expected_nnz, middle_band_probabilities, sparsify
from .spectral import EpsilonNet
from .tensor import DenseTensor, to_dense

SWEEP_CSV_HEADER = "s,trial,rel_error,nnz,expected_nnz,seed,norm_proxy"

_NOISE_TAG = 0x6E6F697365  # derives the additive-noise seed
_PERM_TAG = 0x7065726D  # derives the power-law permutation seed

GENERATOR_KINDS = ("gaussian", "rademacher", "low_rank_plus_noise", "power_law")


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    n: int
    d: int
    seed: int = 0
    params: dict = field(default_factory=dict)

    def with_seed(self, seed: int) -> "GeneratorSpec":
        return replace(self, seed=seed)


@dataclass(frozen=True)
class SweepRow:
    s: float
    trial: int
    rel_error: float
    nnz: int
    expected_nnz: float
    seed: int
    norm_proxy: str

    def csv_row(self) -> str:
        return ",".join([
            repr(self.s), str(self.trial), repr(self.rel_error), str(self.nnz),
            repr(self.expected_nnz), str(self.seed), self.norm_proxy,
        ])


def _multi_indices(n: int, d: int) -> np.ndarray:
    flat = np.arange(n**d)
    return np.column_stack(np.unravel_index(flat, (n,) * d)).astype(np.uint64)


def gen_random_tensor(spec: GeneratorSpec) -> DenseTensor:
    """Deterministic-in-seed random cubic tensor of the requested kind."""
    if spec.n < 2 or spec.d < 2:
        raise ValueError("need n >= 2 and d >= 2")
    if spec.kind not in GENERATOR_KINDS:
        raise ValueError(f"unknown generator kind {spec.kind!r}")
    n, d = spec.n, spec.d
    shape = (n,) * d
    if spec.kind == "gaussian":
        vals = keyed_gaussians(spec.seed, _multi_indices(n, d))
        return DenseTensor(vals.reshape(shape))
    if spec.kind == "rademacher":
        u = kernels.keyed_uniforms(spec.seed, _multi_indices(n, d))
        return DenseTensor(np.where(u < 0.5, 1.0, -1.0).reshape(shape))
    if spec.kind == "low_rank_plus_noise":
        rank = int(spec.params.get("rank", 1))
        sigma = float(spec.params.get("sigma", 0.0))
        if rank < 1 or sigma < 0:
            raise ValueError("low_rank_plus_noise needs rank >= 1 and sigma >= 0")
        acc = np.zeros(shape)
        for t_comp in range(rank):
            factors = []
            for mode in range(d):
                g = keyed_gaussians(
                    splitmix64_int(spec.seed ^ fnv1a64_int([t_comp, mode])),
                    np.arange(n, dtype=np.uint64).reshape(n, 1),
                )
                nv = np.linalg.norm(g)
                factors.append(g / nv if nv else np.eye(n)[0])
            term = factors[0]
            for f in factors[1:]:
                term = np.multiply.outer(term, f)
            acc += term
        if sigma > 0:
            noise_seed = splitmix64_int(spec.seed ^ _NOISE_TAG)
            acc += sigma * keyed_gaussians(noise_seed, _multi_indices(n, d)).reshape(shape)
        return DenseTensor(acc)
    # power_law: magnitudes rank^-exponent over a random permutation, random signs
    exponent = float(spec.params.get("exponent", 1.0))
    if exponent <= 0:
        raise ValueError("power_law needs exponent > 0")
    size = n**d
    mags = (np.arange(size, dtype=np.float64) + 1.0) ** -exponent
    rng = np.random.Generator(np.random.PCG64(splitmix64_int(spec.seed ^ _PERM_TAG)))
    perm = rng.permutation(size)
    signs = np.where(rng.random(size) < 0.5, 1.0, -1.0)
    return DenseTensor((mags[perm] * signs).reshape(shape))


def error_sweep(t: DenseTensor, s_values, trials: int, seed: int,
                norm_proxy: str = "hopm_lower",
                net: EpsilonNet | None = None) -> list:
    """Per (s, trial): sketch with a derived seed and record the relative
    spectral error and sketch size under the declared norm proxy."""
    base_norm = proxy_spectral_norm(t, norm_proxy, seed=seed, net=net)
    if base_norm <= 0:
        raise ValueError("tensor norm proxy is zero; nothing to sweep")
    rows = []
    for s in s_values:
        exp = expected_nnz(t, s)
        for trial in range(trials):
            ts = derive_seed(seed, trial)
            res = sparsify(t, s, ts)
            diff = DenseTensor(t.data - to_dense(res.sketch).data)
            rel = proxy_spectral_norm(diff, norm_proxy, seed=ts, net=net) / base_norm
            rows.append(SweepRow(s=float(s), trial=trial, rel_error=rel,
                                 nnz=res.sketch.nnz, expected_nnz=exp, seed=ts,
                                 norm_proxy=norm_proxy))
    return rows


def sweep_to_csv(rows) -> str:
    return "\n".join([SWEEP_CSV_HEADER, *(r.csv_row() for r in rows)]) + "\n"


def reports_to_csv(reports) -> str:
    from .bounds import BOUND_REPORT_CSV_HEADER

    return "\n".join([BOUND_REPORT_CSV_HEADER, *(r.csv_row() for r in reports)]) + "\n"


def verify_unbiasedness(t: DenseTensor, s: float, trials: int, seed: int) -> list:
    """Per middle-band entry: z-score of the sketch mean against the original
    value over per-trial seeds.  Returns (index, p, z) rows.

    Equivalent to averaging sparsify() over trials: the keyed-RNG decision
    for entry e under trial seed t_i depends only on (t_i, index hash).
    """
    idx, probs = middle_band_probabilities(t, s)
    seeds = np.uint64(seed) ^ np.arange(trials, dtype=np.uint64)
    seeds = kernels.splitmix64(seeds)
    rows = []
    flat_vals = t.data[tuple(idx.T)] if idx.size else np.zeros(0)
    for e in range(idx.shape[0]):
        h = np.uint64(fnv1a64_int([int(c) for c in idx[e]]))
        u = kernels.splitmix64(seeds ^ h).astype(np.float64) * 2.0**-64
        p = float(probs[e])
        a = float(flat_vals[e])
        kept_frac = float((u < p).mean())
        mean_est = (a / p) * kept_frac
        se = abs(a) * math.sqrt((1.0 - p) / p / trials)
        z = (mean_est - a) / se
        rows.append((tuple(int(c) for c in idx[e]), p, z))
    return rows


@dataclass(frozen=True)
class BennettCheck:
    t: float
    empirical: float
    bound: float
    se: float

    @property
    def passed(self) -> bool:
        return self.empirical <= self.bound + 3.0 * self.se


def verify_bennett(n_vars: int, t_grid, trials: int, seed: int) -> list:
    """Empirical tail of a centered Bernoulli(1/2) sum against the e^(-t/2)
    bound at each t in the grid (t must be in the bound's validity region)."""
    sigma_sq = n_vars / 4.0
    bounds = [bennett_tail(sigma_sq, float(t)) for t in t_grid]  # validates regime
    rng = np.random.Generator(np.random.PCG64(splitmix64_int(seed)))
    sums = rng.binomial(n_vars, 0.5, size=trials) - n_vars / 2.0
    checks = []
    for t, bound in zip(t_grid, bounds):
        emp = float((sums > t).mean())
        se = math.sqrt(bound * (1.0 - bound) / trials)
        checks.append(BennettCheck(t=float(t), empirical=emp, bound=bound, se=se))
    return checks


def verify_theorem2_suite(configs, seed: int) -> list:
    """Run the ratio check for each (GeneratorSpec, q, trials) config."""
    reports: list[BoundReport] = []
    for i, (spec, q, trials) in enumerate(configs):
        mean = _generator_mean(spec)
        gen = lambda ts, sp=spec: gen_random_tensor(sp.with_seed(ts))
        proxy = "hopm_lower"
        reports.append(
            theorem2_verify(gen, mean, q=q, trials=trials,
                            seed=derive_seed(seed, i), norm_proxy=proxy)
        )
    return reports


def _generator_mean(spec: GeneratorSpec) -> DenseTensor:
    """Elementwise mean tensor for the supported suite generators."""
    if spec.kind in ("gaussian", "rademacher"):
        return DenseTensor(np.zeros((spec.n,) * spec.d))
    raise ValueError(f"no closed-form mean for generator kind {spec.kind!r}")
