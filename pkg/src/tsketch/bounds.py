"""Closed-form bound quantities and the Monte Carlo ratio check for the
random-tensor spectral-norm bound.

alpha is the square root of the largest per-mode fiber square-sum, beta the
largest absolute entry (beta <= alpha always).  The ratio check compares a
Monte Carlo estimate of (E ||A - Ahat||^q)^(1/q) against the bound's
right-hand side with its unknown constant set to 1, so acceptance reasons
about ratios rather than absolute domination.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .rng import derive_seed
from .spectral import (
    EpsilonNet,
    net_upper_bound,
    spectral_norm_matrix,
    spectral_norm_tensor_hopm,
)
from .tensor import DenseTensor

BOUND_REPORT_CSV_HEADER = "n,d,q,trials,norm_proxy,lhs,rhs_core,ratio,seed"


@dataclass(frozen=True)
class AlphaBeta:
    alpha: float
    beta: float
    per_mode_max_fiber_sq: list


@dataclass(frozen=True)
class BoundReport:
    n: int
    d: int
    q: float
    trials: int
    norm_proxy: str  # hopm_lower | net_upper
    lhs_estimate: float
    rhs_core: float
    ratio: float
    seed: int

    def csv_row(self) -> str:
        return ",".join(
            repr(v) if isinstance(v, float) else str(v)
            for v in (self.n, self.d, self.q, self.trials, self.norm_proxy,
                      self.lhs_estimate, self.rhs_core, self.ratio, self.seed)
        )


def per_mode_max_fiber_sq(t: DenseTensor) -> list:
    """Per mode j: max over the other indices of the sum over i_j of A^2."""
    sq = t.data ** 2
    return [float(sq.sum(axis=j).max()) for j in range(t.order)]


def alpha_beta(t: DenseTensor) -> AlphaBeta:
    if not t.is_cubic:
        raise ValueError("alpha_beta requires a cubic tensor")
    fibers = per_mode_max_fiber_sq(t)
    return AlphaBeta(
        alpha=math.sqrt(max(fibers)),
        beta=float(np.abs(t.data).max()),
        per_mode_max_fiber_sq=fibers,
    )


def stable_rank(frob: float, spectral: float) -> float:
    """frob^2 / spectral^2; warns when frob < spectral (lower-bound proxy)."""
    if spectral <= 0:
        raise ValueError("spectral norm must be positive")
    if frob < spectral:
        warnings.warn(
            "frobenius norm below spectral norm; spectral value is likely a "
            "lower-bound proxy", stacklevel=2)
    return frob**2 / spectral**2


def required_s(n: int, d: int, st: float, eps: float, C: float = 1.0) -> float:
    """Sampling budget C * d^3 * 8^(2d) * st * n^(d/2) * ln^3 n / eps^2."""
    if n < 2 or d < 2:
        raise ValueError("need n >= 2 and d >= 2")
    if st <= 0 or eps <= 0 or C <= 0:
        raise ValueError("st, eps, and C must be positive")
    if n < 300 or d > 0.5 * math.log(n):
        warnings.warn(
            f"(n={n}, d={d}) outside the bound's stated regime "
            "(n >= 300 and 2 <= d <= 0.5 ln n)", stacklevel=2)
    return C * d**3 * 8.0 ** (2 * d) * st * n ** (d / 2) * math.log(n) ** 3 / eps**2


def bennett_tail(sigma_sq: float, t: float) -> float:
    """Tail bound e^(-t/2), valid for t >= 1.5 * sigma_sq."""
    if sigma_sq <= 0:
        raise ValueError("sigma_sq must be positive")
    if t < 1.5 * sigma_sq:
        raise ValueError(f"t = {t} below validity region t >= 1.5 sigma^2 = {1.5 * sigma_sq}")
    return math.exp(-t / 2.0)


def _check_abhq(a: float, b: float, h: float, q: float) -> None:
    if a < 0 or b < 0 or h < 0:
        raise ValueError("a, b, h must be non-negative")
    if q < 1:
        raise ValueError("q must be >= 1")


def expectation_bound_a(a: float, b: float, h: float, q: float) -> float:
    """Moment bound 2 (a + b h + b q)^q for P(X >= a + t b) <= e^(-t + h)."""
    _check_abhq(a, b, h, q)
    return 2.0 * (a + b * h + b * q) ** q


def expectation_bound_b(a: float, b: float, h: float, q: float) -> float:
    """Moment bound 3 sqrt(q) (a + b sqrt(h) + b sqrt(q/2))^q for
    P(X >= a + t b) <= e^(-t^2 + h)."""
    _check_abhq(a, b, h, q)
    return 3.0 * math.sqrt(q) * (a + b * math.sqrt(h) + b * math.sqrt(q / 2.0)) ** q


def gaussian_slice_bound(t: DenseTensor, mode_pair=(1, 2)) -> float:
    """Mean bound sqrt(max fiber square-sum along the free mode) for
    || (g * A) x_1 mode x_2 mode || with unit contraction vectors; order 3 only."""
    if t.order != 3:
        raise ValueError("gaussian_slice_bound requires an order-3 tensor")
    if not t.is_cubic:
        raise ValueError("gaussian_slice_bound requires a cubic tensor")
    pair = tuple(sorted(int(m) for m in mode_pair))
    if len(set(pair)) != 2 or not all(1 <= m <= 3 for m in pair):
        raise ValueError("mode_pair must be two distinct modes in [1, 3]")
    free = ({1, 2, 3} - set(pair)).pop()
    fibers = (t.data ** 2).sum(axis=free - 1)
    return math.sqrt(float(fibers.max()))


def proxy_spectral_norm(t: DenseTensor, proxy: str, seed: int = 0,
                        net: EpsilonNet | None = None) -> float:
    """Spectral norm surrogate: for matrices "hopm_lower" means converged
    power iteration; for higher orders the HOPM lower bound.  "net_upper"
    uses epsilon-net enumeration (requires a prebuilt net)."""
    if proxy == "hopm_lower":
        if t.order == 2:
            return spectral_norm_matrix(t, seed=seed).value
        return spectral_norm_tensor_hopm(t, seed=seed).value
    if proxy == "net_upper":
        if net is None:
            raise ValueError("net_upper proxy requires a prebuilt EpsilonNet")
        return net_upper_bound(t, net).value
    raise ValueError(f"unknown norm proxy {proxy!r}")


def theorem2_verify(generator, mean_tensor: DenseTensor, q: float, trials: int,
                    seed: int, norm_proxy: str = "hopm_lower",
                    net: EpsilonNet | None = None) -> BoundReport:
    """Monte Carlo ratio check of the random-tensor spectral-norm bound.

    generator(trial_seed) must return an i.i.d. cubic DenseTensor with
    elementwise mean mean_tensor.  lhs is the q-norm of the proxy spectral
    norm of A - mean; rhs_core is 8^d (sqrt(d ln n) + sqrt(q)) times the
    q-norm of the summed per-mode max-fiber terms of A, with the bound's
    constant set to 1.
    """
    if trials < 30:
        raise ValueError("trials < 30: estimate too noisy to report")
    if q < 1:
        raise ValueError("q must be >= 1")
    if not mean_tensor.is_cubic:
        raise ValueError("mean_tensor must be cubic")
    n = mean_tensor.dims[0]
    d = mean_tensor.order
    lhs_acc = 0.0
    mode_acc = np.zeros(d)
    for i in range(trials):
        a = generator(derive_seed(seed, i))
        if a.dims != mean_tensor.dims:
            raise ValueError("generator output dims do not match mean_tensor")
        diff = DenseTensor(a.data - mean_tensor.data)
        lhs_acc += proxy_spectral_norm(diff, norm_proxy, seed=derive_seed(seed, i),
                                       net=net) ** q
        mode_acc += np.array(per_mode_max_fiber_sq(a)) ** (q / 2.0)
    lhs = (lhs_acc / trials) ** (1.0 / q)
    rhs_core = (8.0**d * (math.sqrt(d * math.log(n)) + math.sqrt(q))
                * float(mode_acc.sum() / trials) ** (1.0 / q))
    ratio = lhs / rhs_core if rhs_core > 0 else 0.0
    return BoundReport(n=n, d=d, q=float(q), trials=trials, norm_proxy=norm_proxy,
                       lhs_estimate=lhs, rhs_core=rhs_core, ratio=ratio,
                       seed=int(seed))
