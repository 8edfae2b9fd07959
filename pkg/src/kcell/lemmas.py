"""Deterministic checks of Poisson concentration and Poisson mixing limits.

All probabilities come from the exact Poisson distribution in log space
(scipy), so these checks involve no sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import poisson

WINDOW_SIGMAS = 12.0
TAIL_BUDGET = 1e-10


class TruncationBudgetExceeded(ArithmeticError):
    pass


def chernoff_log_bound(x, lam: float):
    """log of exp(x - lam - x log(x/lam)), valid above and below the mean."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = x - lam - np.where(x > 0, x * np.log(x / lam), 0.0)
    return out


@dataclass
class TailBoundReport:
    lam: float
    checked: int
    violations: int
    worst_margin: float


@dataclass
class ConcentrationReport:
    lambdas: tuple[float, ...]
    probabilities: tuple[float, ...]
    decreasing: bool


def poisson_tail_bound_check(lam: float) -> TailBoundReport:
    """Compare exact upper and lower Poisson tails with the Chernoff forms pointwise.

    Upper: P(N >= x) for integer x > lam. Lower: P(N <= x) for integer
    0 <= x < lam. ``worst_margin`` is the smallest log(bound) - log(exact).
    """
    span = int(math.ceil(20.0 * math.sqrt(lam) + 20.0))
    up = np.arange(math.floor(lam) + 1, math.ceil(lam) + span + 1)
    up = up[up > lam]
    lo = np.arange(0, math.ceil(lam))
    lo = lo[lo < lam]
    exact = np.concatenate([poisson.logsf(up - 1, lam), poisson.logcdf(lo, lam)])
    bound = chernoff_log_bound(np.concatenate([up, lo]), lam)
    margin = bound - exact
    return TailBoundReport(lam, len(margin), int(np.sum(margin < 0)), float(margin.min()))


def deviation_probability(lam: float, a: float = 0.75) -> float:
    """P(|N - lam + 1| > lam^a) from the exact distribution."""
    t = lam**a
    hi = math.floor(lam - 1.0 + t)
    p_hi = poisson.sf(hi, lam)
    lo = math.ceil(lam - 1.0 - t) - 1
    p_lo = poisson.cdf(lo, lam) if lo >= 0 else 0.0
    return float(p_hi + p_lo)


def concentration_check(lambdas=(10.0, 100.0, 1000.0), a: float = 0.75) -> ConcentrationReport:
    probs = tuple(deviation_probability(l, a) for l in lambdas)
    dec = all(q < p for p, q in zip(probs, probs[1:]))
    return ConcentrationReport(tuple(lambdas), probs, dec)


@dataclass
class MixingReport:
    case: str
    param: float
    lam: float
    value: float
    limit: float
    error_budget: float

    @property
    def deviation(self) -> float:
        return abs(self.value - self.limit)


def _window(lam: float) -> tuple[int, int]:
    half = WINDOW_SIGMAS * math.sqrt(lam)
    return max(0, int(math.floor(lam - half))), int(math.ceil(lam + half))


def poisson_mixing(case: str, param: float, lam: float, g: float = 1.0) -> MixingReport:
    """f(lam) * sum_k P(N_lam = k) g_k for sequences with f(k) g_k = g.

    Cases: ``a`` f = lam^param; ``b`` f = lam / log(lam)^param; ``growing``
    p_k = k^param normalized by lam^-param (limit 1).
    """
    lo, hi = _window(lam)
    first = {"a": 1, "b": 2, "growing": 0}.get(case)
    if first is None:
        raise ValueError(f"unknown mixing case {case!r}")
    lo = max(lo, first)
    k = np.arange(lo, hi + 1, dtype=float)
    pk = poisson.pmf(k, lam)
    left = float(poisson.cdf(lo - 1, lam)) if lo > 0 else 0.0
    right = float(poisson.sf(hi, lam))
    if left + right > TAIL_BUDGET:
        raise TruncationBudgetExceeded(f"neglected mass {left + right:.3e} at lam={lam:g}")
    if case == "a":
        f = lam**param
        gk = g / k**param
        bound = f * (left + right) * g
        limit = g
    elif case == "b":
        f = lam / math.log(lam) ** param
        gk = g * np.log(k) ** param / k
        # log(k)^a / k is at most 1 for k >= 2 when a <= 1, else bounded by (a/e)^a
        bound = f * (left + right) * g * max(1.0, (param / math.e) ** param)
        limit = g
    else:
        f = lam ** (-param)
        gk = k**param
        # k^beta <= k for beta <= 1, and sum_{k > hi} k P(N = k) = lam P(N >= hi)
        bound = f * (left * max(lo, 1) ** param + lam * float(poisson.sf(hi - 1, lam)))
        limit = 1.0
    value = f * float(np.dot(pk, gk))
    return MixingReport(case, param, lam, value, limit, bound)


def poisson_mixing_check(case: str, param: float, lambdas) -> list[MixingReport]:
    return [poisson_mixing(case, param, lam) for lam in lambdas]
