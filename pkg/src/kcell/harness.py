"""Monte Carlo driver, estimators and rate fits for K-cell experiments.

Replicate ``i`` at grid point ``j`` always draws from ``rng_stream(seed, j, i)``,
so results do not depend on the number of workers or on scheduling.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import LimitTargets, theorem_targets
from .cell import build_cell
from .directional import Directional, phi
from .functionals import evaluate, mean_width
from .geometry import ConvexBody
from .process import ConfigError, ProcessConfig, rng_stream

THEOREM_TAGS = ("thm31", "thm32", "thm42", "thm43", "thm22", "thm41", "tail", "efron", "lemma41")
CSV_COLUMNS = ("n", "reps", "truncated", "mean_dW", "se_dW", "mean_dPhi", "se_dPhi",
               "mean_dPhi2", "se_dPhi2", "mean_f", "se_f")


class NonPositiveMean(ValueError):
    pass


def parse_grid(text: str) -> tuple[int, ...]:
    """``START:END:xFACTOR`` to the geometric grid START, START*F, ... <= END."""
    try:
        start, end, factor = text.split(":")
        start, end = int(float(start)), int(float(end))
        factor = float(factor.lstrip("x"))
    except ValueError as exc:
        raise ConfigError(f"bad grid {text!r}; expected START:END:xFACTOR") from exc
    if start < 1 or end < start or factor <= 1:
        raise ConfigError(f"bad grid {text!r}")
    grid = []
    k = 0
    while True:
        v = int(round(start * factor**k))
        if v > end * (1 + 1e-12):
            break
        grid.append(v)
        k += 1
    return tuple(grid)


@dataclass(frozen=True)
class ExperimentConfig:
    theorem: str
    body: ConvexBody
    dist: Directional
    grid: tuple[int, ...]
    reps: int
    seed: int = 0
    out: str | None = None
    quad_nodes: int | None = None
    workers: int = 1
    sampler: str = "shell"

    def __post_init__(self):
        if self.theorem not in THEOREM_TAGS:
            raise ConfigError(f"unknown theorem tag {self.theorem!r}")
        if len(self.grid) == 0 or any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ConfigError("intensity grid must be strictly increasing")
        if self.reps < 100:
            raise ConfigError("at least 100 replicates are needed")
        if self.body.dim != self.dist.dim:
            raise ConfigError("body and distribution differ in dimension")
        if self.workers < 1:
            raise ConfigError("workers must be positive")


@dataclass
class Samples:
    """Per-replicate functionals; truncated replicates hold NaN."""

    n: float
    dW: np.ndarray
    dPhi: np.ndarray
    f: np.ndarray
    R: np.ndarray
    truncated: np.ndarray

    @property
    def ok(self) -> np.ndarray:
        return ~self.truncated

    def __len__(self):
        return len(self.f)


def _block(args) -> np.ndarray:
    body, dist, n, seed, exp_id, lo, hi, sampler, width_k, phi_k = args
    cfg = ProcessConfig(n, body, dist, master_seed=seed, sampler=sampler)
    out = np.empty((hi - lo, 5))
    for row, i in enumerate(range(lo, hi)):
        s = evaluate(build_cell(cfg, rng_stream(seed, exp_id, i), phi_k=phi_k), body, dist, width_k, phi_k)
        out[row] = (s.delta_w, s.delta_phi, s.facets, s.circumradius, float(s.truncated))
    return out


def simulate(body: ConvexBody, dist: Directional, n: float, reps: int, seed: int = 0, exp_id: int = 0,
             workers: int = 1, sampler: str | None = None, width_k: float | None = None,
             phi_k: float | None = None) -> Samples:
    if sampler is None:
        sampler = "shell" if body.dim <= 3 else "window"
    if width_k is None:
        width_k = mean_width(body) if body.dim <= 3 else math.nan
    if phi_k is None:
        phi_k = phi(body, dist)
    chunk = max(1, min(1000, -(-reps // (4 * workers))))
    jobs = [(body, dist, n, seed, exp_id, lo, min(lo + chunk, reps), sampler, width_k, phi_k)
            for lo in range(0, reps, chunk)]
    if workers == 1:
        parts = [_block(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_block, jobs))
    A = np.vstack(parts)
    return Samples(n, A[:, 0], A[:, 1], A[:, 2], A[:, 3], A[:, 4] > 0.5)


def _mean_se(x: np.ndarray) -> tuple[float, float]:
    x = x[np.isfinite(x)]
    if len(x) == 0:
        return math.nan, math.nan
    se = float(np.std(x, ddof=1) / math.sqrt(len(x))) if len(x) > 1 else math.nan
    return float(np.mean(x)), se


def summarize(s: Samples) -> dict:
    ok = s.ok
    row = {"n": s.n, "reps": int(len(s)), "truncated": int(s.truncated.sum())}
    row["mean_dW"], row["se_dW"] = _mean_se(s.dW[ok])
    for k in (1, 2, 3, 4):
        key = "dPhi" if k == 1 else f"dPhi{k}"
        row[f"mean_{key}"], row[f"se_{key}"] = _mean_se(s.dPhi[ok] ** k)
    row["mean_f"], row["se_f"] = _mean_se(s.f[ok])
    return row


def rate_fit(rows, column: str, xs=None) -> tuple[float, float, float]:
    """OLS slope, its standard error and intercept of log(mean) against log(n)."""
    if len(rows) < 3:
        raise ValueError("rate fit needs at least three grid points")
    y = np.array([r[column] for r in rows], dtype=float)
    if np.any(~(y > 0)):
        raise NonPositiveMean(f"column {column} has a nonpositive mean")
    x = np.log(np.array([r["n"] for r in rows], dtype=float)) if xs is None else np.asarray(xs, dtype=float)
    return linear_fit(x, np.log(y))


def linear_fit(x, y) -> tuple[float, float, float]:
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    X = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    dof = len(x) - 2
    if dof > 0:
        s2 = float(resid @ resid) / dof
        cov = s2 * np.linalg.inv(X.T @ X)
        se = math.sqrt(max(cov[0, 0], 0.0))
    else:
        se = math.nan
    return float(coef[0]), se, float(coef[1])


def richardson(n1: float, a1: float, n2: float, a2: float, p: float) -> float:
    """Limit L of a(n) = L + C n^(-p) through two points (heuristic)."""
    w1, w2 = n1**p, n2**p
    return (a2 * w2 - a1 * w1) / (w2 - w1)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: list[dict]
    targets: LimitTargets | None
    analysis: dict = field(default_factory=dict)
    samples: list[Samples] = field(default_factory=list, repr=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([_fmt(r[c]) for c in CSV_COLUMNS])
        return buf.getvalue()

    def write_csv(self, path: str):
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return f"{v:.12g}"


def _targets(cfg: ExperimentConfig) -> LimitTargets | None:
    try:
        return theorem_targets(cfg.body, cfg.dist, resolution=cfg.quad_nodes)
    except (ValueError, NotImplementedError):
        return None


def run_experiment(cfg: ExperimentConfig, keep_samples: bool = False) -> ExperimentResult:
    body, dist = cfg.body, cfg.dist
    width_k = mean_width(body) if body.dim <= 3 else math.nan
    phi_k = phi(body, dist)
    rows, kept = [], []
    for j, n in enumerate(cfg.grid):
        s = simulate(body, dist, n, cfg.reps, cfg.seed, j, cfg.workers, cfg.sampler, width_k, phi_k)
        rows.append(summarize(s))
        if keep_samples or cfg.theorem in ("efron", "lemma41", "tail"):
            kept.append(s)
    res = ExperimentResult(cfg, rows, _targets(cfg), samples=kept)
    res.analysis = analyze(res)
    if cfg.out:
        res.write_csv(cfg.out)
    return res


def _safe_fit(rows, column):
    try:
        return rate_fit(rows, column)
    except (ValueError, NonPositiveMean):
        return None


def analyze(res: ExperimentResult) -> dict:
    """Rate fits and normalized limit estimates appropriate to the theorem tag."""
    cfg, rows, t = res.config, res.rows, res.targets
    d = cfg.body.dim
    tag = cfg.theorem
    out: dict = {}
    last = rows[-1]
    p = 1.0 / (d + 1)
    if tag in ("thm31", "thm22"):
        out["slope_dW"] = _safe_fit(rows, "mean_dW")
        out["expected_slope_dW"] = -2.0 / (d + 1)
        norm = [r["n"] ** (2 * p) * r["mean_dW"] for r in rows]
        out["normalized_dW"] = norm[-1]
        if len(rows) >= 2:
            out["richardson_dW"] = richardson(rows[-2]["n"], norm[-2], last["n"], norm[-1], p)
        out["target"] = t.thm31 if t else None
    if tag in ("thm31", "thm22", "thm41"):
        for k in (1, 2, 3, 4):
            col = "mean_dPhi" if k == 1 else f"mean_dPhi{k}"
            out[f"slope_dPhi{k}"] = _safe_fit(rows, col)
            out[f"bound_slope_dPhi{k}"] = -2.0 * k / (d + 1)
    if tag in ("thm42", "thm41"):
        out["slope_f"] = _safe_fit(rows, "mean_f")
        out["expected_slope_f"] = (d - 1) / (d + 1)
        norm = [r["n"] ** (-(d - 1) * p) * r["mean_f"] for r in rows]
        out["normalized_f"] = norm[-1]
        if len(rows) >= 2:
            out["richardson_f"] = richardson(rows[-2]["n"], norm[-2], last["n"], norm[-1], p)
        out["target"] = t.thm42 if t else None
    if tag in ("thm32", "thm43"):
        top = rows[len(rows) // 2 :] if len(rows) >= 6 else rows[-3:]
        logs = [math.log(r["n"]) ** (d - 1) for r in top]
        if len(top) >= 2:
            out["log_slope_f"] = linear_fit(logs, [r["mean_f"] for r in top])
            out["log_slope_ndW"] = linear_fit(logs, [r["n"] * r["mean_dW"] for r in top])
        out["normalized_ndW"] = last["n"] * last["mean_dW"] / math.log(last["n"]) ** (d - 1)
        out["normalized_f"] = last["mean_f"] / math.log(last["n"]) ** (d - 1)
        out["target"] = t.thm32 if t else None
    if tag == "efron":
        out["efron"] = [efron_from_samples(s) for s in res.samples]
    if tag == "lemma41":
        out["lemma41"] = [lemma41_from_samples(s) for s in res.samples]
    if tag == "tail":
        out["tail"] = [tail_from_samples(s, cfg.body.circumradius, DEFAULT_X_GRID) for s in res.samples]
    return out


@dataclass(frozen=True)
class PairedReport:
    n: float
    replicates: int
    lhs: float
    rhs: float
    diff: float
    se: float
    passed: bool


def efron_from_samples(s: Samples) -> PairedReport:
    ok = s.ok
    f, dphi = s.f[ok], s.dPhi[ok]
    paired = f - 2.0 * s.n * dphi
    diff, se = _mean_se(paired)
    return PairedReport(s.n, int(ok.sum()), float(f.mean()), float(2.0 * s.n * dphi.mean()), diff, se,
                        abs(diff) <= 3.0 * se)


def efron_check(body: ConvexBody, dist: Directional, n: float, replicates: int, seed: int = 0,
                workers: int = 1) -> PairedReport:
    """Facet number against 2n times the hitting excess, on shared replicates."""
    s = simulate(body, dist, n, replicates, seed, 0, workers)
    if s.ok.sum() < 100:
        raise ValueError("need at least 100 untruncated replicates")
    return efron_from_samples(s)


def lemma41_sides(f, dphi, n: float, k: int = 2, factorial: bool = True):
    """Per-replicate falling factorial f(f-1)...(f-k+1) and (2n)^k/k! * dphi^k.

    With ``factorial=False`` the right side is (2n)^k * dphi^k, the bound
    that counting ordered k-tuples of facet hyperplanes actually delivers.
    """
    f = np.asarray(f, dtype=float)
    dphi = np.asarray(dphi, dtype=float)
    lhs = np.ones_like(f)
    for j in range(k):
        lhs = lhs * (f - j)
    rhs = (2.0 * n) ** k * dphi**k
    if factorial:
        rhs = rhs / math.factorial(k)
    return lhs, rhs


@dataclass(frozen=True)
class Lemma41Report:
    n: float
    replicates: int
    k: int
    lhs: float
    rhs_stated: float
    rhs_ordered: float
    se_stated: float
    se_ordered: float

    @property
    def passed_stated(self) -> bool:
        """lhs <= (2n)^k/k! E[dPhi^k] within 3 standard errors of the paired difference."""
        return self.lhs - self.rhs_stated <= 3.0 * self.se_stated

    @property
    def passed_ordered(self) -> bool:
        return self.lhs - self.rhs_ordered <= 3.0 * self.se_ordered

    passed = passed_stated


def lemma41_from_samples(s: Samples, k: int = 2) -> Lemma41Report:
    ok = s.ok
    lhs, rhs = lemma41_sides(s.f[ok], s.dPhi[ok], s.n, k)
    _, rhs2 = lemma41_sides(s.f[ok], s.dPhi[ok], s.n, k, factorial=False)
    return Lemma41Report(s.n, int(ok.sum()), k, float(lhs.mean()), float(rhs.mean()), float(rhs2.mean()),
                         _mean_se(lhs - rhs)[1], _mean_se(lhs - rhs2)[1])


def lemma41_check(body: ConvexBody, dist: Directional, n: float, replicates: int, seed: int = 0,
                  workers: int = 1, k: int = 2) -> Lemma41Report:
    """Factorial moment of f against the hitting-excess moment, on shared replicates."""
    s = simulate(body, dist, n, replicates, seed, 0, workers)
    return lemma41_from_samples(s, k)


DEFAULT_X_GRID = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.8, 1.0)
TAIL_FACTORS = (1.5, 2.0)


@dataclass
class TailReport:
    n: float
    replicates: int
    x_grid: tuple[float, ...]
    factors: tuple[float, ...]
    prob: dict
    se: dict
    slope: dict
    note: dict

    def at(self, c: float, x: float) -> tuple[float, float]:
        i = int(np.argmin(np.abs(np.asarray(self.x_grid) - x)))
        return float(self.prob[c][i]), float(self.se[c][i])


def tail_from_samples(s: Samples, r_body: float, x_grid=DEFAULT_X_GRID, factors=TAIL_FACTORS) -> TailReport:
    R = s.R[s.ok]
    m = len(R)
    prob, se, slope, note = {}, {}, {}, {}
    for c in factors:
        p = np.array([np.mean(R > c * (r_body + x)) for x in x_grid])
        prob[c] = p
        se[c] = np.sqrt(p * (1 - p) / m)
        pos = p > 0
        if pos.sum() >= 2:
            slope[c] = linear_fit(np.asarray(x_grid)[pos], np.log(p[pos]))[0]
            note[c] = ""
        else:
            slope[c] = math.nan
            note[c] = "tail below resolution"
    return TailReport(s.n, m, tuple(x_grid), tuple(factors), prob, se, slope, note)


def tail_estimate(body: ConvexBody, dist: Directional, n: float, replicates: int, x_grid=DEFAULT_X_GRID,
                  seed: int = 0, factors=TAIL_FACTORS, workers: int = 1, exp_id: int = 0) -> TailReport:
    """Empirical P(R_o(Z) > c (R_o(K) + x)) and the slope of its logarithm in x."""
    if replicates < 10_000:
        raise ValueError("tail estimates need at least 10^4 replicates")
    s = simulate(body, dist, n, replicates, seed, exp_id, workers)
    return tail_from_samples(s, body.circumradius, x_grid, factors)


def tail_doubling(small: TailReport, large: TailReport, x: float, c: float) -> tuple[float, float, bool]:
    """One-sided 3 sigma test that the tail at the larger n is at most half the smaller one.

    Returns (excess, se, passed) with excess = p_large - p_small / 2; the
    test fails only when the excess is significantly positive.
    """
    p1, s1 = small.at(c, x)
    p2, s2 = large.at(c, x)
    excess = p2 - 0.5 * p1
    se = math.sqrt(s2**2 + 0.25 * s1**2)
    return excess, se, excess <= 3.0 * se
