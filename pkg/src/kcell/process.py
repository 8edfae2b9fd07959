"""Stationary Poisson hyperplane processes restricted to hyperplanes missing K.

A hyperplane missing K has exactly one representation H(u, tau) with
tau > h(K, u); with intensity n and even directional law phi these
representations form a Poisson process with intensity ``2 n dtau phi(du)``
on {tau > h(K, u)}. Everything here samples from that description.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .directional import Directional, phi, sample_direction_weighted
from .geometry import ConvexBody


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ProcessConfig:
    intensity: float
    body: ConvexBody
    dist: Directional
    initial_window: float | None = None
    growth_factor: float = 2.0
    max_doublings: int = 64
    master_seed: int = 0
    sampler: str = "window"
    initial_gap: float | None = None

    def __post_init__(self):
        if not (self.intensity > 0 and math.isfinite(self.intensity)):
            raise ConfigError("intensity must be positive")
        if self.body.dim != self.dist.dim:
            raise ConfigError("body and directional distribution differ in dimension")
        if self.growth_factor <= 1:
            raise ConfigError("growth factor must exceed 1")
        if self.max_doublings < 0:
            raise ConfigError("max_doublings must be nonnegative")
        if self.sampler not in ("window", "shell"):
            raise ConfigError(f"unknown sampler {self.sampler!r}")
        if self.sampler == "shell" and self.body.dim > 3:
            raise ConfigError("the shell sampler needs d <= 3")
        if self.initial_window is not None and self.initial_window < self.body.circumradius:
            raise ConfigError("initial window must contain the body")
        if self.initial_gap is not None and self.initial_gap <= 0:
            raise ConfigError("initial gap must be positive")

    @property
    def dim(self) -> int:
        return self.body.dim

    @property
    def window0(self) -> float:
        if self.initial_window is not None:
            return self.initial_window
        return 2.0 * self.body.circumradius + 1.0

    @property
    def gap0(self) -> float:
        """Default first shell width: about 4(d+1) n^((d-1)/(d+1)) expected hyperplanes."""
        if self.initial_gap is not None:
            return self.initial_gap
        d, n = self.dim, self.intensity
        target = max(16.0, 4.0 * (d + 1) * n ** ((d - 1) / (d + 1)))
        return min(self.body.circumradius, target / (2.0 * n))


@dataclass(frozen=True)
class HyperplaneBatch:
    """Hyperplanes H(u_i, tau_i) in canonical form, drawn from (r_in, r_out]."""

    normals: np.ndarray
    offsets: np.ndarray
    r_in: float
    r_out: float

    def __len__(self):
        return len(self.offsets)

    def union(self, other: "HyperplaneBatch") -> "HyperplaneBatch":
        return HyperplaneBatch(
            np.vstack([self.normals, other.normals]),
            np.concatenate([self.offsets, other.offsets]),
            min(self.r_in, other.r_in),
            max(self.r_out, other.r_out),
        )


def rng_stream(master_seed: int, experiment_id: int = 0, replicate: int = 0) -> np.random.Generator:
    """Counter-based stream that depends only on the triple of integers."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(experiment_id), int(replicate)))
    return np.random.Generator(np.random.Philox(ss))


def sample_window(cfg: ProcessConfig, R: float, rng: np.random.Generator, phi_k: float | None = None) -> HyperplaneBatch:
    """Hyperplanes of the process that hit the ball B_R but miss K."""
    body = cfg.body
    if R < body.circumradius - 1e-12:
        raise ValueError("window radius must be at least the circumradius of K")
    if phi_k is None:
        phi_k = phi(body, cfg.dist)
    mean = 2.0 * cfg.intensity * max(R - phi_k, 0.0)
    m = int(rng.poisson(mean))
    if m == 0:
        return HyperplaneBatch(np.zeros((0, body.dim)), np.zeros(0), 0.0, R)
    u = sample_direction_weighted(cfg.dist, body, R, rng, m)
    h = body.support(u)
    tau = R - (R - h) * rng.random(m)
    return HyperplaneBatch(u, tau, 0.0, R)


def sample_annulus(cfg: ProcessConfig, r_in: float, r_out: float, rng: np.random.Generator) -> HyperplaneBatch:
    """Hyperplanes with r_in < tau <= r_out; needs r_in >= circumradius of K."""
    if not r_out > r_in:
        raise ValueError("annulus needs r_out > r_in")
    if r_in < cfg.body.circumradius - 1e-12:
        raise ValueError("annulus must start outside the body")
    m = int(rng.poisson(2.0 * cfg.intensity * (r_out - r_in)))
    u = cfg.dist.sample(rng, m) if m else np.zeros((0, cfg.dim))
    tau = r_out - (r_out - r_in) * rng.random(m)
    return HyperplaneBatch(u, tau, r_in, r_out)


class ArrivalStream:
    """Hyperplanes ordered by a level variable with constant rate ``2 n``.

    Levels are the points of a homogeneous Poisson process on (start, inf),
    each carrying an independent direction from phi. Draws happen in
    batches of a fixed size schedule, so the hyperplanes below any level
    depend only on the generator state, never on how far the caller asks:
    a prefix of the stream is the same however the caller extends it.
    """

    def __init__(self, rate: float, dist: Directional, rng: np.random.Generator, start: float = 0.0):
        self.rate = rate
        self.dist = dist
        self.rng = rng
        self._last = start
        self._levels: list[np.ndarray] = []
        self._dirs: list[np.ndarray] = []
        self._batch = 0

    def _draw(self):
        size = 64 << min(self._batch, 14)
        self._batch += 1
        gaps = self.rng.exponential(1.0 / self.rate, size)
        lev = self._last + np.cumsum(gaps)
        self._last = float(lev[-1])
        self._levels.append(lev)
        self._dirs.append(self.dist.sample(self.rng, size))

    def upto(self, level: float) -> tuple[np.ndarray, np.ndarray]:
        """All arrivals with level <= ``level``: (levels, directions)."""
        while self._last <= level:
            self._draw()
        lev = np.concatenate(self._levels)
        dirs = np.vstack(self._dirs)
        k = int(np.searchsorted(lev, level, side="right"))
        return lev[:k], dirs[:k]
