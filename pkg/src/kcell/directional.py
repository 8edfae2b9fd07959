"""Even directional distributions on the unit sphere and the hitting functional.

Densities are taken with respect to the *normalized* spherical Lebesgue
measure sigma, so the isotropic law has density one.
"""

from __future__ import annotations

import math

import numpy as np

from . import sphere
from .geometry import Ball, ConvexBody


class DistributionError(ValueError):
    pass


class EnvelopeViolation(RuntimeError):
    """A rejection proposal exceeded the declared density bound."""


class Directional:
    dim: int
    is_atomic = False
    has_density = True

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    def density(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def integrate(self, values_fn, nodes: int | None = None):
        """(integral of values_fn(u) phi(du), error estimate)."""
        u, w, kind = sphere.sphere_rule(self.dim, nodes)
        return sphere.integrate(values_fn(u) * self.density(u), w, kind)


class Isotropic(Directional):
    def __init__(self, dim: int):
        if dim < 2:
            raise DistributionError("dimension must be at least 2")
        self.dim = dim
        self.spec = "isotropic"

    def sample(self, rng, size):
        return sphere.uniform_directions(rng, size, self.dim)

    def density(self, u):
        return np.ones(np.shape(u)[:-1])

    def __repr__(self):
        return f"Isotropic(d={self.dim})"


class Cosine2(Directional):
    """q(u) = (1 + c <u, e1>^2) / (1 + c/d), a positive continuous even density."""

    def __init__(self, dim: int, c: float, sup_bound: float | None = None):
        if c < 0 or not math.isfinite(c):
            raise DistributionError("cosine2 parameter must be >= 0")
        self.dim = dim
        self.c = float(c)
        self.norm = 1.0 + self.c / dim
        self.sup_bound = sup_bound if sup_bound is not None else (1.0 + self.c) / self.norm
        self.spec = f"cosine2:{c:g}"

    def density(self, u):
        u = np.asarray(u, dtype=float)
        return (1.0 + self.c * u[..., 0] ** 2) / self.norm

    def sample(self, rng, size):
        out = np.empty((size, self.dim))
        filled = 0
        while filled < size:
            want = size - filled
            m = int(want * self.sup_bound) + 16
            prop = sphere.uniform_directions(rng, m, self.dim)
            q = self.density(prop)
            if np.any(q > self.sup_bound * (1 + 1e-12)):
                raise EnvelopeViolation(f"density {q.max():g} exceeds bound {self.sup_bound:g}")
            acc = prop[rng.random(m) * self.sup_bound < q][:want]
            out[filled : filled + len(acc)] = acc
            filled += len(acc)
        return out

    def __repr__(self):
        return f"Cosine2(d={self.dim}, c={self.c:g})"


class Atomic(Directional):
    """Finitely many directions, stored as antipodal pairs of equal weight."""

    is_atomic = True
    has_density = False

    def __init__(self, directions, weights=None, symmetrize: bool = True, require_span: bool = True):
        U = np.atleast_2d(np.asarray(directions, dtype=float))
        if weights is None:
            weights = np.ones(len(U))
        w = np.asarray(weights, dtype=float)
        if len(w) != len(U) or np.any(w <= 0):
            raise DistributionError("weights must be positive, one per direction")
        norms = np.linalg.norm(U, axis=1)
        if np.any(norms == 0):
            raise DistributionError("zero direction")
        U = U / norms[:, None]
        if symmetrize:
            U, w = _symmetrize(U, w)
        elif not _is_even(U, w):
            raise DistributionError("atomic distribution must be even")
        self.dim = U.shape[1]
        # processes need spanning directions; bare samplers may skip the check
        if require_span and np.linalg.matrix_rank(U, tol=1e-9) < self.dim:
            raise DistributionError("directions are concentrated on a great subsphere")
        self.directions = U
        self.weights = w / w.sum()
        self._cum = np.cumsum(self.weights)
        self.spec = "atomic"

    def sample(self, rng, size):
        idx = np.searchsorted(self._cum, rng.random(size) * self._cum[-1], side="right")
        return self.directions[np.minimum(idx, len(self.weights) - 1)]

    def density(self, u):
        raise DistributionError("atomic distribution has no density")

    def integrate(self, values_fn, nodes=None):
        return float(np.dot(values_fn(self.directions), self.weights)), 0.0

    def __repr__(self):
        return f"Atomic({len(self.weights)} atoms, d={self.dim})"


def _match(U, v, tol=1e-12):
    hits = np.flatnonzero(np.linalg.norm(U - v, axis=1) < tol)
    return int(hits[0]) if len(hits) else -1


def _symmetrize(U, w):
    dirs, wts = [], []
    for u, x in zip(U, w):
        for s in (u, -u):
            j = _match(np.asarray(dirs), s) if dirs else -1
            if j >= 0:
                wts[j] += x / 2
            else:
                dirs.append(s)
                wts.append(x / 2)
    return np.asarray(dirs), np.asarray(wts)


def _is_even(U, w):
    for u, x in zip(U, w):
        j = _match(U, -u)
        if j < 0 or abs(w[j] - x) > 1e-12:
            return False
    return True


def sample_direction(dist: Directional, rng: np.random.Generator, size: int | None = None):
    out = dist.sample(rng, 1 if size is None else size)
    return out[0] if size is None else out


def sample_direction_weighted(dist: Directional, body: ConvexBody, R: float, rng, size: int | None = None):
    """Directions with law proportional to (R - h(K, u)) phi(du).

    Rejection: propose from phi, accept with probability (R - h(K,u)) / R.
    """
    if R < body.circumradius - 1e-12:
        raise ValueError("R must be at least the circumradius of the body")
    want = 1 if size is None else size
    out = np.empty((want, body.dim))
    filled = 0
    while filled < want:
        m = 2 * (want - filled) + 8
        prop = dist.sample(rng, m)
        acc = prop[rng.random(m) * R < R - body.support(prop)][: want - filled]
        out[filled : filled + len(acc)] = acc
        filled += len(acc)
    return out[0] if size is None else out


def phi(body: ConvexBody, dist: Directional, nodes: int | None = None) -> float:
    """Hitting functional: integral of h(K, u) against phi."""
    return phi_with_error(body, dist, nodes)[0]


def phi_with_error(body: ConvexBody, dist: Directional, nodes: int | None = None):
    if isinstance(body, Ball):
        return body.radius, 0.0
    if dist.is_atomic:
        return dist.integrate(body.support)
    if isinstance(dist, Isotropic) and body.dim <= 3:
        return 0.5 * body.mean_width(), 0.0
    if body.dim == 2 and not body.is_polytope:
        # smooth integrand: the trapezoid rule is spectrally accurate
        return dist.integrate(body.support, nodes or 4096)
    return dist.integrate(body.support, nodes)


def parse_distribution(text: str, dim: int) -> Directional:
    """Parse ``isotropic``, ``cosine2:c`` or ``atomic:ux,uy[,uz]:w;...``."""
    text = text.strip()
    kind, _, arg = text.partition(":")
    kind = kind.lower()
    if kind == "isotropic":
        return Isotropic(dim)
    if kind == "cosine2":
        try:
            return Cosine2(dim, float(arg))
        except ValueError:
            raise DistributionError(f"bad cosine2 parameter {arg!r}") from None
    if kind == "atomic":
        dirs, wts = [], []
        for item in arg.split(";"):
            if not item.strip():
                continue
            vec, _, wt = item.partition(":")
            try:
                u = [float(x) for x in vec.split(",")]
                wts.append(float(wt) if wt.strip() else 1.0)
            except ValueError:
                raise DistributionError(f"bad atom {item!r}") from None
            if len(u) != dim:
                raise DistributionError(f"atom {item!r} has wrong dimension")
            dirs.append(u)
        if not dirs:
            raise DistributionError("atomic distribution needs at least one atom")
        dist = Atomic(dirs, wts)
        dist.spec = text
        return dist
    raise DistributionError(f"unknown distribution {kind!r}")
