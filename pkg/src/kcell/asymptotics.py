"""Limit constants for the mean width excess and the facet number of K-cells.

Densities follow the convention of :mod:`kcell.directional`: q is taken
against the normalized spherical measure, so the isotropic law has q = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .directional import Atomic, Directional, Isotropic
from .geometry import ConvexBody, Polytope
from .sphere import ball_volume, sphere_area


class HypothesisViolation(ValueError):
    """The requested limit constant is not covered for this body/law pair."""


def gamma_self_check(tol: float = 1e-12) -> float:
    """Largest relative defect of math.gamma on recurrence and reflection identities."""
    worst = 0.0
    for x in np.linspace(0.05, 7.5, 151):
        lhs, rhs = math.gamma(x + 1.0), x * math.gamma(x)
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
        if x < 1.0:
            refl = math.gamma(x) * math.gamma(1.0 - x) * math.sin(math.pi * x) / math.pi
            worst = max(worst, abs(refl - 1.0))
    worst = max(worst, abs(math.gamma(0.5) ** 2 / math.pi - 1.0))
    if worst > tol:
        raise ArithmeticError(f"gamma self-check failed: relative defect {worst:.3e}")
    return worst


def c_d(d: int) -> float:
    if d < 2:
        raise ValueError("dimension must be at least 2")
    pre = (d * d + d + 2) * (d * d + 1) / (2.0 * (d + 3) * math.factorial(d + 1))
    return pre * math.gamma((d * d + 1) / (d + 1)) * ((d + 1) / ball_volume(d - 1)) ** (2.0 / (d + 1))


def _density_at(dist: Directional, normals: np.ndarray) -> np.ndarray:
    if isinstance(dist, Atomic) or not dist.has_density:
        raise HypothesisViolation("curvature functionals need a directional density")
    q = np.asarray(dist.density(normals), dtype=float)
    if np.any(q <= 0):
        raise HypothesisViolation("density must be positive")
    return q


def _default_resolution(d: int) -> int:
    return 4096 if d == 2 else 128


def _curvature_integral(K: ConvexBody, dist: Directional, q_exp: float, resolution: int | None) -> float:
    d = K.dim
    if K.is_polytope:
        # kappa vanishes on facet interiors; still validate the law
        _density_at(dist, np.eye(d)[:1])
        return 0.0
    bq = K.boundary_quadrature(resolution or _default_resolution(d))
    q = _density_at(dist, bq.normals)
    integrand = q**q_exp * bq.curvature ** (d / (d + 1))
    return float(np.dot(integrand, bq.weights))


def F_functional(K: ConvexBody, dist: Directional, resolution: int | None = None) -> float:
    d = K.dim
    scale = 2.0 * c_d(d) * sphere_area(d) ** (-(d - 1) / (d + 1))
    return scale * _curvature_integral(K, dist, -2.0 / (d + 1), resolution)


def G_functional(K: ConvexBody, dist: Directional, resolution: int | None = None) -> float:
    d = K.dim
    scale = c_d(d) * sphere_area(d) ** (-(d - 1) / (d + 1))
    return scale * _curvature_integral(K, dist, (d - 1) / (d + 1), resolution)


def F_ball_closed_form(radius: float, d: int, q: float = 1.0) -> float:
    """F for a ball and constant density q, by direct substitution."""
    return 2.0 * c_d(d) * sphere_area(d) ** (2.0 / (d + 1)) * q ** (-2.0 / (d + 1)) * radius ** ((d - 1) / (d + 1))


def G_ball_closed_form(radius: float, d: int, q: float = 1.0) -> float:
    return c_d(d) * sphere_area(d) ** (2.0 / (d + 1)) * q ** ((d - 1) / (d + 1)) * radius ** ((d - 1) / (d + 1))


def polytope_log_constant(r: int, d: int) -> float:
    """Coefficient of log^(d-1) n for simplicial polytopes with r facets."""
    return r * d * (math.log(2.0) / (d + 1)) ** (d - 1)


@dataclass(frozen=True)
class LimitTargets:
    d: int
    cd: float
    F: float | None = None
    G: float | None = None
    thm31: float | None = None
    thm32: float | None = None
    thm42: float | None = None
    thm43: float | None = None

    def items(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if v is not None:
                yield f.name, v


def theorem_targets(K: ConvexBody, dist: Directional, d: int | None = None, r: int | None = None,
                    resolution: int | None = None) -> LimitTargets:
    """All limit constants whose hypotheses hold for (K, dist).

    Passing ``r`` asks for the polytope constants explicitly; that raises
    :class:`HypothesisViolation` unless K is a simplicial polytope with r
    facets and the law is isotropic.
    """
    d = K.dim if d is None else d
    if d != K.dim or d != dist.dim:
        raise ValueError("dimension mismatch between body, distribution and d")
    out = {"d": d, "cd": c_d(d)}
    if dist.has_density and not isinstance(dist, Atomic):
        F = F_functional(K, dist, resolution)
        G = G_functional(K, dist, resolution)
        out.update(F=F, G=G, thm31=2.0 ** (-2.0 / (d + 1)) * F, thm42=2.0 ** ((d - 1) / (d + 1)) * G)
    polytope_ok = isinstance(K, Polytope) and K.is_simplicial and isinstance(dist, Isotropic)
    if r is not None:
        if not isinstance(K, Polytope):
            raise HypothesisViolation("the log-rate constant needs a polytope")
        if not K.is_simplicial:
            raise HypothesisViolation("the log-rate constant needs a simplicial polytope")
        if not isinstance(dist, Isotropic):
            raise HypothesisViolation("the log-rate constant needs an isotropic process")
        if r != K.n_facets:
            raise HypothesisViolation(f"body has {K.n_facets} facets, not {r}")
    if polytope_ok:
        c = polytope_log_constant(K.n_facets, d)
        out.update(thm32=c, thm43=c)
    return LimitTargets(**out)
