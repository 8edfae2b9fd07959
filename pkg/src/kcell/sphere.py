"""Quadrature rules and uniform sampling on the unit sphere.

Weights returned by the rules in this module are normalized so they sum to
one, i.e. they integrate against the normalized spherical Lebesgue measure.
Multiply by :func:`sphere_area` to integrate against the unnormalized one.
"""

from __future__ import annotations

import math

import numpy as np

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


def sphere_area(d: int) -> float:
    """Surface area of the unit sphere in R^d (2*pi for d=2, 4*pi for d=3)."""
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def ball_volume(d: int) -> float:
    """Volume of the unit ball in R^d (kappa_1 = 2, kappa_2 = pi)."""
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


def circle_nodes(n: int, offset: float = 0.5) -> np.ndarray:
    theta = 2.0 * math.pi * (np.arange(n) + offset) / n
    return np.column_stack([np.cos(theta), np.sin(theta)])


def fibonacci_nodes(n: int) -> np.ndarray:
    """Spiral point set on S^2 with (n) nearly equal-area cells."""
    k = np.arange(n) + 0.5
    z = 1.0 - 2.0 * k / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = GOLDEN_ANGLE * np.arange(n)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def gauss_product_rule(n_polar: int, n_azimuth: int | None = None):
    """Gauss-Legendre in z times trapezoid in azimuth on S^2.

    Spectrally accurate for smooth integrands; used where the integrand is
    known to be smooth (boundary integrals of smooth bodies).
    """
    if n_azimuth is None:
        n_azimuth = 2 * n_polar
    z, wz = np.polynomial.legendre.leggauss(n_polar)
    phi = 2.0 * math.pi * (np.arange(n_azimuth) + 0.5) / n_azimuth
    zz, pp = np.meshgrid(z, phi, indexing="ij")
    r = np.sqrt(1.0 - zz**2)
    nodes = np.column_stack([(r * np.cos(pp)).ravel(), (r * np.sin(pp)).ravel(), zz.ravel()])
    weights = np.repeat(wz, n_azimuth) / (2.0 * n_azimuth)
    return nodes, weights


def uniform_directions(rng: np.random.Generator, size: int, d: int) -> np.ndarray:
    x = rng.standard_normal((size, d))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def sphere_rule(d: int, nodes: int | None = None, rng: np.random.Generator | None = None):
    """Default direction rule: (points, weights, kind).

    d=2 trapezoid with 4096 nodes, d=3 Fibonacci spiral with 8192 nodes,
    d>=4 plain Monte Carlo (kind == "mc") with 2**16 draws.
    """
    if d == 2:
        n = nodes or 4096
        return circle_nodes(n), np.full(n, 1.0 / n), "trapezoid"
    if d == 3:
        n = nodes or 8192
        return fibonacci_nodes(n), np.full(n, 1.0 / n), "fibonacci"
    n = nodes or 2**16
    if rng is None:
        rng = np.random.default_rng(20240601)
    return uniform_directions(rng, n, d), np.full(n, 1.0 / n), "mc"


def smooth_rule(d: int, resolution: int):
    """High-order rule for smooth integrands (d=2 trapezoid, d=3 Gauss product)."""
    if d == 2:
        return circle_nodes(resolution), np.full(resolution, 1.0 / resolution)
    if d == 3:
        return gauss_product_rule(max(4, resolution // 2), resolution)
    raise ValueError(f"no smooth sphere rule for d={d}")


def integrate(f_values: np.ndarray, weights: np.ndarray, kind: str = "") -> tuple[float, float]:
    """Weighted sum with an error estimate (standard error for MC, else 0)."""
    value = float(np.dot(f_values, weights))
    if kind == "mc":
        return value, float(np.std(f_values, ddof=1) / math.sqrt(len(f_values)))
    return value, 0.0
