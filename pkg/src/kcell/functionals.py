"""Mean width, hitting functional, facet number and volume of cells and bodies."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import sphere
from .cell import Cell, cell_support
from .directional import Atomic, Directional, Isotropic, phi
from .geometry import ConvexBody, Polytope, UnsupportedVariant

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


@dataclass(frozen=True)
class FunctionalSample:
    delta_w: float
    delta_phi: float
    facets: int
    circumradius: float
    volume: float | None
    truncated: bool = False


def _polygon_perimeter(V: np.ndarray) -> float:
    return float(np.linalg.norm(np.roll(V, -1, axis=0) - V, axis=1).sum())


def _edge_mean_width(lengths: np.ndarray, n1: np.ndarray, n2: np.ndarray) -> float:
    """Sum of edge length times exterior dihedral angle, over 4 pi."""
    cosang = np.clip(np.einsum("ij,ij->i", n1, n2), -1.0, 1.0)
    return float(np.sum(lengths * np.arccos(cosang)) / (4.0 * math.pi))


def _polytope_body_width(body: Polytope) -> float:
    if body.dim == 2:
        return _polygon_perimeter(body.vertices) / math.pi
    if body.dim == 3:
        e = body._hull.edges()
        V = body.vertices
        lengths = np.linalg.norm(V[e[:, 0]] - V[e[:, 1]], axis=1)
        n = body._hull.normals
        return _edge_mean_width(lengths, n[e[:, 2]], n[e[:, 3]])
    raise UnsupportedVariant("exact polytope mean width only for d <= 3")


def _cell_width(cell: Cell) -> float:
    if cell.truncated:
        raise ValueError("mean width of a truncated cell is not defined")
    if cell.dim == 2:
        return _polygon_perimeter(cell.vertices) / math.pi
    if cell.dim == 3:
        e = cell.edges
        V = cell.vertices
        lengths = np.linalg.norm(V[e[:, 0]] - V[e[:, 1]], axis=1)
        return _edge_mean_width(lengths, cell.normals[e[:, 2]], cell.normals[e[:, 3]])
    u, w, kind = sphere.sphere_rule(cell.dim, 4096)
    return 2.0 * sphere.integrate(cell_support(cell, u), w, kind)[0]


def mean_width(obj: Cell | ConvexBody, nodes: int | None = None) -> float:
    """W = 2 * integral of the support function against normalized sigma.

    Exact for polygons (perimeter / pi) and 3-polytopes (edge formula);
    smooth bodies use a spectrally accurate rule, d >= 4 Monte Carlo.
    """
    if isinstance(obj, Cell):
        return _cell_width(obj)
    if obj.is_polytope and obj.dim <= 3:
        return _polytope_body_width(obj)
    if obj.dim <= 3:
        u, w = sphere.smooth_rule(obj.dim, nodes or (4096 if obj.dim == 2 else 256))
        return 2.0 * float(np.dot(obj.support(u), w))
    u, w, kind = sphere.sphere_rule(obj.dim, nodes)
    return 2.0 * sphere.integrate(obj.support(u), w, kind)[0]


def mean_width_quadrature(obj: Cell | ConvexBody, nodes: int | None = None) -> float:
    """Direct sphere quadrature of 2 * integral of h; an independent check."""
    d = obj.dim
    u, w, kind = sphere.sphere_rule(d, nodes)
    h = cell_support(obj, u) if isinstance(obj, Cell) else obj.support(u)
    return 2.0 * sphere.integrate(h, w, kind)[0]


def _polygon_phi(cell: Cell, dist: Directional) -> float:
    """Integral of h(Z, u) q(u) over S^1 arc by arc (h is linear per arc)."""
    V = cell.vertices
    fac = cell.normals[cell.ring]
    ang = np.arctan2(fac[:, 1], fac[:, 0])
    # vertex k is the support point for normals between facet ring[k-1] and ring[k]
    start = np.roll(ang, 1)
    span = np.mod(ang - start, 2.0 * math.pi)
    t = start[:, None] + 0.5 * span[:, None] * (_GL_NODES[None] + 1.0)
    u = np.stack([np.cos(t), np.sin(t)], axis=-1)
    h = np.einsum("kd,kjd->kj", V, u)
    q = dist.density(u)
    return float(np.sum(0.5 * span[:, None] * _GL_WEIGHTS[None] * h * q) / (2.0 * math.pi))


def hitting_diff(cell: Cell, body: ConvexBody, dist: Directional, phi_k: float | None = None,
                 width_k: float | None = None) -> float:
    """Phi(Z) - Phi(K) for the cell Z of a process with directional law ``dist``."""
    if cell.truncated:
        raise ValueError("hitting functional of a truncated cell is not defined")
    if isinstance(dist, Atomic):
        U = dist.directions
        return float(np.dot(cell_support(cell, U) - body.support(U), dist.weights))
    if isinstance(dist, Isotropic):
        if width_k is None:
            width_k = mean_width(body)
        return 0.5 * (mean_width(cell) - width_k)
    if phi_k is None:
        phi_k = phi(body, dist)
    if cell.dim == 2:
        return _polygon_phi(cell, dist) - phi_k
    u, w, kind = sphere.sphere_rule(cell.dim)
    diff = (cell_support(cell, u) - body.support(u)) * dist.density(u)
    return sphere.integrate(diff, w, kind)[0]


def volume(cell: Cell) -> float:
    if cell.truncated:
        raise ValueError("volume of a truncated cell is not defined")
    V = cell.vertices
    if cell.dim == 2:
        x, y = V[:, 0], V[:, 1]
        return float(0.5 * abs(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)))
    if cell.dim == 3:
        a, b = V[cell.edges[:, 0]], V[cell.edges[:, 1]]
        total = 0.0
        for col in (2, 3):
            c = _facet_centers(cell)[cell.edges[:, col]]
            total += np.sum(np.abs(np.einsum("ij,ij->i", c, np.cross(a, b)))) / 6.0
        return float(total)
    raise UnsupportedVariant("volume only for d <= 3")


def volume_divergence(cell: Cell) -> float:
    """Volume as (1/3) sum over facets of tau_i * area_i (d = 3)."""
    if cell.dim != 3:
        raise UnsupportedVariant("divergence formula implemented for d = 3")
    V = cell.vertices
    a, b = V[cell.edges[:, 0]], V[cell.edges[:, 1]]
    centers = _facet_centers(cell)
    area = np.zeros(len(cell.offsets))
    for col in (2, 3):
        f = cell.edges[:, col]
        tri = np.linalg.norm(np.cross(a - centers[f], b - centers[f]), axis=1) / 2.0
        np.add.at(area, f, tri)
    return float(np.sum(cell.offsets * area) / 3.0)


def _facet_centers(cell: Cell) -> np.ndarray:
    V = cell.vertices
    m = len(cell.offsets)
    acc = np.zeros((m, 3))
    cnt = np.zeros(m)
    for col in (2, 3):
        f = cell.edges[:, col]
        np.add.at(acc, f, V[cell.edges[:, 0]] + V[cell.edges[:, 1]])
        np.add.at(cnt, f, 2.0)
    cnt[cnt == 0] = 1.0
    return acc / cnt[:, None]


def evaluate(cell: Cell, body: ConvexBody, dist: Directional, width_k: float, phi_k: float) -> FunctionalSample:
    """All functionals of one cell; ``width_k`` and ``phi_k`` are W(K), Phi(K)."""
    if cell.truncated:
        return FunctionalSample(math.nan, math.nan, 0, math.nan, None, truncated=True)
    dw = mean_width(cell) - width_k if cell.dim <= 3 else math.nan
    if isinstance(dist, Isotropic) and cell.dim <= 3:
        dphi = 0.5 * dw
    else:
        dphi = hitting_diff(cell, body, dist, phi_k=phi_k, width_k=width_k)
    vol = volume(cell) if cell.dim <= 3 else None
    r = cell.circumradius() if cell.vertices is not None else math.nan
    return FunctionalSample(dw, dphi, cell.n_facets, r, vol)
