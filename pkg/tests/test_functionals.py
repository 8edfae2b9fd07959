import math

import numpy as np
import pytest

from kcell.cell import build_cell, cell_from_halfspaces
from kcell.directional import Atomic, Cosine2, Isotropic, phi
from kcell.functionals import (evaluate, hitting_diff, mean_width, mean_width_quadrature, volume,
                               volume_divergence)
from kcell.geometry import Ball, Cube, Ellipsoid, Polytope, Simplex
from kcell.process import ProcessConfig, rng_stream

from conftest import random_units


def test_mean_width_examples():
    for d in (2, 3):
        assert mean_width(Ball(0.8, d)) == pytest.approx(1.6, abs=1e-12)
    assert mean_width(Cube(0.5, 2)) == pytest.approx(4 / math.pi)
    assert mean_width(Cube(0.5, 3)) == pytest.approx(1.5)
    assert mean_width_quadrature(Cube(0.5, 2), 20000) == pytest.approx(4 / math.pi, rel=1e-6)
    assert mean_width_quadrature(Cube(0.5, 3), 200_000) == pytest.approx(1.5, rel=1e-4)


def test_regular_tetrahedron_width():
    # mean width of the regular tetrahedron with edge a is 3a*arccos(-1/3)/(2 pi)
    S = Simplex(3)
    a = np.linalg.norm(S.vertices[0] - S.vertices[1])
    assert mean_width(S) == pytest.approx(3 * a * math.acos(-1 / 3) / (2 * math.pi), rel=1e-12)


def test_ellipse_width_is_perimeter_over_pi():
    from scipy.integrate import quad

    per = quad(lambda t: math.hypot(2 * math.sin(t), math.cos(t)), 0, 2 * math.pi, epsabs=1e-13)[0]
    assert mean_width(Ellipsoid([2, 1])) == pytest.approx(per / math.pi, rel=1e-10)


def test_volume_examples():
    sq = cell_from_halfspaces([[1, 0], [-1, 0], [0, 1], [0, -1]], np.ones(4))
    assert volume(sq) == pytest.approx(4.0)
    tri = cell_from_halfspaces([[-1, 0], [0, -1], [1 / math.sqrt(2), 1 / math.sqrt(2)]],
                               [1 / 3, 1 / 3, 1 / (3 * math.sqrt(2))])
    assert volume(tri) == pytest.approx(0.5)
    cube = cell_from_halfspaces(np.vstack([np.eye(3), -np.eye(3)]), np.full(6, 0.5))
    assert volume(cube) == pytest.approx(1.0)
    assert mean_width(cube) == pytest.approx(1.5)


def test_volume_two_formulas_on_random_cells():
    cfg = ProcessConfig(80, Ball(1, 3), Isotropic(3), sampler="shell")
    for i in range(10):
        cell = build_cell(cfg, rng_stream(41, 0, i))
        assert volume(cell) == pytest.approx(volume_divergence(cell), abs=1e-8)


@pytest.mark.parametrize("dim", [2, 3])
def test_exact_width_matches_quadrature(dim):
    cfg = ProcessConfig(60 if dim == 2 else 40, Simplex(dim), Isotropic(dim), sampler="shell")
    for i in range(50 if dim == 2 else 15):
        cell = build_cell(cfg, rng_stream(42, dim, i))
        nodes = 100_000 if dim == 2 else 400_000
        assert mean_width(cell) == pytest.approx(mean_width_quadrature(cell, nodes), rel=1e-4)


def test_hitting_diff_is_zero_for_body_itself():
    K = Cube(1, 2)
    A = Atomic([[1, 0], [0, 1]])
    Z = cell_from_halfspaces(K.facet_normals, K.facet_offsets)
    assert hitting_diff(Z, K, A) == pytest.approx(0.0, abs=1e-12)


def test_hitting_diff_atomic_square():
    eps = 0.125
    K = Cube(1, 2)
    A = Atomic([[1, 0], [0, 1]])
    Z = cell_from_halfspaces([[1, 0], [-1, 0], [0, 1], [0, -1]], np.full(4, 1 + eps))
    assert hitting_diff(Z, K, A) == pytest.approx(eps)


def test_isotropic_identity_is_structural():
    K = Ball(1, 2)
    D = Isotropic(2)
    cfg = ProcessConfig(50, K, D, sampler="shell")
    for i in range(20):
        cell = build_cell(cfg, rng_stream(43, 0, i))
        s = evaluate(cell, K, D, mean_width(K), phi(K, D))
        assert 2 * s.delta_phi == s.delta_w
        assert s.delta_w >= 0 and s.facets >= 3


def test_density_hitting_diff_matches_quadrature():
    K, D = Ball(1, 2), Cosine2(2, 4)
    cfg = ProcessConfig(50, K, D, sampler="shell")
    t = np.linspace(0, 2 * np.pi, 200_000, endpoint=False)
    u = np.column_stack([np.cos(t), np.sin(t)])
    for i in range(10):
        cell = build_cell(cfg, rng_stream(44, 0, i))
        ref = np.mean((np.max(u @ cell.vertices.T, axis=1) - 1.0) * D.density(u))
        assert hitting_diff(cell, K, D) == pytest.approx(ref, rel=1e-6)
    K3, D3 = Ball(1, 3), Cosine2(3, 2)
    cell = build_cell(ProcessConfig(50, K3, D3, sampler="shell"), rng_stream(45, 0, 0))
    assert hitting_diff(cell, K3, D3) > 0


def test_truncated_cells_give_no_functionals():
    cfg = ProcessConfig(0.02, Ball(1, 2), Isotropic(2), max_doublings=0)
    for i in range(20):
        cell = build_cell(cfg, rng_stream(46, 0, i))
        if cell.truncated:
            s = evaluate(cell, Ball(1, 2), Isotropic(2), 2.0, 1.0)
            assert s.truncated and math.isnan(s.delta_w)
            with pytest.raises(ValueError):
                mean_width(cell)
            return
    pytest.fail("no truncated cell produced")
