import math

import numpy as np
import pytest
from scipy.integrate import quad

from kcell.geometry import (Ball, BodyError, Cube, Ellipsoid, Polytope, Simplex, UnsupportedVariant,
                            boundary_quadrature, circumradius, parse_body, support)

from conftest import random_units


def test_support_examples():
    assert support(Ball(1.0, 3), np.array([0.0, 0.6, 0.8])) == pytest.approx(1.0)
    assert support(Cube(1.0, 2), np.array([1.0, 0.0])) == pytest.approx(1.0)
    tri = Polytope([[2, 0], [0, 1], [-1, -1]], center=False)
    assert support(tri, np.array([0.0, 1.0])) == pytest.approx(1.0)


def test_circumradius_examples():
    assert circumradius(Ball(2.0, 2)) == 2.0
    assert circumradius(Cube(1.0, 2)) == pytest.approx(math.sqrt(2))
    assert circumradius(Simplex(2, 1.0)) == pytest.approx(1.0)
    assert circumradius(Ellipsoid([2.0, 1.0, 0.5])) == 2.0


def test_bodies_are_centered():
    tri = Polytope([[2, 0], [0, 1], [-1, -1.5]])
    V = tri.vertices
    x, y = V[:, 0], V[:, 1]
    cross = x * np.roll(y, -1) - np.roll(x, -1) * y
    area = cross.sum() / 2
    cx = ((x + np.roll(x, -1)) * cross).sum() / (6 * area)
    cy = ((y + np.roll(y, -1)) * cross).sum() / (6 * area)
    assert abs(cx) < 1e-12 and abs(cy) < 1e-12
    tet = Polytope([[0, 0, 0], [2, 0, 0], [0, 1, 0], [0, 0, 3], [0.2, 0.2, 0.2]])
    assert np.allclose(tet.vertices.mean(axis=0), 0, atol=1e-12)


@pytest.mark.parametrize("body", [Ball(1.3, 2), Cube(0.7, 2), Ellipsoid([2, 1]), Simplex(2, 1.5),
                                  Ball(1, 3), Cube(1, 3), Ellipsoid([1.5, 1, 0.5]), Simplex(3)])
def test_support_sublinear_and_bounded(body, rng):
    d = body.dim
    u, v = random_units(rng, 500, d), random_units(rng, 500, d)
    s = u + v
    norm = np.linalg.norm(s, axis=1)
    lhs = body.support(s / norm[:, None]) * norm
    assert np.all(lhs <= body.support(u) + body.support(v) + 1e-9)
    w = random_units(rng, 20000, d)
    hw = body.support(w)
    assert np.all(hw <= body.circumradius + 1e-12)
    if d == 2:
        assert hw.max() >= body.circumradius - 1e-6


@pytest.mark.parametrize("body", [Ball(1.0, 2), Cube(1.0, 2), Ellipsoid([2, 1]), Simplex(3), Ellipsoid([1, 0.8, 0.6])])
def test_points_of_body_satisfy_support(body, rng):
    d = body.dim
    R = body.circumradius
    x = rng.uniform(-R, R, (4000, d))
    x = x[body.contains(x)]
    assert len(x) > 100
    u = random_units(rng, 1000, d)
    assert np.all(x @ u.T <= body.support(u)[None, :] + 1e-9)


def test_ball_quadrature_weights():
    bq = boundary_quadrature(Ball(1.0, 2), 360)
    assert bq.surface_area == pytest.approx(2 * math.pi, abs=1e-6)
    assert np.allclose(bq.curvature, 1.0)
    assert np.allclose(np.linalg.norm(bq.normals, axis=1), 1.0)
    bq3 = boundary_quadrature(Ball(2.0, 3), 64)
    assert bq3.surface_area == pytest.approx(16 * math.pi, rel=1e-6)


def test_triangle_quadrature_is_flat():
    bq = boundary_quadrature(Simplex(2), 60)
    assert np.all(bq.curvature == 0)
    assert bq.surface_area == pytest.approx(3 * math.sqrt(3), rel=1e-12)


def test_ellipse_total_curvature():
    bq = boundary_quadrature(Ellipsoid([2.0, 1.0]), 512)
    assert np.dot(bq.weights, bq.curvature) == pytest.approx(2 * math.pi, abs=1e-6)
    # perimeter against an independent 1-D integral
    per, _ = quad(lambda t: math.hypot(2 * math.sin(t), math.cos(t)), 0, 2 * math.pi, epsabs=1e-13)
    assert bq.surface_area == pytest.approx(per, rel=1e-9)
    # nodes lie on the ellipse with unit outer normals
    p = bq.points
    assert np.allclose((p[:, 0] / 2) ** 2 + p[:, 1] ** 2, 1.0)


def test_ellipsoid_surface_converges():
    E = Ellipsoid([1.5, 1.0, 0.5])
    a = boundary_quadrature(E, 64).surface_area
    b = boundary_quadrature(E, 128).surface_area
    assert abs(a - b) / b < 1e-6


def test_quadrature_requires_resolution():
    with pytest.raises(ValueError):
        boundary_quadrature(Ball(1, 2), 4)
    with pytest.raises(UnsupportedVariant):
        boundary_quadrature(Ball(1, 4), 64)


def test_ellipse_distance_matches_sampling(rng):
    E = Ellipsoid([2.0, 1.0])
    x = rng.uniform(-4, 4, (50, 2))
    t = np.linspace(0, 2 * np.pi, 200001)
    curve = np.column_stack([2 * np.cos(t), np.sin(t)])
    for xi, d in zip(x, E.distance(x)):
        brute = 0.0 if E.contains(xi[None])[0] else np.min(np.linalg.norm(curve - xi, axis=1))
        assert d == pytest.approx(brute, abs=1e-6)


def test_polytope_distance(rng):
    cube = Cube(1.0, 3)
    generic = Polytope(cube.vertices * 1.0)
    x = rng.uniform(-3, 3, (300, 3))
    assert np.allclose(cube.distance(x), generic.distance(x), atol=1e-12)


def test_parse_body_grammar():
    assert isinstance(parse_body("ball:2", 3), Ball)
    assert parse_body("cube:0.5", 2).circumradius == pytest.approx(math.sqrt(0.5))
    assert parse_body("ellipse:2,1").dim == 2
    assert parse_body("ellipsoid:2,1,1").dim == 3
    assert parse_body("simplex:3,2").circumradius == pytest.approx(2.0)
    assert parse_body("polygon:1,0;0,1;-1,0;0,-1").n_facets == 4
    for bad in ("ball:1,2", "torus:1", "simplex:2.5", "polygon:1,0;0", "ball:1e6", "ball:1e-5"):
        with pytest.raises(BodyError):
            parse_body(bad, 2)
    with pytest.raises(BodyError):
        parse_body("ellipse:2,1", 3)


def test_degenerate_polytope_rejected():
    with pytest.raises(BodyError):
        Polytope([[0, 0], [1, 1], [2, 2]])


def test_simplex_facets():
    for d in (2, 3, 4, 5):
        S = Simplex(d, 1.0)
        assert S.n_facets == d + 1
        assert np.allclose(np.linalg.norm(S.vertices, axis=1), 1.0)
        assert np.allclose(S.vertices.mean(axis=0), 0, atol=1e-12)
        # inradius of the regular simplex with unit circumradius is 1/d
        assert np.allclose(S.facet_offsets, 1.0 / d)
