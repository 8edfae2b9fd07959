import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

from kcell.hull import DegenerateHull, Hull3D, hull_2d
from kcell.lp import LPError, Unbounded, maximize


def test_hull_2d_matches_scipy():
    rng = np.random.default_rng(31)
    for t in range(200):
        m = int(rng.integers(3, 2000))
        P = rng.standard_normal((m, 2))
        if t % 2:
            P /= np.linalg.norm(P, axis=1, keepdims=True)
            P *= rng.uniform(0.99, 1.0, (m, 1))
        idx = hull_2d(P)
        assert set(idx.tolist()) == set(ConvexHull(P).vertices.tolist())
        # counter-clockwise
        Q = P[idx]
        area = np.sum(Q[:, 0] * np.roll(Q[:, 1], -1) - np.roll(Q[:, 0], -1) * Q[:, 1])
        assert area > 0


def test_hull_2d_drops_collinear():
    P = np.array([[0, 0], [1, 0], [2, 0], [2, 2], [0, 2], [1, 1]], dtype=float)
    assert sorted(hull_2d(P).tolist()) == [0, 2, 3, 4]
    with pytest.raises(DegenerateHull):
        hull_2d(np.array([[0, 0], [1, 1], [2, 2.0]]))


def test_hull_3d_matches_scipy():
    rng = np.random.default_rng(32)
    for t in range(60):
        m = int(rng.integers(4, 600))
        P = rng.standard_normal((m, 3))
        if t % 2:
            P /= np.linalg.norm(P, axis=1, keepdims=True)
        h = Hull3D(P)
        ref = ConvexHull(P)
        assert set(h.vertices.tolist()) == set(ref.vertices.tolist())
        assert np.all(P @ h.normals.T <= h.offsets + 1e-9)
        E = h.edges()
        assert len(E) == 3 * len(h.faces) // 2
        assert len(h.vertices) - len(E) + len(h.faces) == 2


def test_hull_3d_degenerate():
    with pytest.raises(DegenerateHull):
        Hull3D(np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0.0]]))


def test_lp_matches_scipy():
    rng = np.random.default_rng(33)
    for _ in range(200):
        d = int(rng.integers(2, 6))
        m = int(rng.integers(d + 1, 30))
        A = rng.standard_normal((m, d))
        b = rng.uniform(0.1, 2.0, m)
        c = rng.standard_normal(d)
        ref = linprog(-c, A_ub=A, b_ub=b, bounds=[(None, None)] * d, method="highs")
        if ref.status == 3:
            with pytest.raises(Unbounded):
                maximize(c, A, b)
            continue
        res = maximize(c, A, b)
        assert res.value == pytest.approx(-ref.fun, abs=1e-8)
        assert np.all(A @ res.x <= b + 1e-9)


def test_lp_requires_feasible_origin():
    with pytest.raises(LPError):
        maximize([1.0, 0.0], np.eye(2), [-1.0, 1.0])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0.2, 3.0), min_size=4, max_size=4))
def test_lp_box(bounds):
    A = np.array([[1.0, 0], [-1, 0], [0, 1], [0, -1]])
    b = np.array(bounds)
    res = maximize([1.0, 1.0], A, b)
    assert res.value == pytest.approx(b[0] + b[2])
