import math

import mpmath as mp
import pytest

from kcell.asymptotics import (F_ball_closed_form, F_functional, G_ball_closed_form, G_functional,
                               HypothesisViolation, c_d, gamma_self_check, theorem_targets)
from kcell.directional import Atomic, Cosine2, Isotropic
from kcell.geometry import Ball, Cube, Ellipsoid, Polytope, Simplex
from kcell.sphere import ball_volume, sphere_area


def _cd_mp(d):
    mp.mp.dps = 40
    d = mp.mpf(d)
    kappa = mp.pi ** ((d - 1) / 2) / mp.gamma((d + 1) / 2)
    pre = (d**2 + d + 2) * (d**2 + 1) / (2 * (d + 3) * mp.factorial(d + 1))
    return pre * mp.gamma((d**2 + 1) / (d + 1)) * ((d + 1) / kappa) ** (2 / (d + 1))


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_cd_against_high_precision(d):
    assert c_d(d) == pytest.approx(float(_cd_mp(d)), rel=1e-13)
    assert c_d(d) > 0


def test_cd_two_closed_form():
    assert c_d(2) == pytest.approx(8 * 5 / (2 * 5 * 6) * math.gamma(5 / 3) * 1.5 ** (2 / 3), rel=1e-15)


def test_gamma_and_sphere_constants():
    assert gamma_self_check() < 1e-12
    assert sphere_area(2) == pytest.approx(2 * math.pi) and sphere_area(3) == pytest.approx(4 * math.pi)
    assert ball_volume(1) == pytest.approx(2.0) and ball_volume(2) == pytest.approx(math.pi)


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("rho", [1.0, 0.6])
def test_ball_functionals_closed_form(d, rho):
    K = Ball(rho, d)
    assert F_functional(K, Isotropic(d)) == pytest.approx(F_ball_closed_form(rho, d), rel=1e-6)
    assert G_functional(K, Isotropic(d)) == pytest.approx(G_ball_closed_form(rho, d), rel=1e-6)
    F, G = F_functional(K, Isotropic(d)), G_functional(K, Isotropic(d))
    assert F / G == pytest.approx(2.0, rel=1e-9)


def test_scaling():
    D = Isotropic(2)
    for K, L in ((Ball(1, 2), Ball(2, 2)), (Ellipsoid([1.5, 1]), Ellipsoid([3, 2]))):
        assert F_functional(L, D) == pytest.approx(2 ** (1 / 3) * F_functional(K, D), rel=1e-9)
    D3 = Cosine2(3, 2)
    assert G_functional(Ball(2, 3), D3) == pytest.approx(2 ** 0.5 * G_functional(Ball(1, 3), D3), rel=1e-9)


def test_polytopes_vanish():
    for K in (Simplex(2), Cube(1, 3), Polytope([[1, 0], [0, 1], [-1, 0], [0, -1]])):
        D = Isotropic(K.dim)
        assert F_functional(K, D) == 0.0 and G_functional(K, D) == 0.0


def test_self_convergence():
    for K, D in ((Ball(1, 2), Isotropic(2)), (Ellipsoid([2, 1]), Cosine2(2, 4)), (Ellipsoid([1.5, 1, 0.7]), Isotropic(3))):
        base = 512 if K.dim == 2 else 64
        for fn in (F_functional, G_functional):
            a, b = fn(K, D, base), fn(K, D, 2 * base)
            assert abs(a - b) / b < 1e-6
    G1 = G_functional(Ball(1, 2), Isotropic(2), 400)
    G10 = G_functional(Ball(1, 2), Isotropic(2), 4000)
    assert abs(G1 - G10) / G10 < 1e-8


def test_theorem_targets_polytopes():
    t = theorem_targets(Simplex(2), Isotropic(2), 2, r=3)
    assert t.thm32 == pytest.approx(2 * math.log(2)) and t.thm43 == t.thm32
    t3 = theorem_targets(Simplex(3), Isotropic(3), 3, r=4)
    assert t3.thm32 == pytest.approx(12 * math.log(2) ** 2 / 16)
    assert theorem_targets(Simplex(2), Isotropic(2)).thm32 == pytest.approx(2 * math.log(2))
    assert t.F == 0.0


def test_theorem_targets_ball():
    t = theorem_targets(Ball(1, 2), Isotropic(2))
    assert t.thm32 is None and t.thm43 is None
    assert t.thm31 == pytest.approx(2 ** (-2 / 3) * F_ball_closed_form(1, 2), rel=1e-9)
    assert t.thm42 == pytest.approx(2 ** (1 / 3) * G_ball_closed_form(1, 2), rel=1e-9)
    assert t.thm31 > 0 and t.thm42 > 0


def test_hypothesis_violations():
    with pytest.raises(HypothesisViolation):
        theorem_targets(Simplex(2), Cosine2(2, 1), r=3)
    with pytest.raises(HypothesisViolation):
        theorem_targets(Cube(1, 3), Isotropic(3), r=6)
    with pytest.raises(HypothesisViolation):
        theorem_targets(Ball(1, 2), Isotropic(2), r=3)
    with pytest.raises(HypothesisViolation):
        theorem_targets(Simplex(2), Isotropic(2), r=4)
    with pytest.raises(HypothesisViolation):
        F_functional(Ball(1, 2), Atomic([[1, 0], [0, 1]]))
    t = theorem_targets(Ball(1, 2), Atomic([[1, 0], [0, 1]]))
    assert t.F is None and t.thm31 is None
