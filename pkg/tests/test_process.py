import math

import numpy as np
import pytest
from scipy import stats

from kcell.cell import cell_from_halfspaces
from kcell.directional import Atomic, Cosine2, Isotropic
from kcell.geometry import Ball, Cube, Simplex
from kcell.harness import simulate
from kcell.process import (ArrivalStream, ConfigError, HyperplaneBatch, ProcessConfig, rng_stream, sample_annulus,
                           sample_window)


def test_window_count_is_poisson():
    cfg = ProcessConfig(100, Ball(1, 2), Isotropic(2))
    rng = rng_stream(11, 0, 0)
    counts = np.array([len(sample_window(cfg, 3.0, rng)) for _ in range(10_000)])
    assert abs(counts.mean() - 400) < 3 * math.sqrt(400 / len(counts))
    assert 0.95 <= counts.var(ddof=1) / counts.mean() <= 1.05


def test_window_count_uses_phi():
    cfg = ProcessConfig(30, Cube(1, 2), Isotropic(2))
    rng = rng_stream(12, 0, 0)
    counts = np.array([len(sample_window(cfg, 2.0, rng)) for _ in range(5000)])
    mean = 2 * 30 * (2.0 - 4 / math.pi)
    assert abs(counts.mean() - mean) < 3 * math.sqrt(mean / len(counts))


def test_config_validation():
    with pytest.raises(ConfigError):
        ProcessConfig(0, Ball(1, 2), Isotropic(2))
    with pytest.raises(ConfigError):
        ProcessConfig(10, Ball(1, 2), Isotropic(3))
    with pytest.raises(ConfigError):
        ProcessConfig(10, Ball(1, 2), Isotropic(2), growth_factor=1.0)
    with pytest.raises(ConfigError):
        ProcessConfig(10, Ball(1, 2), Isotropic(2), initial_window=0.5)
    with pytest.raises(ConfigError):
        ProcessConfig(10, Ball(1, 4), Isotropic(4), sampler="shell")
    cfg = ProcessConfig(10, Cube(1, 2), Isotropic(2))
    assert cfg.window0 == pytest.approx(2 * math.sqrt(2) + 1)


def test_atomic_offsets_in_range():
    A = Atomic([[1, 0], [0, 1]])
    cfg = ProcessConfig(50, Cube(1, 2), A)
    rng = rng_stream(13, 0, 0)
    for _ in range(200):
        b = sample_window(cfg, 3.0, rng)
        assert np.all(b.offsets > 1.0) and np.all(b.offsets <= 3.0)


@pytest.mark.parametrize("body,dist", [(Simplex(2), Isotropic(2)), (Ball(1, 3), Cosine2(3, 2)),
                                       (Cube(1, 2), Atomic([[1, 0], [0, 1], [1, 1]]))])
def test_hyperplanes_miss_body_and_hit_window(body, dist):
    cfg = ProcessConfig(40, body, dist)
    rng = rng_stream(14, 0, 0)
    R = cfg.window0
    for _ in range(50):
        b = sample_window(cfg, R, rng)
        assert np.all(b.offsets > body.support(b.normals))
        assert np.all(b.offsets <= R) and np.all(b.offsets > 0)
        assert np.allclose(np.linalg.norm(b.normals, axis=1), 1.0)


def test_annulus_counts_and_range():
    cfg = ProcessConfig(50, Ball(1, 2), Isotropic(2))
    rng = rng_stream(15, 0, 0)
    batches = [sample_annulus(cfg, 2.0, 5.0, rng) for _ in range(10_000)]
    counts = np.array([len(b) for b in batches])
    assert abs(counts.mean() - 300) < 3 * math.sqrt(300 / len(counts))
    assert all(np.all((b.offsets > 2.0) & (b.offsets <= 5.0)) for b in batches)
    with pytest.raises(ValueError):
        sample_annulus(cfg, 0.5, 2.0, rng)


def test_window_equals_window_plus_annulus():
    cfg = ProcessConfig(20, Ball(1, 2), Isotropic(2))
    r1, r2 = rng_stream(16, 0, 0), rng_stream(16, 0, 1)
    c_direct, c_union, f_direct, f_union = [], [], [], []
    for _ in range(10_000):
        a = sample_window(cfg, 4.0, r1)
        b = sample_window(cfg, 2.0, r2).union(sample_annulus(cfg, 2.0, 4.0, r2))
        c_direct.append(len(a))
        c_union.append(len(b))
        f_direct.append(cell_from_halfspaces(a.normals, a.offsets).n_facets)
        f_union.append(cell_from_halfspaces(b.normals, b.offsets).n_facets)
    assert stats.ks_2samp(c_direct, c_union).pvalue > 0.001
    assert stats.ks_2samp(f_direct, f_union).pvalue > 0.001


def test_batch_union_bounds():
    a = HyperplaneBatch(np.eye(2), np.ones(2), 0.0, 2.0)
    b = HyperplaneBatch(-np.eye(2), np.ones(2) * 3, 2.0, 4.0)
    u = a.union(b)
    assert len(u) == 4 and u.r_in == 0.0 and u.r_out == 4.0


def test_rng_streams():
    a = rng_stream(7, 0, 0).random(100)
    assert np.array_equal(a, rng_stream(7, 0, 0).random(100))
    assert not np.array_equal(a, rng_stream(7, 0, 1).random(100))
    assert not np.array_equal(a, rng_stream(7, 1, 0).random(100))
    assert not np.array_equal(a, rng_stream(8, 0, 0).random(100))


def test_worker_count_does_not_change_results():
    one = simulate(Ball(1, 2), Isotropic(2), 50, 120, seed=3, workers=1)
    two = simulate(Ball(1, 2), Isotropic(2), 50, 120, seed=3, workers=2)
    assert np.array_equal(one.f, two.f) and np.array_equal(one.dW, two.dW)


def test_arrival_stream_prefix_consistency():
    s1 = ArrivalStream(10.0, Isotropic(2), rng_stream(1, 0, 0))
    s2 = ArrivalStream(10.0, Isotropic(2), rng_stream(1, 0, 0))
    lev_small, dir_small = s1.upto(5.0)
    s2.upto(200.0)
    lev_big, dir_big = s2.upto(5.0)
    assert np.array_equal(lev_small, lev_big) and np.array_equal(dir_small, dir_big)
    lev, _ = s1.upto(300.0)
    assert np.all(np.diff(lev) > 0)
    assert abs(len(lev) - 3000) < 4 * math.sqrt(3000)
