import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from covplan.connectivity import (
    piyavskii_max, radius_at, radius_max_lipschitz, radius_profile_grid,
)
from covplan.stc import CoveragePath
from covplan.trajectory import MultiTrajectory, SpeedProfile, sample_trajectory
from oracles import brute_force_bottleneck, threshold_connected
from test_trajectory import random_mission


def test_singleton():
    assert radius_at([(3, 4)]) == 0.0


def test_collinear():
    pts = [(0, 0), (10, 0), (30, 0)]
    assert brute_force_bottleneck(pts) == 20.0
    assert radius_at(pts) == 20.0


def test_square():
    pts = [(0, 0), (5, 0), (0, 5), (5, 5)]
    assert brute_force_bottleneck(pts) == 5.0
    assert radius_at(pts) == 5.0


def test_coincident_points():
    pts = [(0, 0), (0, 0), (3, 4), (3, 4)] * 5
    assert radius_at(pts, "dense") == 5.0
    assert radius_at(pts, "delaunay") == 5.0


coords = st.floats(-1e3, 1e3, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(pts=st.lists(st.tuples(coords, coords), min_size=2, max_size=7))
def test_threshold_characterisation(pts):
    r = radius_at(pts)
    assert r == pytest.approx(brute_force_bottleneck(pts), abs=1e-9)
    assert threshold_connected(pts, r * (1 + 1e-12))
    if r > 1e-6:
        assert not threshold_connected(pts, r - 1e-9 * max(1.0, r))


@settings(max_examples=40, deadline=None)
@given(pts=st.lists(st.tuples(coords, coords), min_size=2, max_size=7),
       s=st.floats(0.01, 100))
def test_scale_equivariance(pts, s):
    assert radius_at(np.asarray(pts) * s) == pytest.approx(s * radius_at(pts), rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("n", [5, 17, 60, 300])
def test_delaunay_matches_dense(n):
    rng = np.random.default_rng(n)
    for _ in range(5):
        pts = rng.uniform(-500, 500, size=(n, 2))
        assert radius_at(pts, "delaunay") == pytest.approx(radius_at(pts, "dense"), abs=1e-9)


def test_unknown_method():
    with pytest.raises(ValueError):
        radius_at([(0, 0), (1, 1)], "kruskal")


def line_trajectory(T=10.0, dt=1.0, speed=1.0):
    """UAV 0 parked at the origin, UAV 1 moving along +x at ``speed``."""
    times = np.minimum(np.arange(int(math.ceil(T / dt)) + 1) * dt, T)

    def fn(t):
        t = np.asarray(t, dtype=float)
        a = np.zeros(t.shape + (2,))
        b = np.stack([speed * t, np.zeros(t.shape)], axis=-1)
        return np.stack([a, b], axis=-2)

    pos = np.swapaxes(fn(times), 0, 1)
    return MultiTrajectory(dt, T, times, pos, np.zeros(pos.shape[:2], dtype=np.int8),
                           np.zeros((2, 3)), fn, speed)


def test_grid_profile_monotone_separation():
    prof = radius_profile_grid(line_trajectory())
    assert prof.r_max == 10.0 and prof.argmax_t == 10.0
    assert np.allclose(prof.r, prof.t)


def test_grid_profile_static_fleet():
    a = CoveragePath([(0, 0)])
    b = CoveragePath([(30, 40)])
    sq = CoveragePath([(0, 0), (10, 0), (10, 10), (0, 10)])
    traj = sample_trajectory([a, b, CoveragePath([(60, 0)])], [0, 0, 0], SpeedProfile(), 1.0)
    prof = radius_profile_grid(traj)
    assert np.all(prof.r == radius_at([(0, 0), (30, 40), (60, 0)]))
    assert sq.length == 40


def test_grid_profile_against_brute_force():
    paths, launch, profile = random_mission(7)
    traj = sample_trajectory(paths, launch, profile, 1.0)
    prof = radius_profile_grid(traj)
    for k in range(len(prof.t)):
        assert prof.r[k] == pytest.approx(brute_force_bottleneck(traj.positions[:, k]), abs=1e-9)


def test_lipschitz_linear():
    r, t, n = radius_max_lipschitz(line_trajectory(), v=1.0, eps=0.01)
    assert 9.99 <= r <= 10.0
    assert t == pytest.approx(r)


def test_lipschitz_static():
    traj = sample_trajectory([CoveragePath([(0, 0)]), CoveragePath([(3, 4)])], [0, 0],
                             SpeedProfile(), 1.0)
    r, _, n = radius_max_lipschitz(traj, v=5.0, eps=0.01)
    assert r == 5.0 and n <= 2


def test_lipschitz_static_long_horizon():
    still = CoveragePath([(0, 0)])
    loop = CoveragePath([(100, 0), (110, 0), (110, 10), (100, 10)])
    traj = sample_trajectory([still, still, loop], [0, 0, 0], SpeedProfile(5, 5, 0), 1.0)
    r, _, n = radius_max_lipschitz(traj, 5.0, 0.01)
    assert r == pytest.approx(radius_profile_grid(traj).r_max, abs=0.01 + 1e-9)


def test_lipschitz_rejects_bad_eps():
    with pytest.raises(ValueError):
        radius_max_lipschitz(line_trajectory(), 1.0, 0.0)


def test_piyavskii_on_known_function():
    f = lambda x: math.sin(3 * x) + 0.5 * math.cos(7 * x)
    best, arg, n = piyavskii_max(f, 0.0, 5.0, 6.5, 1e-4)
    dense = max(f(x) for x in np.linspace(0, 5, 200001))
    assert best <= dense + 1e-9 and dense <= best + 1e-4


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 100_000))
def test_lipschitz_agrees_with_dense_grid(seed):
    paths, launch, profile = random_mission(seed)
    traj = sample_trajectory(paths, launch, profile, 0.01)
    dense = radius_profile_grid(traj).r_max
    r, _, _ = radius_max_lipschitz(traj, profile.v_f, 0.05)
    assert abs(r - dense) <= 0.05


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 100_000), dt=st.sampled_from([0.2, 1.0, 3.0]))
def test_empirical_lipschitz(seed, dt):
    paths, launch, profile = random_mission(seed)
    traj = sample_trajectory(paths, launch, profile, dt)
    r = radius_profile_grid(traj).r
    gaps = np.diff(traj.times)
    assert np.all(np.abs(np.diff(r)) <= 2 * profile.v_f * gaps + 1e-9)


def test_radius_csv(tmp_path):
    prof = radius_profile_grid(line_trajectory(T=3))
    prof.write_csv(tmp_path / "r.csv")
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0] == "t,r" and len(lines) == 5
