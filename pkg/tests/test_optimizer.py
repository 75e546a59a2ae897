import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import full_grid
from covplan.energy import PowerModel
from covplan.geometry import Grid, GridSpec
from covplan.objective import ObjectiveConfig, build_paths, evaluate_candidate
from covplan.optimizer import (
    PruneLedger, TpeState, inner_optimize, outer_optimize, pruned_max, tpe_suggest,
)
from covplan.partition import NonTerminating
from covplan.stc import CoveragePath
from covplan.trajectory import SpeedProfile

PROFILE = SpeedProfile(5.0, 3.0, 2.0)
POWER = PowerModel()


def test_startup_is_uniform_draw():
    state = TpeState(rng_seed=4)
    x = tpe_suggest(state, [5, 7])
    ref = np.random.default_rng(4)
    assert x == (int(ref.integers(5)), int(ref.integers(7)))


def test_good_set_size():
    state = TpeState(gamma=0.25)
    for i in range(8):
        state.observe((i,), float(i))
    good, bad = state.split()
    assert len(good) == 2 == max(1, math.ceil(0.25 * 8))
    assert [g[1] for g in good] == [0.0, 1.0]


def test_singleton_domain():
    state = TpeState(n_startup=2)
    for _ in range(12):
        x = tpe_suggest(state, [1, 1])
        assert x == (0, 0)
        state.observe(x, 1.0)


def test_tpe_prefers_good_region():
    state = TpeState(rng_seed=0, n_startup=10)
    picks = []
    for _ in range(80):
        x = tpe_suggest(state, [20])
        state.observe(x, abs(x[0] - 3))
        picks.append(x[0])
    late = picks[40:]
    assert np.mean([abs(p - 3) for p in late]) < 3.0


def test_tpe_respects_accept():
    state = TpeState(rng_seed=1, n_startup=3)
    for i in range(30):
        x = tpe_suggest(state, [4, 4], accept=lambda x: x[0] != x[1])
        assert x[0] != x[1]
        state.observe(x, float(i % 5))


def test_tpe_gamma_validation():
    with pytest.raises(ValueError):
        TpeState(gamma=1.0)


def test_ledger_median_and_prune():
    ledger = PruneLedger()
    assert ledger.median == math.inf
    ledger.extend([50, 60, 70])
    assert ledger.median == 60
    assert pruned_max([65.0], ledger) is None
    assert ledger.count == 4  # the offending value is recorded too


def test_empty_ledger_never_prunes_first_value():
    ledger = PruneLedger()
    assert pruned_max([42.0], ledger) == 42.0


@settings(max_examples=50)
@given(vals=st.lists(st.floats(0, 1e3), min_size=1, max_size=200))
def test_ledger_median_matches_numpy(vals):
    ledger = PruneLedger()
    ledger.extend(vals)
    assert ledger.median == pytest.approx(float(np.median(vals)))


@settings(max_examples=50)
@given(history=st.lists(st.floats(0, 1e3), min_size=1, max_size=50),
       frac=st.lists(st.floats(0, 1), min_size=1, max_size=30))
def test_prune_soundness(history, frac):
    """A nonincreasing series below all history never exceeds the running median."""
    ledger = PruneLedger()
    ledger.extend(history)
    floor = min(history)
    series = sorted((floor * f for f in frac), reverse=True)
    assert pruned_max(series, ledger) == max(series)


def test_inner_single_waypoint_paths():
    paths = [CoveragePath([(0, 0)]), CoveragePath([(30, 40)])]
    res = inner_optimize(paths, PROFILE, ObjectiveConfig(), PruneLedger(), 5)
    assert res.launch == (0, 0)
    assert res.r == 50.0


def test_inner_rejects_zero_budget():
    with pytest.raises(ValueError):
        inner_optimize([CoveragePath([(0, 0)])], PROFILE, ObjectiveConfig(), None, 0)


def test_inner_without_pruning_finds_incumbent():
    grid = full_grid(4, 4, side_w=5.0)
    paths = build_paths(grid, (0, 15), [0.5, 0.5])
    cfg = ObjectiveConfig()
    res = inner_optimize(paths, PROFILE, cfg, None, 15, rng_seed=3)
    ev = evaluate_candidate(grid, (0, 15), [0.5, 0.5], res.launch, PROFILE, POWER, cfg)
    assert ev.r == res.r
    assert res.pruned == 0


def test_degenerate_budget_matches_single_candidate():
    grid = full_grid(4, 4, side_w=5.0)
    cfg = ObjectiveConfig(lam=0.5)
    for seed in range(6):
        try:
            res = outer_optimize(grid, [0.5, 0.5], PROFILE, POWER, cfg, 1, 1, rng_seed=seed)
        except NonTerminating:
            continue
        ev = evaluate_candidate(grid, res.seeds, [0.5, 0.5], res.launch, PROFILE, POWER, cfg)
        assert (ev.r, ev.e, ev.f_o) == (res.r, res.e, res.f_o)
        assert len(res.trials) == 1
        return
    pytest.fail("no terminating seed among six draws")


def test_single_uav_is_energy_only():
    grid = full_grid(3, 3, side_w=5.0)
    res = outer_optimize(grid, [1.0], PROFILE, POWER, ObjectiveConfig(lam=1.0), 5, 3)
    assert res.r == 0.0
    assert res.f_o == res.e
    assert np.all(res.profile.r == 0)


def test_outer_invariants(square_grid):
    cfg = ObjectiveConfig(lam=1.0)
    res = outer_optimize(square_grid, [0.5, 0.5], PROFILE, POWER, cfg, 25, 8, rng_seed=11)
    best = [row["best_f_o"] for row in res.trials]
    assert all(b2 <= b1 for b1, b2 in zip(best, best[1:]))
    assert len(res.trials) == 25
    assert res.inner_evaluations <= 25 * 8
    assert res.f_o == min(row["f_o"] for row in res.trials)
    assert {row["status"] for row in res.trials} <= {"ok", "pruned-out", "nonterminating"}
    again = outer_optimize(square_grid, [0.5, 0.5], PROFILE, POWER, cfg, 25, 8, rng_seed=11)
    assert (again.seeds, again.launch, again.f_o) == (res.seeds, res.launch, res.f_o)
    assert [r["f_o"] for r in again.trials] == [r["f_o"] for r in res.trials]


def test_outer_all_nonterminating():
    spec = GridSpec((0, 0), 0.0, (0, 0), 2.0)
    grid = Grid(spec, [(0, 0), (5, 0), (10, 0), (15, 0)])  # isolated cells, 2 per UAV
    with pytest.raises(NonTerminating, match="no feasible partition"):
        outer_optimize(grid, [0.5, 0.5], PROFILE, POWER, ObjectiveConfig(), 3, 2)


def test_outer_budget_validation(square_grid):
    with pytest.raises(ValueError):
        outer_optimize(square_grid, [1.0], PROFILE, POWER, ObjectiveConfig(), 0, 1)
