"""Nested search over DARP seeds (outer) and launch points (inner).

Both levels use a small categorical tree-structured Parzen estimator.  The
inner level minimises r alone and abandons a trial as soon as one sampled
r(t) exceeds the running median of every r(t) recorded so far.
"""
from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .connectivity import RadiusProfile, radius_profile_grid, radius_series
from .energy import PowerModel
from .objective import ObjectiveConfig, build_paths, score_paths
from .partition import NonTerminating
from .trajectory import SpeedProfile, sample_trajectory

log = logging.getLogger(__name__)


@dataclass
class TpeState:
    gamma: float = 0.25
    n_startup: int = 10
    n_candidates: int = 24
    rng_seed: int = 0
    observations: list = field(default_factory=list)

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")
        self.rng = np.random.default_rng(self.rng_seed)

    def observe(self, params, score: float) -> None:
        self.observations.append((tuple(int(p) for p in params), float(score)))

    def split(self):
        """Observations split into (good, bad) at the gamma quantile."""
        obs = sorted(self.observations, key=lambda o: o[1])
        n_good = max(1, math.ceil(self.gamma * len(obs)))
        return obs[:n_good], obs[n_good:]


def _uniform(rng, domain, accept, tries=1000):
    for _ in range(tries):
        x = tuple(int(rng.integers(d)) for d in domain)
        if accept is None or accept(x):
            return x
    raise RuntimeError("could not draw an acceptable point")


def tpe_suggest(state: TpeState, domain, accept=None) -> tuple:
    """Next point from a product of categorical dimensions of sizes ``domain``.

    ``accept`` optionally rejects points (e.g. repeated seed cells).
    """
    domain = [int(d) for d in domain]
    if any(d < 1 for d in domain):
        raise ValueError("every dimension needs at least one value")
    rng = state.rng
    if len(state.observations) < state.n_startup:
        return _uniform(rng, domain, accept)

    good, bad = state.split()
    logl, logg, probs = [], [], []
    for dim, size in enumerate(domain):
        cg = np.ones(size)
        cb = np.ones(size)
        for x, _ in good:
            cg[x[dim]] += 1
        for x, _ in bad:
            cb[x[dim]] += 1
        pl, pg = cg / cg.sum(), cb / cb.sum()
        probs.append(pl)
        logl.append(np.log(pl))
        logg.append(np.log(pg))

    best, best_score = None, -np.inf
    for _ in range(state.n_candidates):
        x = tuple(int(rng.choice(size, p=probs[dim])) for dim, size in enumerate(domain))
        if accept is not None and not accept(x):
            continue
        score = sum(logl[d][v] - logg[d][v] for d, v in enumerate(x))
        if score > best_score:
            best, best_score = x, score
    if best is None:
        best = _uniform(rng, domain, accept)
    return best


class PruneLedger:
    """Running median of every recorded r(t) value (two-heap)."""

    def __init__(self):
        self._lo = []  # max-heap via negation
        self._hi = []
        self.count = 0

    def insert(self, value: float) -> None:
        value = float(value)
        if self._lo and value > -self._lo[0]:
            heapq.heappush(self._hi, value)
        else:
            heapq.heappush(self._lo, -value)
        if len(self._lo) > len(self._hi) + 1:
            heapq.heappush(self._hi, -heapq.heappop(self._lo))
        elif len(self._hi) > len(self._lo):
            heapq.heappush(self._lo, -heapq.heappop(self._hi))
        self.count += 1

    def extend(self, values) -> None:
        for v in values:
            self.insert(v)

    @property
    def median(self) -> float:
        if not self.count:
            return math.inf
        if len(self._lo) > len(self._hi):
            return -self._lo[0]
        return 0.5 * (-self._lo[0] + self._hi[0])

    def reset(self) -> None:
        self.__init__()


def pruned_max(series, ledger: PruneLedger | None):
    """Max of ``series`` recording each value; None if a value beats the median."""
    if ledger is None:
        return float(np.max(series))
    best = -math.inf
    for v in np.asarray(series).tolist():
        over = v > ledger.median
        ledger.insert(v)
        if over:
            return None
        best = max(best, v)
    return best


@dataclass
class InnerResult:
    launch: tuple
    r: float
    trials: int
    pruned: int


def inner_optimize(paths, profile: SpeedProfile, cfg: ObjectiveConfig, ledger: PruneLedger | None,
                   n_launch: int, rng_seed: int = 0, tpe: dict | None = None,
                   protect_first: bool = True) -> InnerResult:
    """Launch indices minimising the grid-searched radius for fixed paths.

    With ``ledger=None`` pruning is off.  When ``protect_first`` is set the
    first trial is always evaluated to completion (its values still enter the
    ledger) so every seed vector gets a finite incumbent.
    """
    if n_launch < 1:
        raise ValueError("n_launch must be >= 1")
    state = TpeState(rng_seed=rng_seed, **(tpe or {}))
    domain = [len(p) for p in paths]
    best_k, best_r, pruned = None, math.inf, 0
    for j in range(n_launch):
        k = tpe_suggest(state, domain)
        traj = sample_trajectory(paths, k, profile, cfg.dt)
        series = radius_series(traj)
        if ledger is not None and j == 0 and protect_first:
            ledger.extend(series.tolist())
            r = float(series.max())
        else:
            r = pruned_max(series, ledger)
        if r is None:
            pruned += 1
            state.observe(k, math.inf)
            continue
        state.observe(k, r)
        if r < best_r:
            best_k, best_r = k, r
    return InnerResult(best_k, best_r, n_launch, pruned)


@dataclass
class PlanResult:
    seeds: tuple
    launch: tuple
    paths: list
    r: float
    e: float
    f_o: float
    horizon_T: float
    profile: RadiusProfile
    trajectory: object
    trials: list
    grid: object = None
    inner_evaluations: int = 0


def outer_optimize(grid, w, profile: SpeedProfile, power: PowerModel, cfg: ObjectiveConfig,
                   n_darp: int, n_launch: int, rng_seed: int = 0, tpe: dict | None = None,
                   prune: bool = True, reset_ledger: bool = False,
                   protect_first: bool = True) -> PlanResult:
    """Search seeds and launch points for the smallest f_o.

    Each outer trial proposes a seed vector, partitions and plans it, runs
    the inner launch search and scores f_o at the inner incumbent.  Failed
    partitions and seed vectors whose inner trials were all pruned score +inf.
    """
    if n_darp < 1 or n_launch < 1:
        raise ValueError("trial budgets must be >= 1")
    n = len(w)
    if n > len(grid):
        raise ValueError("more UAVs than grid cells")
    outer = TpeState(rng_seed=rng_seed, **(tpe or {}))
    ledger = PruneLedger() if prune else None
    domain = [len(grid)] * n
    distinct = (lambda x: len(set(x)) == len(x))
    grid_cfg = ObjectiveConfig(cfg.lam, cfg.dt, cfg.eps, "grid")

    trials = []
    best = None  # (f_o, seeds, launch, paths)
    inner_evals = 0
    for ell in range(n_darp):
        seeds = tpe_suggest(outer, domain, distinct)
        row = {"trial": ell, "f_o": math.inf, "r": math.inf, "e": math.inf}
        try:
            paths = build_paths(grid, seeds, w)
        except NonTerminating:
            outer.observe(seeds, math.inf)
            row["status"] = "nonterminating"
        else:
            if ledger is not None and reset_ledger:
                ledger.reset()
            sub_seed = int(np.random.SeedSequence([rng_seed, ell]).generate_state(1)[0])
            res = inner_optimize(paths, profile, grid_cfg, ledger, n_launch, sub_seed, tpe,
                                 protect_first)
            inner_evals += res.trials
            if res.launch is None:
                outer.observe(seeds, math.inf)
                row["status"] = "pruned-out"
            else:
                r, e, f, _ = score_paths(paths, res.launch, profile, power, grid_cfg)
                outer.observe(seeds, f)
                row.update(f_o=f, r=r, e=e, status="ok", seeds=list(seeds),
                           launch=list(res.launch))
                if best is None or f < best[0]:
                    best = (f, seeds, res.launch, paths)
        row["best_f_o"] = best[0] if best else math.inf
        trials.append(row)
        log.debug("trial %d %s f_o=%.4f", ell, row["status"], row["f_o"])

    if best is None:
        raise NonTerminating("no feasible partition found")
    _, seeds, launch, paths = best
    return plan_candidate(grid, w, seeds, launch, profile, power, cfg, trials, inner_evals, paths)


def plan_candidate(grid, w, seeds, launch, profile: SpeedProfile, power: PowerModel,
                   cfg: ObjectiveConfig, trials=(), inner_evaluations: int = 0,
                   paths=None) -> PlanResult:
    """Full evaluation of one (seeds, launch) pair with the configured solver."""
    if paths is None:
        paths = build_paths(grid, seeds, w)
    r, e, f, traj = score_paths(paths, launch, profile, power, cfg)
    return PlanResult(tuple(int(s) for s in seeds), tuple(int(k) for k in launch), paths,
                      r, e, f, traj.horizon_T, radius_profile_grid(traj), traj, list(trials),
                      grid, inner_evaluations)
