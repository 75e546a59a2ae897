"""Scalar objective f_o = r + lambda * e for one (seeds, launch) candidate."""
from __future__ import annotations

from dataclasses import dataclass

from .connectivity import radius_max_lipschitz, radius_profile_grid
from .energy import PowerModel, mission_energy, to_wh
from .partition import darp_partition
from .stc import stc_loop
from .trajectory import SpeedProfile, sample_trajectory


@dataclass(frozen=True)
class ObjectiveConfig:
    """``lam`` weighs energy in Wh against radius in metres."""

    lam: float = 1.0
    dt: float = 1.0
    eps: float = 0.05
    solver: str = "grid"

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lambda must be non-negative")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if self.solver not in ("grid", "lipschitz"):
            raise ValueError(f"unknown solver {self.solver!r}")


@dataclass(frozen=True)
class CandidateEvaluation:
    seeds: tuple
    launch: tuple
    r: float
    e: float
    f_o: float
    horizon_T: float


def objective(r: float, e_wh: float, lam: float) -> float:
    return r + lam * e_wh


def build_paths(grid, seeds, w):
    part = darp_partition(grid, seeds, w)
    return [stc_loop(region, grid, i) for i, region in enumerate(part.regions)]


def fleet_radius(traj, cfg: ObjectiveConfig, v: float) -> float:
    if cfg.solver == "lipschitz":
        return float(radius_max_lipschitz(traj, v, cfg.eps)[0])
    return radius_profile_grid(traj).r_max


def score_paths(paths, launch, profile: SpeedProfile, power: PowerModel, cfg: ObjectiveConfig):
    """Radius, loop energy (Wh), f_o and the trajectory for fixed paths."""
    traj = sample_trajectory(paths, launch, profile, cfg.dt)
    r = fleet_radius(traj, cfg, profile.v_f)
    e = to_wh(mission_energy(traj, power, include_hover=False))
    return r, e, objective(r, e, cfg.lam), traj


def evaluate_candidate(grid, seeds, w, launch, profile: SpeedProfile, power: PowerModel,
                       cfg: ObjectiveConfig) -> CandidateEvaluation:
    """Partition, plan, time-sample and score one candidate.

    Raises :class:`~covplan.partition.NonTerminating` when the seeds do not
    yield a valid partition.
    """
    paths = build_paths(grid, seeds, w)
    r, e, f, traj = score_paths(paths, launch, profile, power, cfg)
    return CandidateEvaluation(tuple(int(s) for s in seeds), tuple(int(k) for k in launch),
                               r, e, f, traj.horizon_T)
