"""Constant-regime energy estimate: power times time spent in each flight state."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

J_PER_WH = 3600.0


@dataclass(frozen=True)
class PowerModel:
    P_h: float = 492.0
    P_f: float = 488.0
    P_t: float = 509.0

    def __post_init__(self):
        if min(self.P_h, self.P_f, self.P_t) <= 0:
            raise ValueError("powers must be positive")

    def as_array(self) -> np.ndarray:
        return np.array([self.P_h, self.P_f, self.P_t])


def energy_from_durations(durations, model: PowerModel) -> float:
    """Joules for an (N, 3) array of (hover, forward, turn) seconds."""
    d = np.asarray(durations, dtype=float).reshape(-1, 3)
    return float(sum(model.P_h * h + model.P_f * f + model.P_t * t for h, f, t in d))


def mission_energy(traj, model: PowerModel, include_hover: bool = True) -> float:
    """Total fleet energy in joules.

    With ``include_hover=False`` the hover padding that follows each UAV's
    loop is left out, so only loop traversal is charged.
    """
    d = np.array(traj.durations, dtype=float)
    if not include_hover:
        d[:, 0] = 0.0
    return energy_from_durations(d, model)


def to_wh(joules: float) -> float:
    return joules / J_PER_WH
