"""Time parameterisation of coverage loops into a sampled multi-UAV trajectory."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

FORWARD, TURN, HOVER = 0, 1, 2
STATE_NAMES = ("forward", "turn", "hover")


@dataclass(frozen=True)
class SpeedProfile:
    v_f: float = 5.0
    v_t: float = 3.0
    corner_radius_c: float = 2.0

    def __post_init__(self):
        if not (self.v_f >= self.v_t > 0):
            raise ValueError("speeds must satisfy v_f >= v_t > 0")
        if self.corner_radius_c < 0:
            raise ValueError("corner radius must be non-negative")


@dataclass(frozen=True)
class LoopTimeline:
    """Piecewise-linear motion of one UAV along its loop.

    ``knot_t``/``knot_xy`` hold piece boundaries (first and last knot sit at
    the launch point); ``piece_state`` labels each piece FORWARD or TURN.
    ``heading`` gives the direction of travel of each piece in radians.
    """

    knot_t: np.ndarray
    knot_s: np.ndarray
    knot_xy: np.ndarray
    piece_state: np.ndarray
    heading: np.ndarray
    corner_s: np.ndarray = field(default_factory=lambda: np.zeros(0))
    corner_turn: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def duration(self) -> float:
        return float(self.knot_t[-1])

    def durations(self):
        dt = np.diff(self.knot_t)
        return (float(dt[self.piece_state == FORWARD].sum()),
                float(dt[self.piece_state == TURN].sum()))

    def position(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.stack([np.interp(t, self.knot_t, self.knot_xy[:, 0]),
                         np.interp(t, self.knot_t, self.knot_xy[:, 1])], axis=-1)

    def arclength(self, t) -> np.ndarray:
        return np.interp(np.asarray(t, dtype=float), self.knot_t, self.knot_s)

    def state(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if len(self.piece_state) == 0:
            return np.full(t.shape, HOVER, dtype=np.int8)
        idx = np.clip(np.searchsorted(self.knot_t, t, side="right") - 1, 0, len(self.piece_state) - 1)
        out = self.piece_state[idx].astype(np.int8)
        out[t >= self.duration] = HOVER
        return out


def build_timeline(waypoints, profile: SpeedProfile) -> LoopTimeline:
    """Split the closed polyline into forward and slow corner pieces.

    Each heading-change vertex gets a slow zone of ``corner_radius_c`` on both
    adjoining legs, clipped to half the leg length.
    """
    wp = np.asarray(waypoints, dtype=float).reshape(-1, 2)
    n = len(wp)
    if n == 0:
        raise ValueError("empty path")
    if n == 1:
        z = np.zeros(1)
        return LoopTimeline(z, z, wp.copy(), np.zeros(0, dtype=np.int8), np.zeros(0))

    a, b = wp, np.roll(wp, -1, axis=0)
    d = b - a
    length = np.hypot(d[:, 0], d[:, 1])
    d_in = np.roll(d, 1, axis=0)
    cross = d_in[:, 0] * d[:, 1] - d_in[:, 1] * d[:, 0]
    dot = (d_in * d).sum(axis=1)
    scale = np.roll(length, 1) * length
    corner = (np.abs(cross) > 1e-9 * scale) | (dot < 0)
    head = np.arctan2(d[:, 1], d[:, 0])

    c = profile.corner_radius_c
    c_start = np.where(corner, np.minimum(c, length / 2), 0.0)
    c_end = np.where(np.roll(corner, -1), np.minimum(c, length / 2), 0.0)

    # every leg -> [slow start, forward middle, slow end]; zero-length parts dropped
    part_len = np.column_stack([c_start, length - c_start - c_end, c_end])
    part_state = np.tile(np.array([TURN, FORWARD, TURN], dtype=np.int8), (n, 1))
    frac0 = np.column_stack([np.zeros(n), c_start / np.where(length > 0, length, 1),
                             (length - c_end) / np.where(length > 0, length, 1)])
    keep = part_len > 0
    part_len, part_state = part_len[keep], part_state[keep]
    starts = (a[:, None, :] + frac0[:, :, None] * d[:, None, :])[keep]
    heading = np.repeat(head[:, None], 3, axis=1)[keep]

    speed = np.where(part_state == TURN, profile.v_t, profile.v_f)
    knot_t = np.concatenate([[0.0], np.cumsum(part_len / speed)])
    knot_s = np.concatenate([[0.0], np.cumsum(part_len)])
    knot_xy = np.vstack([starts, wp[:1]])

    corner_s = np.concatenate([[0.0], np.cumsum(length)])[:-1][corner]
    turn = np.mod(head - np.roll(head, 1) + math.pi, 2 * math.pi) - math.pi
    return LoopTimeline(knot_t, knot_s, knot_xy, part_state, heading, corner_s, turn[corner])


@dataclass(frozen=True)
class MultiTrajectory:
    """Time-sampled positions and flight states for a fleet.

    ``positions`` has shape (N, K, 2) and ``states`` (N, K).  ``durations``
    holds the analytic (hover, forward, turn) seconds of each UAV over the
    common horizon.  ``position_fn`` evaluates exact positions at arbitrary
    times, returning shape (..., N, 2).
    """

    dt: float
    horizon_T: float
    times: np.ndarray
    positions: np.ndarray
    states: np.ndarray
    durations: np.ndarray
    position_fn: Callable = field(repr=False, compare=False)
    speed_bound: float = 0.0

    @property
    def n_uavs(self) -> int:
        return self.positions.shape[0]

    def positions_at(self, t) -> np.ndarray:
        return self.position_fn(t)

    def loop_time(self, uav: int) -> float:
        return float(self.durations[uav, 1] + self.durations[uav, 2])


def sample_times(T: float, dt: float) -> np.ndarray:
    k = int(math.ceil(T / dt - 1e-9)) if T > 0 else 0
    return np.minimum(np.arange(k + 1) * dt, T)


def sample_trajectory(paths, launch, profile: SpeedProfile, dt: float) -> MultiTrajectory:
    """Fly every loop once from its launch waypoint, then hover until all finish."""
    from .stc import rotate_start

    if len(paths) != len(launch):
        raise ValueError("need one launch index per path")
    if not dt > 0:
        raise ValueError("dt must be positive")
    lines = []
    for p, k in zip(paths, launch):
        if len(p) == 0:
            raise ValueError("empty path")
        lines.append(build_timeline(rotate_start(p, int(k)).waypoints, profile))
    return trajectory_from_timelines(lines, dt, profile.v_f)


def trajectory_from_timelines(lines, dt: float, speed_bound: float) -> MultiTrajectory:
    T = max(line.duration for line in lines)
    times = sample_times(T, dt)

    def position_fn(t):
        return np.stack([line.position(t) for line in lines], axis=-2)

    positions = np.stack([line.position(times) for line in lines])
    states = np.stack([line.state(times) for line in lines])
    durations = []
    for line in lines:
        t_f, t_t = line.durations()
        durations.append((T - (t_f + t_t), t_f, t_t))
    return MultiTrajectory(dt, T, times, positions, states, np.asarray(durations),
                           position_fn, speed_bound)


def state_durations(traj: MultiTrajectory, uav: int):
    """Analytic (T_h, T_f, T_t) seconds for one UAV."""
    if not 0 <= uav < traj.n_uavs:
        raise IndexError(f"no UAV {uav}")
    return tuple(float(v) for v in traj.durations[uav])


def write_trajectory_csv(traj: MultiTrajectory, path) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["t", "uav", "x", "y", "state"])
        for k, t in enumerate(traj.times):
            for i in range(traj.n_uavs):
                x, y = traj.positions[i, k]
                out.writerow([repr(float(t)), i, repr(float(x)), repr(float(y)),
                              STATE_NAMES[traj.states[i, k]]])
