"""Line-formation coverage: one STC reference loop, UAVs on fixed lateral offsets."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from shapely.geometry import Polygon

from .connectivity import radius_profile_grid
from .geometry import EmptyGridError, GridSpec, Roi, discretize
from .stc import CoveragePath, stc_loop
from .trajectory import MultiTrajectory, SpeedProfile, build_timeline, sample_times


@dataclass(frozen=True)
class FormationSpec:
    n: int
    w: float

    def __post_init__(self):
        if self.n < 1 or not self.w > 0:
            raise ValueError("formation needs n >= 1 and w > 0")

    @property
    def offsets(self) -> tuple:
        return tuple((2 * i - self.n - 1) * self.w / 2 for i in range(1, self.n + 1))


def _corner_zones(wp, c):
    d = np.roll(wp, -1, axis=0) - wp
    length = np.hypot(d[:, 0], d[:, 1])
    head = np.arctan2(d[:, 1], d[:, 0])
    turn = np.mod(head - np.roll(head, 1) + math.pi, 2 * math.pi) - math.pi
    corner = np.abs(turn) > 1e-9
    s_start = np.concatenate([[0.0], np.cumsum(length)])
    half = np.minimum(c, 0.5 * np.minimum(length, np.roll(length, 1)))
    return head, s_start, corner, turn, half


def heading_at(wp, c: float, s) -> np.ndarray:
    """Heading along the loop at arc length ``s``.

    Inside a corner zone of half-width h around a vertex the heading turns
    linearly in arc length from the incoming to the outgoing direction.
    """
    head, s_start, corner, turn, half = _corner_zones(wp, c)
    L = s_start[-1]
    shape = np.shape(s)
    s = np.mod(np.atleast_1d(np.asarray(s, dtype=float)), L)
    edge = np.clip(np.searchsorted(s_start, s, side="right") - 1, 0, len(head) - 1)
    h = head[edge].copy()
    for v in np.flatnonzero(corner & (half > 0)):
        delta = np.mod(s - s_start[v] + L / 2, L) - L / 2
        hv = half[v]
        inside = np.abs(delta) <= hv
        frac = (delta[inside] + hv) / (2 * hv)
        h[inside] += turn[v] * (frac - (delta[inside] >= 0))
    return h.reshape(shape)


def formation_trajectory(reference: CoveragePath, offsets, profile: SpeedProfile,
                         dt: float) -> MultiTrajectory:
    wp = reference.waypoints
    line = build_timeline(wp, profile)
    offsets = np.asarray(offsets, dtype=float)
    c = profile.corner_radius_c

    def position_fn(t):
        t = np.asarray(t, dtype=float)
        xc = line.position(t)
        if len(wp) < 2:
            h = np.zeros(t.shape)
        else:
            h = heading_at(wp, c, line.arclength(t))
        normal = np.stack([-np.sin(h), np.cos(h)], axis=-1)
        return xc[..., None, :] + offsets[:, None] * normal[..., None, :]

    T = line.duration
    times = sample_times(T, dt)
    positions = np.swapaxes(position_fn(times), 0, 1)
    states = np.tile(line.state(times), (len(offsets), 1))
    t_f, t_t = line.durations()
    durations = np.tile([T - (t_f + t_t), t_f, t_t], (len(offsets), 1))

    # outer UAVs speed up while the normal rotates inside corner zones
    bound = profile.v_f
    if len(wp) > 1 and len(offsets):
        _, _, corner, turn, half = _corner_zones(wp, c)
        dmax = float(np.abs(offsets).max())
        for v in np.flatnonzero(corner):
            with np.errstate(over="ignore", divide="ignore"):
                rate = abs(turn[v]) / (2 * half[v])
            if dmax > 0:
                bound = max(bound, profile.v_t * (1 + dmax * rate))
    return MultiTrajectory(dt, T, times, positions, states, durations, position_fn, bound)


def _is_regular(roi: Roi) -> bool:
    ring = Polygon(roi.outer)
    return abs(ring.convex_hull.area - ring.area) <= 1e-9 * ring.area


def reference_path(roi: Roi, spec: FormationSpec, tau: float = 1.0):
    if roi.nfzs:
        raise ValueError("formation mode does not support no-fly zones")
    if not _is_regular(roi):
        raise ValueError("formation mode needs a convex ROI")
    try:
        grid = discretize(roi, GridSpec.identity(roi, spec.n * spec.w, tau))
    except EmptyGridError as exc:
        raise EmptyGridError("combined formation footprint does not fit the ROI") from exc
    return stc_loop(range(len(grid)), grid), grid


def formation_paths(roi: Roi, spec: FormationSpec, profile: SpeedProfile, dt: float,
                    tau: float = 1.0) -> MultiTrajectory:
    """Plan the reference loop on the combined footprint and offset the fleet."""
    ref, _ = reference_path(roi, spec, tau)
    return formation_trajectory(ref, spec.offsets, profile, dt)


def formation_radius(traj: MultiTrajectory) -> float:
    return radius_profile_grid(traj).r_max
