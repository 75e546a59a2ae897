"""Connectivity radius of a UAV fleet.

The radius at one instant is the heaviest edge of a Euclidean minimum
spanning tree (which is also the minimum bottleneck spanning tree).  Over a
mission it is maximised either on the sample grid or with a Lipschitz
(Piyavskii) upper-envelope search.
"""
from __future__ import annotations

import csv
import heapq
from dataclasses import dataclass

import numpy as np
from scipy.spatial import Delaunay, QhullError

DENSE_MAX_N = 16


@dataclass(frozen=True)
class RadiusProfile:
    t: np.ndarray
    r: np.ndarray
    r_max: float
    argmax_t: float
    evaluations: int = 0

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(["t", "r"])
            for t, r in zip(self.t.tolist(), self.r.tolist()):
                out.writerow([repr(t), repr(r)])


def _prim_bottleneck(pos: np.ndarray) -> np.ndarray:
    """Heaviest MST edge for a stack of configurations, shape (..., N, 2)."""
    pos = np.asarray(pos, dtype=float)
    batch = pos.shape[:-2]
    n = pos.shape[-2]
    if n < 2:
        return np.zeros(batch)
    p = pos.reshape(-1, n, 2)
    m = p.shape[0]
    diff = p[:, :, None, :] - p[:, None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    rows = np.arange(m)
    in_tree = np.zeros((m, n), dtype=bool)
    in_tree[:, 0] = True
    best = dist[:, 0, :].copy()
    bottleneck = np.zeros(m)
    for _ in range(n - 1):
        cand = np.where(in_tree, np.inf, best)
        j = cand.argmin(axis=1)
        bottleneck = np.maximum(bottleneck, cand[rows, j])
        in_tree[rows, j] = True
        best = np.minimum(best, dist[rows, j, :])
    return bottleneck.reshape(batch)


def _delaunay_bottleneck(pos: np.ndarray) -> float:
    pos = np.asarray(pos, dtype=float)
    n = len(pos)
    try:
        tri = Delaunay(pos)
    except QhullError:
        return float(_prim_bottleneck(pos))
    if len(tri.coplanar):  # duplicate points dropped by qhull
        return float(_prim_bottleneck(pos))
    s = tri.simplices
    e = np.concatenate([s[:, [0, 1]], s[:, [1, 2]], s[:, [0, 2]]])
    e = np.unique(np.sort(e, axis=1), axis=0)
    d = pos[e[:, 0]] - pos[e[:, 1]]
    wgt = np.hypot(d[:, 0], d[:, 1])
    order = np.argsort(wgt, kind="stable")
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    joined, worst = 0, 0.0
    for k in order:
        a, b = find(e[k, 0]), find(e[k, 1])
        if a != b:
            parent[a] = b
            worst = wgt[k]
            joined += 1
            if joined == n - 1:
                break
    return float(worst)


def radius_at(positions, method: str = "auto") -> float:
    """Smallest range that keeps the fleet's proximity graph connected."""
    pos = np.asarray(positions, dtype=float).reshape(-1, 2)
    if len(pos) < 2:
        return 0.0
    if method == "dense" or (method == "auto" and len(pos) <= DENSE_MAX_N):
        return float(_prim_bottleneck(pos))
    if method in ("delaunay", "auto"):
        return _delaunay_bottleneck(pos)
    raise ValueError(f"unknown method {method!r}")


def radius_many(positions) -> np.ndarray:
    """Radius for a (K, N, 2) stack of snapshots."""
    pos = np.asarray(positions, dtype=float)
    if pos.shape[-2] <= DENSE_MAX_N:
        return _prim_bottleneck(pos)
    return np.array([_delaunay_bottleneck(p) for p in pos])


def radius_series(traj) -> np.ndarray:
    """r at every sample instant of ``traj``."""
    return radius_many(np.swapaxes(traj.positions, 0, 1))


def radius_profile_grid(traj) -> RadiusProfile:
    r = radius_series(traj)
    k = int(np.argmax(r))
    return RadiusProfile(traj.times.copy(), r, float(r[k]), float(traj.times[k]), len(r))


def piyavskii_max(f, a: float, b: float, lipschitz: float, eps: float, max_evals: int = 1_000_000):
    """Global maximum of an L-Lipschitz function on [a, b] to within ``eps``.

    Returns ``(best, argbest, evaluations)`` with
    ``best <= max f <= best + eps``.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    fa = f(a)
    if b <= a:
        return fa, a, 1
    fb = f(b)
    evals = 2
    best, arg = (fa, a) if fa >= fb else (fb, b)
    L = lipschitz
    heap = []

    def push(x0, f0, x1, f1):
        if L > 0:
            peak = 0.5 * (f0 + f1) + 0.5 * L * (x1 - x0)
            xm = 0.5 * (x0 + x1) + (f1 - f0) / (2 * L)
        else:
            peak, xm = max(f0, f1), 0.5 * (x0 + x1)
        heapq.heappush(heap, (-peak, x0, f0, x1, f1, min(max(xm, x0), x1)))

    push(a, fa, b, fb)
    while heap:
        neg, x0, f0, x1, f1, xm = heapq.heappop(heap)
        if -neg - best <= eps or evals >= max_evals:
            break
        if not x0 < xm < x1:
            continue
        fm = f(xm)
        evals += 1
        if fm > best:
            best, arg = fm, xm
        push(x0, f0, xm, fm)
        push(xm, fm, x1, f1)
    return best, arg, evals


def radius_max_lipschitz(traj, v: float | None = None, eps: float = 0.05):
    """Certified maximum of r(t) over the mission using exact positions.

    ``v`` bounds every UAV's speed; r(t) is then 2v-Lipschitz.
    Returns ``(r_max, argmax_t, evaluations)``.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    v = traj.speed_bound if v is None else v
    return piyavskii_max(lambda t: radius_at(traj.positions_at(t)),
                         0.0, float(traj.horizon_T), 2.0 * v, eps)
