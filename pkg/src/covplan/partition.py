"""Workload-balanced division of a grid by round-robin seed growth."""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from collections import deque

import numpy as np

from .geometry import Grid


class NonTerminating(RuntimeError):
    """Seed growth stalled before every region reached its target size."""


@dataclass(frozen=True)
class Partition:
    regions: tuple
    seeds: tuple

    def sizes(self):
        return [len(r) for r in self.regions]


def check_workload(w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.ndim != 1 or len(w) == 0:
        raise ValueError("workload must be a non-empty vector")
    if np.any(w <= 0):
        raise ValueError("workload ratios must be positive")
    if abs(w.sum() - 1.0) > 1e-9:
        raise ValueError(f"workload ratios sum to {w.sum()!r}, expected 1")
    return w


def apportion(w, total: int) -> list:
    """Largest-remainder integer targets summing exactly to ``total``."""
    quotas = np.asarray(w, dtype=float) * total
    base = np.floor(quotas).astype(int)
    rest = total - int(base.sum())
    # stable sort keeps lower index first on equal remainders
    order = np.argsort(-(quotas - base), kind="stable")
    base[order[:rest]] += 1
    return base.tolist()


def sample_seed_vector(grid: Grid, n: int, rng_seed: int) -> tuple:
    if n > len(grid):
        raise ValueError(f"cannot draw {n} distinct seeds from {len(grid)} cells")
    rng = np.random.default_rng(rng_seed)
    return tuple(int(i) for i in rng.choice(len(grid), size=n, replace=False))


def darp_partition(grid: Grid, seeds, w, max_iters: int | None = None) -> Partition:
    """Grow one region per seed, round robin, until each holds its share.

    Each turn a region claims the unassigned 4-neighbour of its current cells
    nearest (centre to centre) to its seed; ties go to the lower (row, col).
    Regions at their target size sit out.
    """
    w = check_workload(w)
    seeds = tuple(int(s) for s in seeds)
    n = len(seeds)
    if len(w) != n:
        raise ValueError("workload and seed vectors differ in length")
    if len(set(seeds)) != n or any(not 0 <= s < len(grid) for s in seeds):
        raise ValueError("seeds must be distinct valid cell indices")
    total = len(grid)
    if max_iters is None:
        max_iters = 4 * total
    targets = apportion(w, total)
    if min(targets) < 1:
        raise NonTerminating("a workload share rounds to zero cells")

    cells = grid.cells
    centers = grid.cell_centers
    owner = [-1] * total
    regions = [[s] for s in seeds]
    frontier = [[] for _ in range(n)]

    def push_neighbors(i, idx):
        sc = centers[seeds[i]]
        for nb in grid.neighbors(cells[idx]):
            j = grid.index(nb)
            if owner[j] < 0:
                d = math.hypot(centers[j, 0] - sc[0], centers[j, 1] - sc[1])
                heapq.heappush(frontier[i], (d, nb[1], nb[0], j))

    for i, s in enumerate(seeds):
        owner[s] = i
    for i, s in enumerate(seeds):
        push_neighbors(i, s)

    iters = 0
    remaining = total - n
    while remaining:
        progressed = False
        for i in range(n):
            if len(regions[i]) >= targets[i]:
                continue
            heap = frontier[i]
            while heap and owner[heap[0][3]] >= 0:
                heapq.heappop(heap)
            if not heap:
                raise NonTerminating(
                    f"region {i} ran out of frontier at {len(regions[i])}/{targets[i]} cells")
            j = heapq.heappop(heap)[3]
            owner[j] = i
            regions[i].append(j)
            push_neighbors(i, j)
            remaining -= 1
            progressed = True
            iters += 1
            if iters > max_iters:
                raise NonTerminating(f"exceeded {max_iters} growth steps")
        if not progressed:
            raise NonTerminating("no region can grow")
    return Partition(tuple(frozenset(r) for r in regions), seeds)


def is_connected(grid: Grid, region) -> bool:
    region = set(region)
    if not region:
        return False
    start = next(iter(region))
    seen = {start}
    todo = deque([start])
    while todo:
        idx = todo.popleft()
        for nb in grid.neighbors(grid.cells[idx]):
            j = grid.index(nb)
            if j in region and j not in seen:
                seen.add(j)
                todo.append(j)
    return len(seen) == len(region)
