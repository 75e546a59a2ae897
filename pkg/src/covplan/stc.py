"""Spanning Tree Coverage loops over mega-cell regions."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import Grid

# sub-cell offsets inside a mega-cell
BL, BR, TR, TL = (0, 0), (1, 0), (1, 1), (0, 1)
_RING = ((BL, BR), (BR, TR), (TR, TL), (TL, BL))


@dataclass(frozen=True)
class CoveragePath:
    """Closed loop of waypoints; the last waypoint connects back to the first."""

    waypoints: np.ndarray
    region_id: int = 0
    subcells: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        wp = np.asarray(self.waypoints, dtype=float).reshape(-1, 2)
        object.__setattr__(self, "waypoints", wp)
        if self.subcells is not None:
            object.__setattr__(self, "subcells", np.asarray(self.subcells, dtype=int).reshape(-1, 2))

    def __len__(self):
        return len(self.waypoints)

    @property
    def length(self) -> float:
        wp = self.waypoints
        if len(wp) < 2:
            return 0.0
        return float(np.linalg.norm(np.roll(wp, -1, axis=0) - wp, axis=1).sum())

    def edges(self):
        """Undirected edges as a sorted list of point-pair tuples."""
        wp = [tuple(p) for p in self.waypoints.tolist()]
        out = []
        for a, b in zip(wp, wp[1:] + wp[:1]):
            out.append((a, b) if a <= b else (b, a))
        return sorted(out)

    def turn_count(self) -> int:
        wp = self.waypoints
        if len(wp) < 3:
            return 0
        d_in = wp - np.roll(wp, 1, axis=0)
        d_out = np.roll(wp, -1, axis=0) - wp
        cross = d_in[:, 0] * d_out[:, 1] - d_in[:, 1] * d_out[:, 0]
        dot = (d_in * d_out).sum(axis=1)
        scale = np.linalg.norm(d_in, axis=1) * np.linalg.norm(d_out, axis=1)
        return int(np.count_nonzero((np.abs(cross) > 1e-9 * scale) | (dot < 0)))


def spanning_tree(grid: Grid, region) -> list:
    """Kruskal over the region's 4-adjacency in lexicographic edge order."""
    region = sorted(set(int(i) for i in region))
    member = set(region)
    edges = []
    for i in region:
        c, r = grid.cells[i]
        for nb in ((c + 1, r), (c, r + 1)):
            if nb in grid and grid.index(nb) in member:
                j = grid.index(nb)
                a, b = grid.cells[i], grid.cells[j]
                edges.append(((a[1], a[0]), (b[1], b[0]), i, j))
    edges.sort()
    parent = {i: i for i in region}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree = []
    for _, _, i, j in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            tree.append((i, j))
    if len(tree) != len(region) - 1:
        raise ValueError("region is not 4-connected")
    return tree


def stc_loop(region, grid: Grid, region_id: int = 0, ccw: bool = True) -> CoveragePath:
    region = sorted(set(int(i) for i in region))
    if not region:
        raise ValueError("empty region")
    tree = spanning_tree(grid, region)

    adj: dict = {}

    def link(a, b):
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)

    def unlink(a, b):
        adj[a].discard(b)
        adj[b].discard(a)

    def sub(cell, off):
        return (2 * cell[0] + off[0], 2 * cell[1] + off[1])

    for i in region:
        cell = grid.cells[i]
        for a, b in _RING:
            link(sub(cell, a), sub(cell, b))
    for i, j in tree:
        a, b = grid.cells[i], grid.cells[j]
        if b[1] == a[1]:  # horizontal neighbour, b to the right
            unlink(sub(a, BR), sub(a, TR))
            unlink(sub(b, BL), sub(b, TL))
            link(sub(a, BR), sub(b, BL))
            link(sub(a, TR), sub(b, TL))
        else:  # b above a
            unlink(sub(a, TL), sub(a, TR))
            unlink(sub(b, BL), sub(b, BR))
            link(sub(a, TL), sub(b, BL))
            link(sub(a, TR), sub(b, BR))

    start = min(adj, key=lambda s: (s[1], s[0]))
    seq = [start]
    prev, cur = None, start
    while True:
        nxt = min(n for n in adj[cur] if n != prev) if prev is not None else min(adj[cur])
        if nxt == start:
            break
        seq.append(nxt)
        prev, cur = cur, nxt
    if len(seq) != 4 * len(region):
        raise RuntimeError("sub-cell contour is not a single cycle")

    sc = np.asarray(seq, dtype=float)
    signed = 0.5 * np.sum(sc[:, 0] * np.roll(sc[:, 1], -1) - np.roll(sc[:, 0], -1) * sc[:, 1])
    if (signed < 0) == ccw:
        seq = [seq[0]] + seq[:0:-1]
    subcells = np.asarray(seq, dtype=int)
    return CoveragePath(grid.subcell_centers(subcells), region_id, subcells)


def rotate_start(path: CoveragePath, k: int) -> CoveragePath:
    n = len(path)
    if not 0 <= k < max(n, 1):
        raise IndexError(f"launch index {k} out of range for {n} waypoints")
    sub = None if path.subcells is None else np.roll(path.subcells, -k, axis=0)
    return CoveragePath(np.roll(path.waypoints, -k, axis=0), path.region_id, sub)
