"""Region of interest and its discretization into a square mega-cell grid.

The grid lives in its own frame: a world point ``p`` maps to grid coordinates
``u = R(-theta) (p - origin) + shift``.  Mega-cell ``(col, row)`` occupies
``[col*s, (col+1)*s] x [row*s, (row+1)*s]`` in that frame, with ``s`` the cell
side (twice the sensor footprint side).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import shapely
from shapely import affinity
from shapely.geometry import Polygon
from shapely.ops import unary_union

EARTH_RADIUS = 6378137.0


class EmptyGridError(ValueError):
    """No cell passes the inclusion threshold."""


@dataclass(frozen=True)
class Roi:
    """Outer polygon with optional no-fly-zone holes, in metres."""

    outer: tuple
    nfzs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "outer", tuple(map(tuple, self.outer)))
        object.__setattr__(self, "nfzs", tuple(tuple(map(tuple, z)) for z in self.nfzs))
        if len(self.outer) < 3:
            raise ValueError("outer ring needs at least 3 vertices")
        ring = Polygon(self.outer)
        if not ring.is_valid:
            raise ValueError("outer ring is not a simple polygon")
        hull = ring.convex_hull
        zones = [Polygon(z) for z in self.nfzs]
        for i, z in enumerate(zones):
            if not z.is_valid or z.area <= 0:
                raise ValueError(f"nfz {i} is not a simple polygon")
            if not hull.buffer(1e-9).contains(z):
                raise ValueError(f"nfz {i} lies outside the convex hull of the outer ring")
            for j in range(i):
                if z.intersection(zones[j]).area > 0:
                    raise ValueError(f"nfzs {j} and {i} overlap")

    @property
    def region(self) -> Polygon:
        """Flyable area: the outer ring minus every NFZ."""
        area = Polygon(self.outer)
        if self.nfzs:
            area = area.difference(unary_union([Polygon(z) for z in self.nfzs]))
        return area

    @property
    def area(self) -> float:
        return self.region.area

    def bounds(self):
        return Polygon(self.outer).bounds

    @classmethod
    def from_dict(cls, doc: dict, origin=None) -> "Roi":
        """Build from ``{"outer": [[x, y], ...], "nfzs": [[[x, y], ...], ...]}``.

        With ``origin=(lon0, lat0)`` the coordinates are read as lon/lat degrees
        and projected onto the local tangent plane at that origin.
        """
        outer = doc["outer"]
        nfzs = doc.get("nfzs", [])
        if origin is not None:
            outer = lonlat_to_local(outer, origin)
            nfzs = [lonlat_to_local(z, origin) for z in nfzs]
        return cls(outer, nfzs)

    def to_dict(self) -> dict:
        return {"outer": [list(p) for p in self.outer],
                "nfzs": [[list(p) for p in z] for z in self.nfzs]}


def lonlat_to_local(points, origin) -> np.ndarray:
    """Equirectangular projection of lon/lat degrees to east/north metres."""
    pts = np.asarray(points, dtype=float)
    lon0, lat0 = origin
    x = np.radians(pts[:, 0] - lon0) * EARTH_RADIUS * math.cos(math.radians(lat0))
    y = np.radians(pts[:, 1] - lat0) * EARTH_RADIUS
    return np.column_stack([x, y])


def local_to_lonlat(points, origin) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    lon0, lat0 = origin
    lon = lon0 + np.degrees(pts[:, 0] / (EARTH_RADIUS * math.cos(math.radians(lat0))))
    lat = lat0 + np.degrees(pts[:, 1] / EARTH_RADIUS)
    return np.column_stack([lon, lat])


@dataclass(frozen=True)
class SensorFootprint:
    side_w: float

    def __post_init__(self):
        if not self.side_w > 0:
            raise ValueError("footprint side must be positive")

    @classmethod
    def from_area(cls, area: float) -> "SensorFootprint":
        return cls(math.sqrt(area))

    @property
    def area(self) -> float:
        return self.side_w ** 2


@dataclass(frozen=True)
class GridSpec:
    origin: tuple
    rotation_theta: float
    shift: tuple
    cell_side: float
    tau: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "origin", tuple(float(v) for v in self.origin))
        object.__setattr__(self, "shift", tuple(float(v) for v in self.shift))
        if not self.cell_side > 0:
            raise ValueError("cell_side must be positive")
        if not 0 < self.tau <= 1:
            raise ValueError("tau must lie in (0, 1]")
        if not 0 <= self.rotation_theta < math.pi / 2:
            raise ValueError("rotation_theta must lie in [0, pi/2)")

    @property
    def side_w(self) -> float:
        return self.cell_side / 2

    @classmethod
    def identity(cls, roi: Roi, side_w: float, tau: float = 1.0) -> "GridSpec":
        minx, miny, _, _ = roi.bounds()
        return cls((minx, miny), 0.0, (0.0, 0.0), 2 * side_w, tau)

    def to_grid(self, points) -> np.ndarray:
        """World -> grid frame."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        c, s = math.cos(self.rotation_theta), math.sin(self.rotation_theta)
        d = pts - self.origin
        u = np.column_stack([c * d[:, 0] + s * d[:, 1], -s * d[:, 0] + c * d[:, 1]])
        return u + self.shift

    def to_world(self, points) -> np.ndarray:
        """Grid frame -> world."""
        u = np.atleast_2d(np.asarray(points, dtype=float)) - self.shift
        c, s = math.cos(self.rotation_theta), math.sin(self.rotation_theta)
        p = np.column_stack([c * u[:, 0] - s * u[:, 1], s * u[:, 0] + c * u[:, 1]])
        return p + self.origin

    def roi_in_grid_frame(self, roi: Roi):
        geom = affinity.translate(roi.region, -self.origin[0], -self.origin[1])
        geom = affinity.rotate(geom, -self.rotation_theta, origin=(0, 0), use_radians=True)
        return affinity.translate(geom, *self.shift)

    def to_dict(self) -> dict:
        return {"origin": list(self.origin), "rotation_theta": self.rotation_theta,
                "shift": list(self.shift), "cell_side": self.cell_side, "tau": self.tau}

    @classmethod
    def from_dict(cls, doc: dict) -> "GridSpec":
        return cls(tuple(doc["origin"]), doc["rotation_theta"], tuple(doc["shift"]),
                   doc["cell_side"], doc["tau"])


@dataclass(frozen=True)
class Grid:
    """Included mega-cells, ordered lexicographically by (row, col)."""

    spec: GridSpec
    cells: tuple

    def __post_init__(self):
        cells = tuple(sorted({tuple(map(int, c)) for c in self.cells}, key=lambda c: (c[1], c[0])))
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "_index", {c: i for i, c in enumerate(cells)})

    def __len__(self):
        return len(self.cells)

    def index(self, cell) -> int:
        return self._index[tuple(cell)]

    def __contains__(self, cell) -> bool:
        return tuple(cell) in self._index

    @property
    def cell_centers(self) -> np.ndarray:
        s = self.spec.cell_side
        u = (np.asarray(self.cells, dtype=float).reshape(-1, 2) + 0.5) * s
        return self.spec.to_world(u)

    def cell_of(self, point) -> tuple:
        u = self.spec.to_grid(point)[0] / self.spec.cell_side
        return int(math.floor(u[0])), int(math.floor(u[1]))

    def subcell_centers(self, subcells) -> np.ndarray:
        """World positions of sub-cell centres given integer sub-cell coordinates."""
        w = self.spec.side_w
        u = (np.asarray(subcells, dtype=float).reshape(-1, 2) + 0.5) * w
        return self.spec.to_world(u)

    def neighbors(self, cell):
        c, r = cell
        for nb in ((c, r - 1), (c - 1, r), (c + 1, r), (c, r + 1)):
            if nb in self._index:
                yield nb


def cell_inclusion_ratio(cell_polygon, roi) -> float:
    """Fraction of ``cell_polygon`` lying inside the flyable ROI.

    Both arguments must be expressed in the same frame; ``roi`` may be a
    :class:`Roi` or an already-transformed shapely geometry.
    """
    cell = cell_polygon if isinstance(cell_polygon, Polygon) else Polygon(cell_polygon)
    if cell.area <= 0:
        raise ValueError("degenerate cell")
    region = roi.region if isinstance(roi, Roi) else roi
    return cell.intersection(region).area / cell.area


def _candidate_cells(region, s):
    minx, miny, maxx, maxy = region.bounds
    cols = np.arange(math.floor(minx / s), math.ceil(maxx / s))
    rows = np.arange(math.floor(miny / s), math.ceil(maxy / s))
    cc, rr = np.meshgrid(cols, rows)
    cc, rr = cc.ravel(), rr.ravel()
    boxes = shapely.box(cc * s, rr * s, (cc + 1) * s, (rr + 1) * s)
    return cc, rr, boxes


def _clipped_areas(roi: Roi, spec: GridSpec):
    region = spec.roi_in_grid_frame(roi)
    s = spec.cell_side
    cc, rr, boxes = _candidate_cells(region, s)
    shapely.prepare(region)
    areas = shapely.area(shapely.intersection(boxes, region))
    return cc, rr, areas / (s * s)


def discretize(roi: Roi, spec: GridSpec) -> Grid:
    cc, rr, ratio = _clipped_areas(roi, spec)
    keep = ratio >= spec.tau - 1e-12
    if not keep.any():
        raise EmptyGridError("ROI too small for footprint")
    cells = list(zip(cc[keep].tolist(), rr[keep].tolist()))
    return Grid(spec, cells)


def covered_ratio(roi: Roi, spec: GridSpec) -> float:
    """Share of the ROI area lying inside the cells ``discretize`` would keep."""
    _, _, ratio = _clipped_areas(roi, spec)
    keep = ratio >= spec.tau - 1e-12
    return float(ratio[keep].sum() * spec.cell_side ** 2 / roi.area)


def snapped_shift(roi: Roi, theta: float, cell_side: float) -> tuple:
    """Shift that puts a lattice corner on the rotated ROI's bounding-box minimum."""
    minx, miny, _, _ = roi.bounds()
    probe = GridSpec((minx, miny), theta, (0.0, 0.0), cell_side)
    bx, by, _, _ = probe.roi_in_grid_frame(roi).bounds
    return ((-bx) % cell_side, (-by) % cell_side)


def _edge_angles(roi: Roi):
    pts = np.asarray(roi.outer + roi.outer[:1])
    d = np.diff(pts, axis=0)
    ang = np.mod(np.arctan2(d[:, 1], d[:, 0]), math.pi / 2)
    ang[np.isclose(ang, math.pi / 2)] = 0.0
    seen = []
    for a in ang:
        if not any(abs(a - b) < 1e-9 for b in seen):
            seen.append(float(a))
    return seen


def optimize_alignment(roi: Roi, side_w: float, tau: float, budget: int,
                       rng_seed: int = 0) -> GridSpec:
    """Search grid rotation and shift for the largest covered-area ratio.

    Candidates in order: identity, each outer-edge orientation with a snapped
    shift, then uniform random draws over ``[0, pi/2) x [0, s)^2``.  The first
    candidate wins ties.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    s = 2 * side_w
    minx, miny, _, _ = roi.bounds()
    origin = (minx, miny)
    candidates = [(0.0, (0.0, 0.0))]
    for a in _edge_angles(roi):
        cand = (a, snapped_shift(roi, a, s))
        if a > 0 or cand[1] != (0.0, 0.0):
            candidates.append(cand)
    rng = np.random.default_rng(rng_seed)
    while len(candidates) < budget:
        th = rng.uniform(0, math.pi / 2)
        candidates.append((th, (rng.uniform(0, s), rng.uniform(0, s))))

    best, best_ratio = None, -1.0
    for th, sh in candidates[:budget]:
        spec = GridSpec(origin, th, sh, s, tau)
        ratio = covered_ratio(roi, spec)
        if ratio > best_ratio + 1e-12:
            best, best_ratio = spec, ratio
    return best
