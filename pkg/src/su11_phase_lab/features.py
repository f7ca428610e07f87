"""Geometry extraction from scalar fields.

Marching squares pulls level-set polylines off a masked grid; downstream
metrics (origin enclosure, radial extents, isotropy, power-law fits)
quantify the central-feature geometry.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NoEnclosingContourError, NoIntersectionError
from .grids import ScalarField


@dataclass(frozen=True)
class Contour:
    """Ordered polyline in (x, p) coordinates.

    Closed contours repeat no vertex; the segment from the last vertex
    back to the first is implied.  Open contours end where the level set
    leaves the masked-in region.
    """

    points: np.ndarray
    closed: bool
    field_level: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
            raise DomainError("contour needs an (n>=2, 2) vertex array")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def n_vertices(self) -> int:
        return int(self.points.shape[0])

    def signed_area(self) -> float:
        """Shoelace area (0 for open contours)."""
        if not self.closed:
            return 0.0
        x, y = self.points[:, 0], self.points[:, 1]
        x2, y2 = np.roll(x, -1), np.roll(y, -1)
        return 0.5 * float(np.sum(x * y2 - x2 * y))

    def encloses(self, point=(0.0, 0.0)) -> bool:
        """Even-odd crossing test; open contours never enclose."""
        if not self.closed:
            return False
        px, py = point
        x, y = self.points[:, 0] - px, self.points[:, 1] - py
        x2, y2 = np.roll(x, -1), np.roll(y, -1)
        crossing = (y <= 0) != (y2 <= 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            xi = x + (0.0 - y) * (x2 - x) / (y2 - y)
        return bool(np.sum(crossing & (xi > 0)) % 2 == 1)


# marching-squares segment tables: for each cell case (bit i set if corner i
# is above the level; corners ordered BL, BR, TR, TL) list the pairs of cell
# edges (0 bottom, 1 right, 2 top, 3 left) joined by contour segments.
_CASE_SEGMENTS = {
    1: [(3, 0)],
    2: [(0, 1)],
    3: [(3, 1)],
    4: [(1, 2)],
    6: [(0, 2)],
    7: [(3, 2)],
    8: [(2, 3)],
    9: [(2, 0)],
    11: [(2, 1)],
    12: [(1, 3)],
    13: [(1, 0)],
    14: [(0, 3)],
}


def _edge_key(ip: int, ix: int, edge: int):
    """Canonical grid-global identifier of a cell edge."""
    if edge == 0:
        return ("h", ip, ix)
    if edge == 2:
        return ("h", ip + 1, ix)
    if edge == 3:
        return ("v", ip, ix)
    return ("v", ip, ix + 1)


def zero_contours(field: ScalarField, level: float = 0.0) -> list[Contour]:
    """Extract level-set polylines by marching squares.

    Cell-edge crossings are linearly interpolated; saddle cells are split
    by the sign of the cell-center mean; chains touching the mask or grid
    boundary come back marked open.
    """
    grid = field.grid
    vals = field.values
    mask = grid.mask
    xs, ps = grid.x, grid.p
    n_p, n_x = grid.shape

    crossing_pt: dict = {}
    adjacency: dict = {}
    boundary_edges: set = set()

    def interp(va, vb, a, b):
        t = (level - va) / (vb - va)
        return (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))

    for ip in range(n_p - 1):
        for ix in range(n_x - 1):
            if not (
                mask[ip, ix]
                and mask[ip, ix + 1]
                and mask[ip + 1, ix]
                and mask[ip + 1, ix + 1]
            ):
                continue
            v = (
                vals[ip, ix],
                vals[ip, ix + 1],
                vals[ip + 1, ix + 1],
                vals[ip + 1, ix],
            )
            case = sum(1 << i for i in range(4) if v[i] > level)
            if case in (0, 15):
                continue
            corners = (
                (xs[ix], ps[ip]),
                (xs[ix + 1], ps[ip]),
                (xs[ix + 1], ps[ip + 1]),
                (xs[ix], ps[ip + 1]),
            )
            if case in (5, 10):
                center = 0.25 * (v[0] + v[1] + v[2] + v[3])
                # pair edges so the above-level corners connect through the
                # cell center when the center is above the level
                if (center > level) == (case == 5):
                    segs = [(3, 0), (1, 2)]
                else:
                    segs = [(0, 1), (2, 3)]
            else:
                segs = _CASE_SEGMENTS[case]
            edge_corner = {0: (0, 1), 1: (1, 2), 2: (2, 3), 3: (3, 0)}
            for ea, eb in segs:
                keys = []
                for e in (ea, eb):
                    key = _edge_key(ip, ix, e)
                    if key not in crossing_pt:
                        ca, cb = edge_corner[e]
                        crossing_pt[key] = interp(v[ca], v[cb], corners[ca], corners[cb])
                    keys.append(key)
                ka, kb = keys
                adjacency.setdefault(ka, []).append(kb)
                adjacency.setdefault(kb, []).append(ka)

    # any crossing edge bordering a skipped cell (mask or grid boundary) is a
    # chain terminus: its level set continues into unsampled territory
    for key in adjacency:
        if len(adjacency[key]) == 1:
            boundary_edges.add(key)

    contours: list[Contour] = []
    visited: set = set()

    def walk(start, first):
        path = [start, first]
        visited.add(start)
        visited.add(first)
        prev, cur = start, first
        while True:
            nxt = [e for e in adjacency[cur] if e != prev]
            nxt = [e for e in nxt if e == start or e not in visited]
            if not nxt:
                return path, False
            step = nxt[0]
            if step == start:
                return path, True
            path.append(step)
            visited.add(step)
            prev, cur = cur, step

    # open chains first, starting from termini
    for key in sorted(boundary_edges):
        if key in visited or key not in adjacency:
            continue
        neighbors = adjacency[key]
        if not neighbors:
            continue
        path, closed = walk(key, neighbors[0])
        pts = np.array([crossing_pt[e] for e in path])
        if len(pts) >= 2:
            contours.append(Contour(points=pts, closed=False, field_level=level))

    # remaining chains are loops
    for key in sorted(adjacency):
        if key in visited:
            continue
        path, closed = walk(key, adjacency[key][0])
        pts = np.array([crossing_pt[e] for e in path])
        if closed and len(pts) >= 4:
            contours.append(Contour(points=pts, closed=True, field_level=level))
        elif len(pts) >= 2:
            contours.append(Contour(points=pts, closed=False, field_level=level))
    return contours


def central_contour(contours, origin=(0.0, 0.0)) -> Contour:
    """The closed contour enclosing `origin` with minimal |area|."""
    best = None
    best_area = math.inf
    for c in contours:
        if not c.closed or c.n_vertices < 4:
            continue
        if not c.encloses(origin):
            continue
        area = abs(c.signed_area())
        if area > 0.0 and area < best_area:
            best, best_area = c, area
    if best is None:
        raise NoEnclosingContourError(
            f"no closed contour encloses {origin} (candidates: {len(list(contours))})"
        )
    return best


def radial_extent(c: Contour, theta: float, origin=(0.0, 0.0)) -> float:
    """Distance from `origin` to the contour along direction theta
    (nearest ray-polyline intersection)."""
    ox, oy = origin
    pts = c.points
    x = pts[:, 0] - ox
    y = pts[:, 1] - oy
    if c.closed:
        x2, y2 = np.roll(x, -1), np.roll(y, -1)
    else:
        x2, y2 = x[1:], y[1:]
        x, y = x[:-1], y[:-1]
    ct, st = math.cos(theta), math.sin(theta)
    # rotate segments into the ray frame: ray = positive u axis
    u1 = x * ct + y * st
    v1 = -x * st + y * ct
    u2 = x2 * ct + y2 * st
    v2 = -x2 * st + y2 * ct
    hits = (v1 <= 0) != (v2 <= 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ui = u1 + (0.0 - v1) * (u2 - u1) / (v2 - v1)
    good = hits & (ui > 0)
    if not good.any():
        raise NoIntersectionError(f"ray at theta={theta} does not hit the contour")
    return float(np.min(ui[good]))


def isotropy_ratio(c: Contour, n_dirs: int = 360, origin=(0.0, 0.0)) -> float:
    """max/min of radial_extent over n_dirs equally spaced directions;
    1 for a perfect circle centered on `origin`."""
    if n_dirs < 4:
        raise DomainError("n_dirs must be >= 4")
    ext = [
        radial_extent(c, 2.0 * math.pi * i / n_dirs, origin=origin)
        for i in range(n_dirs)
    ]
    return max(ext) / min(ext)


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares power law extent ~ exp(intercept) * k^slope."""

    samples: tuple
    slope: float
    intercept: float
    rms_residual: float


def scaling_exponent(samples) -> ScalingFit:
    """Fit ln(extent) = slope * ln(k) + intercept by least squares."""
    samples = [(float(k), float(e)) for k, e in samples]
    if len(samples) < 3:
        raise DomainError("need at least 3 samples for a scaling fit")
    ks = np.array([s[0] for s in samples])
    es = np.array([s[1] for s in samples])
    if np.any(es <= 0.0) or np.any(ks <= 0.0):
        raise DomainError("scaling fit requires positive k and extents")
    lk, le = np.log(ks), np.log(es)
    slope, intercept = np.polyfit(lk, le, 1)
    resid = le - (slope * lk + intercept)
    return ScalingFit(
        samples=tuple(samples),
        slope=float(slope),
        intercept=float(intercept),
        rms_residual=float(np.sqrt(np.mean(resid**2))),
    )
