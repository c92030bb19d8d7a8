"""Poisson point process sampling and nearest-nucleus cell geometry.

Base stations form a homogeneous Poisson process on a finite window (an
origin-centred interval in 1-D, a disk in 2-D).  The cell of the station at
the origin is cut from a seed square by the perpendicular-bisector
half-plane of each neighbour, visited in increasing distance; nothing
farther than twice the current largest vertex distance can still touch the
cell, which bounds the work per realization.

A realization whose cell could be altered by stations outside the window is
reported via CellNotClosedError; callers discard and count it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SimWindow",
    "Interval",
    "CellPolygon",
    "CellNotClosedError",
    "NetworkRealization",
    "default_window",
    "sample_ppp",
    "typical_cell",
    "crofton_cell",
    "sample_user_in_cell",
    "sample_type1_realization",
    "sample_type2_realization",
]


class CellNotClosedError(RuntimeError):
    """The cell is not determined by in-window points (window too small)."""


@dataclass(frozen=True)
class SimWindow:
    """Origin-centred sampling window: interval half-width (1-D) or disk
    radius (2-D)."""

    dimension: int
    radius: float

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.dimension}")
        if not self.radius > 0.0:
            raise ValueError("window radius must be positive")

    @property
    def measure(self) -> float:
        if self.dimension == 1:
            return 2.0 * self.radius
        return math.pi * self.radius**2


def default_window(dimension: int, density: float) -> SimWindow:
    """Window sized so truncated far interference is negligible and cells
    close with overwhelming probability (expected count 100 in 1-D, 400 in
    2-D)."""
    if dimension == 1:
        return SimWindow(1, 50.0 / density)
    return SimWindow(2, 20.0 / math.sqrt(math.pi * density))


@dataclass(frozen=True)
class Interval:
    """1-D cell [lo, hi]."""

    lo: float
    hi: float

    @property
    def length(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class CellPolygon:
    """Convex 2-D cell; vertices are counter-clockwise."""

    vertices: np.ndarray
    area: float
    bounding_box: tuple[float, float, float, float]

    @classmethod
    def from_vertices(cls, vertices) -> "CellPolygon":
        verts = np.asarray(vertices, dtype=float)
        xs, ys = verts[:, 0], verts[:, 1]
        area = _shoelace(verts)
        return cls(verts, area,
                   (float(xs.min()), float(ys.min()), float(xs.max()), float(ys.max())))

    def contains(self, point) -> bool:
        px, py = float(point[0]), float(point[1])
        v = self.vertices
        nxt = np.roll(v, -1, axis=0)
        cross = (nxt[:, 0] - v[:, 0]) * (py - v[:, 1]) - (nxt[:, 1] - v[:, 1]) * (px - v[:, 0])
        return bool(np.all(cross >= -1e-12))


def _shoelace(verts: np.ndarray) -> float:
    x, y = verts[:, 0], verts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def sample_ppp(window: SimWindow, density: float, rng: np.random.Generator) -> np.ndarray:
    """Sample one Poisson configuration on the window.

    Returns positions of shape (n,) for 1-D or (n, 2) for 2-D; n is
    Poisson(density * window measure) and may be zero.
    """
    if not density > 0.0:
        raise ValueError("density must be positive")
    n = int(rng.poisson(density * window.measure))
    if window.dimension == 1:
        return rng.uniform(-window.radius, window.radius, n)
    radii = window.radius * np.sqrt(rng.random(n))
    angles = 2.0 * math.pi * rng.random(n)
    return np.column_stack((radii * np.cos(angles), radii * np.sin(angles)))


def _clip_halfplane(poly, ax, ay, b):
    """Sutherland-Hodgman step keeping {p : ax*px + ay*py <= b}."""
    out = []
    px, py = poly[-1]
    dp = ax * px + ay * py - b
    for qx, qy in poly:
        dq = ax * qx + ay * qy - b
        if dq <= 0.0:
            if dp > 0.0:
                t = dp / (dp - dq)
                out.append((px + t * (qx - px), py + t * (qy - py)))
            out.append((qx, qy))
        elif dp <= 0.0:
            t = dp / (dp - dq)
            out.append((px + t * (qx - px), py + t * (qy - py)))
        px, py, dp = qx, qy, dq
    return out


def _clip_cell_local(xs, ys, d2_sorted, order, half_width):
    """Clip the seed square by bisectors of points in nucleus-centred
    coordinates, in increasing distance order.  Returns the vertex list."""
    h = half_width
    poly = [(-h, -h), (h, -h), (h, h), (-h, h)]
    max_r2 = 2.0 * h * h
    for j in order:
        if d2_sorted[j] > 4.0 * max_r2:
            break
        qx = float(xs[j])
        qy = float(ys[j])
        poly = _clip_halfplane(poly, qx, qy, 0.5 * (qx * qx + qy * qy))
        if len(poly) < 3:
            return poly
        max_r2 = max(x * x + y * y for x, y in poly)
    return poly


def _assert_closed(poly_local, nucleus, window_radius):
    """A point outside the window (distance > R_w from the origin) can cut a
    vertex v from the cell of `nucleus` only if |v| + |v - nucleus| > R_w."""
    nx, ny = nucleus
    for x, y in poly_local:
        reach = math.hypot(x + nx, y + ny) + math.hypot(x, y)
        if reach > window_radius:
            raise CellNotClosedError(
                "cell extends too close to the window boundary; enlarge the window")


def typical_cell(interferers: np.ndarray, window: SimWindow):
    """Cell of the origin in the process {origin} + interferers.

    1-D: the interval [-L/2, R/2] bounded by the nearest neighbour on each
    side.  2-D: the convex polygon cut from a seed square of half-width
    window.radius by neighbour bisectors, nearest first.
    """
    pts = np.asarray(interferers, dtype=float)
    if window.dimension == 1:
        left = pts[pts < 0.0]
        right = pts[pts > 0.0]
        if left.size == 0 or right.size == 0:
            raise CellNotClosedError("no interferer on one side of the origin")
        return Interval(float(left.max()) / 2.0, float(right.min()) / 2.0)

    if pts.size == 0:
        raise CellNotClosedError("no interferers")
    xs, ys = pts[:, 0], pts[:, 1]
    d2 = xs * xs + ys * ys
    order = np.argsort(d2)
    poly = _clip_cell_local(xs, ys, d2, order, window.radius)
    if len(poly) < 3:
        raise CellNotClosedError("degenerate cell")
    _assert_closed(poly, (0.0, 0.0), window.radius)
    return CellPolygon.from_vertices(poly)


def crofton_cell(interferers: np.ndarray, window: SimWindow):
    """Cell containing the origin in the tessellation of the interferers
    alone, i.e. the cell of the interferer nearest to the origin."""
    pts = np.asarray(interferers, dtype=float)
    if pts.size == 0:
        raise CellNotClosedError("empty point set")
    if window.dimension == 1:
        nucleus_idx = int(np.argmin(np.abs(pts)))
        nucleus = float(pts[nucleus_idx])
        left = pts[pts < nucleus]
        right = pts[pts > nucleus]
        if left.size == 0 or right.size == 0:
            raise CellNotClosedError("no neighbour on one side of the nucleus")
        return Interval((nucleus + float(left.max())) / 2.0,
                        (nucleus + float(right.min())) / 2.0)

    xs, ys = pts[:, 0], pts[:, 1]
    nucleus_idx = int(np.argmin(xs * xs + ys * ys))
    nx, ny = float(xs[nucleus_idx]), float(ys[nucleus_idx])
    lx = np.delete(xs, nucleus_idx) - nx
    ly = np.delete(ys, nucleus_idx) - ny
    d2 = lx * lx + ly * ly
    order = np.argsort(d2)
    poly = _clip_cell_local(lx, ly, d2, order, window.radius)
    if len(poly) < 3:
        raise CellNotClosedError("degenerate cell")
    _assert_closed(poly, (nx, ny), window.radius)
    return CellPolygon.from_vertices([(x + nx, y + ny) for x, y in poly])


def _sample_in_polygon(verts, u_tri, u1, u2):
    """Uniform point in a convex polygon: fan triangulation from the area
    centroid, area-weighted triangle choice, then the sqrt trick on
    barycentric coordinates."""
    n = len(verts)
    area2 = 0.0
    cx = cy = 0.0
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        cross = x0 * y1 - x1 * y0
        area2 += cross
        cx += (x0 + x1) * cross
        cy += (y0 + y1) * cross
    cx /= 3.0 * area2
    cy /= 3.0 * area2

    tri_areas = []
    acc = 0.0
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        acc += abs((x0 - cx) * (y1 - cy) - (x1 - cx) * (y0 - cy))
        tri_areas.append(acc)

    target = u_tri * acc
    k = 0
    while tri_areas[k] < target:
        k += 1
    ax, ay = cx, cy
    bx, by = verts[k]
    qx, qy = verts[(k + 1) % n]
    sq = math.sqrt(u1)
    w1 = sq * (1.0 - u2)
    w2 = sq * u2
    return (ax + w1 * (bx - ax) + w2 * (qx - ax),
            ay + w1 * (by - ay) + w2 * (qy - ay))


def sample_user_in_cell(cell, rng: np.random.Generator):
    """Uniform point in an Interval or CellPolygon."""
    if isinstance(cell, Interval):
        return float(rng.uniform(cell.lo, cell.hi))
    u = rng.random(3)
    verts = [(float(x), float(y)) for x, y in cell.vertices]
    return np.array(_sample_in_polygon(verts, u[0], u[1], u[2]))


@dataclass(frozen=True)
class NetworkRealization:
    """One sampled configuration with the serving station at the origin.

    ``interferers`` are the in-window stations sorted by distance to the
    user; ``serving_distance`` is R0 and ``dominant_interferer_distance``
    the nearest interferer distance R1 (>= R0 for the in-cell user).
    """

    dimension: int
    density: float
    interferers: np.ndarray
    user: np.ndarray
    serving_distance: float
    dominant_interferer_distance: float
    seed_path: tuple[int, int] | None = None


def _dist_to(points: np.ndarray, user: np.ndarray, dimension: int) -> np.ndarray:
    if dimension == 1:
        return np.abs(points - user[0])
    return np.hypot(points[:, 0] - user[0], points[:, 1] - user[1])


def sample_type1_realization(density: float, window: SimWindow,
                             rng: np.random.Generator,
                             seed_path: tuple[int, int] | None = None) -> NetworkRealization:
    """User uniform in the cell of the origin station (cell-centric view)."""
    pts = sample_ppp(window, density, rng)
    cell = typical_cell(pts, window)
    user = sample_user_in_cell(cell, rng)
    user = np.atleast_1d(np.asarray(user, dtype=float))
    dists = _dist_to(pts, user, window.dimension)
    order = np.argsort(dists)
    return NetworkRealization(
        dimension=window.dimension, density=density,
        interferers=pts[order], user=user,
        serving_distance=float(np.linalg.norm(user)),
        dominant_interferer_distance=float(dists[order[0]]),
        seed_path=seed_path)


def sample_type2_realization(density: float, window: SimWindow,
                             rng: np.random.Generator,
                             seed_path: tuple[int, int] | None = None) -> NetworkRealization:
    """Stationary independent user at the origin served by the nearest
    station of the process (user-centric view)."""
    pts = sample_ppp(window, density, rng)
    if (window.dimension == 1 and pts.size < 2) or (window.dimension == 2 and pts.shape[0] < 2):
        raise CellNotClosedError("need at least two stations for serving + dominant")
    user = np.zeros(window.dimension)
    dists = _dist_to(pts, user, window.dimension)
    order = np.argsort(dists)
    interferers = pts[order][1:]
    return NetworkRealization(
        dimension=window.dimension, density=density,
        interferers=interferers, user=user,
        serving_distance=float(dists[order[0]]),
        dominant_interferer_distance=float(dists[order[1]]),
        seed_path=seed_path)
