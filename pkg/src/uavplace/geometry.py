"""Coverage geometry for UAVs with directional antennas facing a box-shaped building.

A UAV hovering in front of a facade with half-power beamwidth ``theta_b``
illuminates a cone whose apex is the UAV.  Inside the building the cone is cut
by the two opposite facades, leaving a truncated cone.  All cone axes are
axis-aligned: +x (UAV in front of side A, x = 0), -x (side B, x = x_b) or -z
(above the roof).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

# slack admitted by every membership/disjointness test (m)
TOL = 1e-9

#: resolution of the sampled test used for cones on different facade pairs (m)
CROSS_FAMILY_STEP = 0.25


class Axis(str, enum.Enum):
    PLUS_X = "+x"
    MINUS_X = "-x"
    MINUS_Z = "-z"

    @property
    def family(self) -> str:
        return "z" if self is Axis.MINUS_Z else "x"


class Facade(str, enum.Enum):
    A = "A"
    B = "B"
    ROOF = "roof"
    FLOOR = "floor"


@dataclass(frozen=True)
class BuildingDims:
    x_b: float
    y_b: float
    z_b: float

    def __post_init__(self):
        for name in ("x_b", "y_b", "z_b"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"building dimension {name} must be positive and finite, got {v}")

    @property
    def volume(self) -> float:
        return self.x_b * self.y_b * self.z_b

    @property
    def dims(self) -> Tuple[float, float, float]:
        return (self.x_b, self.y_b, self.z_b)

    def contains(self, pts: np.ndarray, tol: float = TOL) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        lo = pts >= -tol
        hi = pts <= np.array(self.dims) + tol
        return np.all(lo & hi, axis=-1)


@dataclass(frozen=True)
class Point3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.x, self.y, self.z)):
            raise ValueError(f"non-finite point {self}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class FacadeCircle:
    facade: Facade
    center: Tuple[float, float]
    radius: float


@dataclass(frozen=True)
class TruncatedCone:
    """One UAV's indoor coverage volume.

    ``axis_foot`` lives in facade coordinates: (y, z) for x-axis cones and
    (x, y) for roof cones.  ``near_plane`` and ``far_plane`` are the
    coordinates of the entry and exit facades along the axis.
    """

    axis: Axis
    apex: Point3
    half_angle: float
    near_plane: float
    far_plane: float
    axis_foot: Tuple[float, float]
    r_near: float
    r_far: float

    def __post_init__(self):
        if not 0 < self.half_angle < 90:
            raise ValueError(f"half angle must lie in (0, 90) degrees, got {self.half_angle}")
        if not 0 < self.r_near < self.r_far:
            raise ValueError("cone radii must satisfy 0 < r_near < r_far")
        t = math.tan(math.radians(self.half_angle))
        for plane, r in ((self.near_plane, self.r_near), (self.far_plane, self.r_far)):
            d = self.apex_distance(plane)
            if d <= 0:
                raise ValueError("facade plane lies behind the UAV")
            if abs(d * t - r) > 1e-9 * r:
                raise ValueError("cone radius inconsistent with apex distance and beamwidth")
        expected_foot = _foot_of(self.axis, self.apex)
        if not np.allclose(expected_foot, self.axis_foot, rtol=0, atol=1e-9):
            raise ValueError("axis foot does not lie on the cone axis")

    @property
    def theta_b(self) -> float:
        return 2.0 * self.half_angle

    @property
    def span(self) -> float:
        return abs(self.far_plane - self.near_plane)

    @property
    def standoff(self) -> float:
        return self.apex_distance(self.near_plane)

    @property
    def axis_index(self) -> int:
        return 2 if self.axis is Axis.MINUS_Z else 0

    @property
    def sign(self) -> float:
        return 1.0 if self.axis is Axis.PLUS_X else -1.0

    def apex_distance(self, plane: float) -> float:
        a = self.apex.z if self.axis is Axis.MINUS_Z else self.apex.x
        return (plane - a) * self.sign

    def radius_at(self, coord):
        """Cone radius at axis coordinate ``coord`` (scalar or array)."""
        return self.apex_distance(coord) * math.tan(math.radians(self.half_angle))

    def contains(self, pts: np.ndarray, building: Optional[BuildingDims], tol: float = TOL) -> np.ndarray:
        """Vectorised membership for an (..., 3) array of points.

        Pass ``building=None`` when the points are already known to be inside.
        """
        pts = np.asarray(pts, dtype=float)
        ai = self.axis_index
        lat = (1, 2) if ai == 0 else (0, 1)
        depth = self.apex_distance(pts[..., ai])
        lo, hi = sorted((self.near_plane, self.far_plane))
        between = (pts[..., ai] >= lo - tol) & (pts[..., ai] <= hi + tol)
        du = pts[..., lat[0]] - self.axis_foot[0]
        dv = pts[..., lat[1]] - self.axis_foot[1]
        radial = np.sqrt(du * du + dv * dv)
        inside = radial <= depth * math.tan(math.radians(self.half_angle)) + tol
        if building is None:
            return between & inside
        return between & inside & building.contains(pts, tol)


def _foot_of(axis: Axis, apex: Point3) -> Tuple[float, float]:
    if axis is Axis.MINUS_Z:
        return (apex.x, apex.y)
    return (apex.y, apex.z)


def gamma_ratio() -> float:
    """Small-to-large face radius ratio that closes the square-cell diagonal: sqrt(2) - 1."""
    return (math.sqrt(8.0) - 2.0) / 2.0


def auda_offset(x_b: float) -> float:
    """UAV standoff that makes opposite-facing cones interlock, (sqrt(2)/2) * x_b."""
    if not (x_b > 0 and math.isfinite(x_b)):
        raise ValueError(f"span must be positive, got {x_b}")
    return x_b * math.sqrt(2.0) / 2.0


def _check_theta(theta_b: float) -> None:
    if not 0 < theta_b < 180:
        raise ValueError(f"beamwidth must lie in (0, 180) degrees, got {theta_b}")


def cone_radii(standoff: float, span: float, theta_b: float) -> Tuple[float, float]:
    if standoff <= 0 or span <= 0:
        raise ValueError("standoff and span must be positive")
    _check_theta(theta_b)
    t = math.tan(math.radians(theta_b) / 2.0)
    return standoff * t, (standoff + span) * t


def theta_for_r_far(r_far: float, standoff: float, span: float) -> float:
    """Beamwidth (degrees) that yields far-face radius ``r_far``."""
    if r_far <= 0:
        raise ValueError("r_far must be positive")
    return 2.0 * math.degrees(math.atan(r_far / (standoff + span)))


def truncated_cone_volume(span: float, r_near: float, r_far: float) -> float:
    if span <= 0 or not 0 < r_near <= r_far:
        raise ValueError("need span > 0 and 0 < r_near <= r_far")
    return math.pi * span * (r_near**2 + r_near * r_far + r_far**2) / 3.0


def make_cone(
    building: BuildingDims,
    axis: Axis,
    foot: Tuple[float, float],
    standoff: float,
    theta_b: float,
) -> TruncatedCone:
    """Cone for a UAV ``standoff`` metres in front of the facade it faces."""
    _check_theta(theta_b)
    axis = Axis(axis)
    u, v = float(foot[0]), float(foot[1])
    if axis is Axis.PLUS_X:
        apex, near, far, span = Point3(-standoff, u, v), 0.0, building.x_b, building.x_b
    elif axis is Axis.MINUS_X:
        apex, near, far, span = Point3(building.x_b + standoff, u, v), building.x_b, 0.0, building.x_b
    else:
        apex, near, far, span = Point3(u, v, building.z_b + standoff), building.z_b, 0.0, building.z_b
    r_near, r_far = cone_radii(standoff, span, theta_b)
    return TruncatedCone(axis, apex, theta_b / 2.0, near, far, (u, v), r_near, r_far)


def cone_from_apex(building: BuildingDims, axis: Axis, apex: Point3, half_angle: float) -> TruncatedCone:
    axis = Axis(axis)
    if axis is Axis.PLUS_X:
        standoff = -apex.x
    elif axis is Axis.MINUS_X:
        standoff = apex.x - building.x_b
    else:
        standoff = apex.z - building.z_b
    if standoff <= 0:
        raise ValueError(f"UAV at {apex} is not outside the facade it faces")
    return make_cone(building, axis, _foot_of(axis, apex), standoff, 2.0 * half_angle)


def point_in_cone(cone: TruncatedCone, p: Point3, building: BuildingDims) -> bool:
    return bool(cone.contains(p.as_array(), building))


def facade_projections(cone: TruncatedCone) -> Tuple[FacadeCircle, FacadeCircle]:
    near_facade, far_facade = {
        Axis.PLUS_X: (Facade.A, Facade.B),
        Axis.MINUS_X: (Facade.B, Facade.A),
        Axis.MINUS_Z: (Facade.ROOF, Facade.FLOOR),
    }[cone.axis]
    foot = tuple(cone.axis_foot)
    return (
        FacadeCircle(near_facade, foot, cone.r_near),
        FacadeCircle(far_facade, foot, cone.r_far),
    )


def _circles_by_facade(cone: TruncatedCone) -> dict:
    return {c.facade: c for c in facade_projections(cone)}


def circles_disjoint(a: FacadeCircle, b: FacadeCircle, tol: float = TOL) -> bool:
    d = math.hypot(a.center[0] - b.center[0], a.center[1] - b.center[1])
    return d >= a.radius + b.radius - tol


def cones_disjoint(
    c1: TruncatedCone,
    c2: TruncatedCone,
    building: Optional[BuildingDims] = None,
) -> bool:
    """True when the two coverage volumes do not overlap (tangency allowed).

    Cones spanning the same facade pair are compared through their facade
    circles; the radii vary linearly with depth, so the clearance is extremal
    on the facades.  Cones from different facade pairs need ``building`` and
    are checked on a sampled grid.
    """
    if c1.axis.family == c2.axis.family:
        f1, f2 = _circles_by_facade(c1), _circles_by_facade(c2)
        return all(circles_disjoint(f1[f], f2[f]) for f in f1)
    if building is None:
        raise ValueError("cones on different facade pairs need the building to be compared")
    return _sampled_disjoint(c1, c2, building, CROSS_FAMILY_STEP)


def _cone_bbox(cone: TruncatedCone, building: BuildingDims) -> Tuple[np.ndarray, np.ndarray]:
    lo = np.zeros(3)
    hi = np.array(building.dims)
    lat = (1, 2) if cone.axis_index == 0 else (0, 1)
    for k, i in enumerate(lat):
        lo[i] = max(lo[i], cone.axis_foot[k] - cone.r_far)
        hi[i] = min(hi[i], cone.axis_foot[k] + cone.r_far)
    return lo, hi


def _sampled_disjoint(c1: TruncatedCone, c2: TruncatedCone, building: BuildingDims, step: float) -> bool:
    lo1, hi1 = _cone_bbox(c1, building)
    lo2, hi2 = _cone_bbox(c2, building)
    lo, hi = np.maximum(lo1, lo2), np.minimum(hi1, hi2)
    if np.any(lo > hi):
        return True
    axes = [np.arange(lo[i], hi[i] + step / 2, step) for i in range(3)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
    both = c1.contains(grid, building, tol=0.0) & c2.contains(grid, building, tol=0.0)
    return not bool(both.any())


def _quadrant_area(a: float, b: float, r: float) -> float:
    # area of the origin-centred disk inside {x >= a, y >= b}
    if a >= r or b >= r:
        return 0.0

    def prim(x):
        # antiderivative of sqrt(r^2 - x^2)
        x = min(max(x, -r), r)
        return 0.5 * (x * math.sqrt(max(r * r - x * x, 0.0)) + r * r * math.asin(x / r))

    lo = max(a, -r)
    c = math.sqrt(max(r * r - b * b, 0.0))
    band_lo = max(lo, -c)
    band = max(c - band_lo, 0.0)
    band_arc = prim(c) - prim(band_lo) if band > 0 else 0.0
    if b >= 0:
        # chord height sqrt(r^2 - x^2) - b, only where |x| < c
        return max(band_arc - b * band, 0.0)
    # full chords outside the band, chord above y = b inside it
    return 2.0 * (prim(r) - prim(lo)) - band_arc - b * band


def disk_rect_area(cx: float, cy: float, r: float, w: float, h: float) -> float:
    """Area of the disk of radius ``r`` at (cx, cy) inside the rectangle [0, w] x [0, h]."""
    if r <= 0:
        return 0.0
    if cx - r >= 0 and cx + r <= w and cy - r >= 0 and cy + r <= h:
        return math.pi * r * r
    x0, x1, y0, y1 = -cx, w - cx, -cy, h - cy
    area = (
        _quadrant_area(x0, y0, r)
        - _quadrant_area(x1, y0, r)
        - _quadrant_area(x0, y1, r)
        + _quadrant_area(x1, y1, r)
    )
    return min(max(area, 0.0), math.pi * r * r)


def facade_rect(cone: TruncatedCone, building: BuildingDims) -> Tuple[float, float]:
    """Width and height of the facade rectangle the cone's circles live in."""
    if cone.axis.family == "z":
        return building.x_b, building.y_b
    return building.y_b, building.z_b


def projection_inside(circle: FacadeCircle, width: float, height: float, tol: float = 1e-6) -> bool:
    (u, v), r = circle.center, circle.radius
    return u - r >= -tol and v - r >= -tol and u + r <= width + tol and v + r <= height + tol


def is_clipped(cone: TruncatedCone, building: BuildingDims) -> bool:
    w, h = facade_rect(cone, building)
    return not all(projection_inside(c, w, h) for c in facade_projections(cone))


def clipped_cone_volume(cone: TruncatedCone, building: BuildingDims) -> float:
    """Volume of the part of the truncated cone that lies inside the building."""
    if not is_clipped(cone, building):
        return truncated_cone_volume(cone.span, cone.r_near, cone.r_far)
    from scipy.integrate import quad

    w, h = facade_rect(cone, building)
    u, v = cone.axis_foot

    def area(s):
        r = cone.r_near + (cone.r_far - cone.r_near) * s / cone.span
        return disk_rect_area(u, v, r, w, h)

    vol, _ = quad(area, 0.0, cone.span, epsabs=0.0, epsrel=1e-13, limit=200)
    return vol
