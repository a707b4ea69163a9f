"""Deployment planners: one facade (FOBS), roof (ABS) and alternating upside-down (AUDA)."""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .geometry import (
    Axis,
    BuildingDims,
    Point3,
    TruncatedCone,
    auda_offset,
    clipped_cone_volume,
    cone_radii,
    cones_disjoint,
    facade_projections,
    facade_rect,
    gamma_ratio,
    is_clipped,
    make_cone,
    projection_inside,
    theta_for_r_far,
)
from .packing import DEFAULT_MAX_ITERS, DEFAULT_RESTARTS, FEAS_TOL, max_circles


class Method(str, enum.Enum):
    FOBS = "FOBS"
    ABS = "ABS"
    AUDA = "AUDA"


@dataclass(frozen=True)
class Uav:
    position: Point3
    cone: TruncatedCone
    clipped: bool = False


@dataclass(frozen=True)
class DeploymentPlan:
    method: Method
    theta_b: float
    standoff: float
    r_near: float
    r_far: float
    uavs: Tuple[Uav, ...] = ()
    cells: int = 0
    diagnostic: Optional[str] = field(default=None, compare=False)

    @property
    def cones(self) -> List[TruncatedCone]:
        return [u.cone for u in self.uavs]

    def __len__(self) -> int:
        return len(self.uavs)


def _cells(r_far: float, a: float, b: float) -> Tuple[int, int]:
    # square cells of side 2 r_far, with the packing tolerance so that exact tilings survive rounding
    return int(math.floor((a + FEAS_TOL) / (2 * r_far))), int(math.floor((b + FEAS_TOL) / (2 * r_far)))


def _packed_plan(
    method: Method,
    building: BuildingDims,
    axis: Axis,
    span: float,
    rect: Tuple[float, float],
    theta_b: float,
    standoff: float,
    seed: int,
    restarts: int,
    max_iters: int,
) -> DeploymentPlan:
    r_near, r_far = cone_radii(standoff, span, theta_b)
    if 2 * r_far > min(rect) + FEAS_TOL:
        return DeploymentPlan(method, theta_b, standoff, r_near, r_far, diagnostic="no circle fits")
    n, sol = max_circles(r_far, rect[0], rect[1], seed, restarts, max_iters)
    uavs = []
    for u, v in sol.centers[:n]:
        cone = make_cone(building, axis, (u, v), standoff, theta_b)
        uavs.append(Uav(cone.apex, cone))
    diag = None if uavs else "no circle fits"
    return DeploymentPlan(method, theta_b, standoff, r_near, r_far, tuple(uavs), diagnostic=diag)


def plan_fobs(
    building: BuildingDims,
    theta_b: float,
    standoff: Optional[float] = None,
    seed: int = 0,
    restarts: int = DEFAULT_RESTARTS,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> DeploymentPlan:
    """All UAVs in front of side A, cones packed on the y-z facade.

    ``standoff`` defaults to the AUDA offset so both methods are compared at
    the same beam geometry.
    """
    standoff = auda_offset(building.x_b) if standoff is None else standoff
    return _packed_plan(
        Method.FOBS, building, Axis.PLUS_X, building.x_b, (building.y_b, building.z_b),
        theta_b, standoff, seed, restarts, max_iters,
    )


def plan_abs(
    building: BuildingDims,
    theta_b: float,
    standoff_z: Optional[float] = None,
    seed: int = 0,
    restarts: int = DEFAULT_RESTARTS,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> DeploymentPlan:
    """All UAVs above the roof, cones pointing down and packed on the x-y roof rectangle."""
    standoff_z = auda_offset(building.z_b) if standoff_z is None else standoff_z
    return _packed_plan(
        Method.ABS, building, Axis.MINUS_Z, building.z_b, (building.x_b, building.y_b),
        theta_b, standoff_z, seed, restarts, max_iters,
    )


def plan_auda(building: BuildingDims, r_far: float, include_boundary: bool = True) -> DeploymentPlan:
    """Alternating upside-down arrangement on sides A and B.

    Side-B UAVs sit in front of the centre of each 2*r_far square cell; side-A
    UAVs sit in front of the cell corners.  Corners on the facade edge carry
    cones partly outside the building (half or quarter cones when the cells
    tile the facade exactly); they are part of the plan unless
    ``include_boundary`` is false.
    """
    standoff = auda_offset(building.x_b)
    if r_far <= 0:
        raise ValueError("r_far must be positive")
    theta_b = theta_for_r_far(r_far, standoff, building.x_b)
    r_near, r_far_c = cone_radii(standoff, building.x_b, theta_b)
    ky, kz = _cells(r_far, building.y_b, building.z_b)
    if ky < 1 or kz < 1:
        return DeploymentPlan(
            Method.AUDA, theta_b, standoff, r_near, r_far_c, diagnostic="facade smaller than one cell"
        )
    uavs = []
    for k1, s1 in itertools.product(range(1, ky + 1), range(1, kz + 1)):
        cone = make_cone(building, Axis.MINUS_X, ((2 * k1 - 1) * r_far, (2 * s1 - 1) * r_far), standoff, theta_b)
        uavs.append(Uav(cone.apex, cone))
    corners = list(itertools.product(range(0, ky + 1), range(0, kz + 1)))
    interior = [c for c in corners if 0 < c[0] < ky and 0 < c[1] < kz]
    boundary = [c for c in corners if c not in interior]
    for k2, s2 in interior + (boundary if include_boundary else []):
        cone = make_cone(building, Axis.PLUS_X, (2 * k2 * r_far, 2 * s2 * r_far), standoff, theta_b)
        uavs.append(Uav(cone.apex, cone, clipped=is_clipped(cone, building)))
    return DeploymentPlan(Method.AUDA, theta_b, standoff, r_near, r_far_c, tuple(uavs), cells=ky * kz)


def plan_coverage_summary(plan: DeploymentPlan, building: BuildingDims) -> Tuple[int, float, float]:
    """(UAV count, covered volume, covered fraction); clipped cones count only their inside part."""
    vol = sum((clipped_cone_volume(u.cone, building) for u in plan.uavs), 0.0)
    return len(plan.uavs), vol, vol / building.volume


def auda_cell_fraction(building: BuildingDims, r_far: float) -> float:
    """Closed-form AUDA coverage: two truncated cones per square cell."""
    ky, kz = _cells(r_far, building.y_b, building.z_b)
    g = gamma_ratio()
    return ky * kz * (2 * math.pi / 3) * (g * g + g + 1) * r_far**2 / (building.y_b * building.z_b)


def plan_violations(plan: DeploymentPlan, building: BuildingDims, tol: float = FEAS_TOL) -> List[str]:
    """Human-readable list of broken plan invariants (empty when the plan is valid)."""
    out = []
    cones = plan.cones
    for i, j in itertools.combinations(range(len(cones)), 2):
        if not cones_disjoint(cones[i], cones[j], building):
            out.append(f"cones {i} and {j} overlap")
    for i, u in enumerate(plan.uavs):
        if u.clipped:
            continue
        w, h = facade_rect(u.cone, building)
        if not all(projection_inside(c, w, h, tol) for c in facade_projections(u.cone)):
            out.append(f"cone {i} leaves the facade rectangle")
        if abs(u.cone.theta_b - plan.theta_b) > 1e-9 or abs(u.cone.standoff - plan.standoff) > 1e-6:
            out.append(f"cone {i} does not share the plan beamwidth/standoff")
    return out
