"""Placement of directional-antenna UAVs around a rectangular building for indoor coverage."""

from .geometry import (
    Axis,
    BuildingDims,
    Facade,
    FacadeCircle,
    Point3,
    TruncatedCone,
    auda_offset,
    cone_radii,
    cones_disjoint,
    facade_projections,
    gamma_ratio,
    make_cone,
    point_in_cone,
    truncated_cone_volume,
)
from .linkbudget import RadioParams, min_tx_power_dbm, path_loss_db, total_tx_power_mw
from .packing import PackingInstance, PackingSolution, max_circles, packing_decision
from .placement import DeploymentPlan, Method, Uav, plan_abs, plan_auda, plan_coverage_summary, plan_fobs
from .coverage import (
    CoverageReport,
    HoleSet,
    augment_full_coverage,
    facade_coverage_index,
    find_holes,
    mc_coverage,
)

__version__ = "0.1.0"

__all__ = [
    "Axis",
    "BuildingDims",
    "CoverageReport",
    "DeploymentPlan",
    "Facade",
    "FacadeCircle",
    "HoleSet",
    "Method",
    "PackingInstance",
    "PackingSolution",
    "Point3",
    "RadioParams",
    "TruncatedCone",
    "Uav",
    "auda_offset",
    "augment_full_coverage",
    "cone_radii",
    "cones_disjoint",
    "facade_coverage_index",
    "facade_projections",
    "find_holes",
    "gamma_ratio",
    "make_cone",
    "max_circles",
    "mc_coverage",
    "min_tx_power_dbm",
    "packing_decision",
    "path_loss_db",
    "plan_abs",
    "plan_auda",
    "plan_coverage_summary",
    "plan_fobs",
    "point_in_cone",
    "total_tx_power_mw",
    "truncated_cone_volume",
]
