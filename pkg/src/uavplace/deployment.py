"""Deployment documents: JSON files describing a plan, readable back into cones.

Layout (``schema_version`` 1)::

    {
      "schema_version": 1,
      "method": "AUDA",
      "building": {"x_b": 30, "y_b": 40, "z_b": 60},
      "parameters": {"theta_b_deg": ..., "standoff_m": ..., "r_near_m": ..., "r_far_m": ..., "cells": 6},
      "uavs": [
        {"position": [x, y, z], "axis": "+x", "half_angle_deg": ..., "axis_foot": [u, v],
         "r_near_m": ..., "r_far_m": ..., "clipped": false},
        ...
      ],
      "extra_uavs": [...],            # optional, same entries; full-coverage UAVs on other channels
      "coverage": {"n_uavs": 18, "covered_volume_m3": ..., "fraction": ...},
      "diagnostic": null
    }

Keys are sorted and every float is written with 9 significant digits so the
same plan always serialises to the same bytes.  On load the cones are rebuilt
from ``position``, ``axis`` and ``half_angle_deg``; the other per-UAV numbers
are informative.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, List, Optional, Sequence, Tuple

from .geometry import Axis, BuildingDims, Point3, TruncatedCone, cone_from_apex, is_clipped
from .placement import DeploymentPlan, Method, Uav, plan_coverage_summary

SCHEMA_VERSION = 1
SIG_DIGITS = 9


class SchemaError(ValueError):
    """Malformed deployment document; ``key`` is the dotted path of the offending entry."""

    def __init__(self, key: str, msg: str):
        super().__init__(f"{key}: {msg}")
        self.key = key


def _round(obj: Any) -> Any:
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError("cannot serialise a non-finite number")
        return float(f"{obj:.{SIG_DIGITS}g}") + 0.0
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    raise TypeError(f"unsupported type {type(obj).__name__}")


def dumps(doc: dict) -> str:
    """Canonical JSON text (sorted keys, 9 significant digits, trailing newline)."""
    return json.dumps(_round(doc), sort_keys=True, indent=2) + "\n"


def _cone_entry(cone: TruncatedCone, clipped: bool) -> dict:
    return {
        "position": list(cone.apex.as_array().tolist()),
        "axis": cone.axis.value,
        "half_angle_deg": cone.half_angle,
        "axis_foot": list(cone.axis_foot),
        "r_near_m": cone.r_near,
        "r_far_m": cone.r_far,
        "clipped": clipped,
    }


def plan_document(
    plan: DeploymentPlan,
    building: BuildingDims,
    extra: Optional[Sequence[TruncatedCone]] = None,
) -> dict:
    n, vol, frac = plan_coverage_summary(plan, building)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "method": plan.method.value,
        "building": {"x_b": building.x_b, "y_b": building.y_b, "z_b": building.z_b},
        "parameters": {
            "theta_b_deg": plan.theta_b,
            "standoff_m": plan.standoff,
            "r_near_m": plan.r_near,
            "r_far_m": plan.r_far,
            "cells": plan.cells,
        },
        "uavs": [_cone_entry(u.cone, u.clipped) for u in plan.uavs],
        "coverage": {"n_uavs": n, "covered_volume_m3": vol, "fraction": frac},
        "diagnostic": plan.diagnostic,
    }
    if extra is not None:
        doc["extra_uavs"] = [_cone_entry(c, is_clipped(c, building)) for c in extra]
    return doc


def _get(d: Any, key: str, path: str, kind) -> Any:
    if not isinstance(d, dict) or key not in d:
        raise SchemaError(f"{path}{key}", "missing")
    v = d[key]
    ok = isinstance(v, kind) and not (kind in (int, float, (int, float)) and isinstance(v, bool))
    if not ok:
        raise SchemaError(f"{path}{key}", f"expected {getattr(kind, '__name__', 'number')}")
    return v


def _number(d: Any, key: str, path: str) -> float:
    v = float(_get(d, key, path, (int, float)))
    if not math.isfinite(v):
        raise SchemaError(f"{path}{key}", "not finite")
    return v


def _vector(d: Any, key: str, path: str, n: int) -> List[float]:
    v = _get(d, key, path, list)
    if len(v) != n or not all(isinstance(a, (int, float)) and not isinstance(a, bool) for a in v):
        raise SchemaError(f"{path}{key}", f"expected {n} numbers")
    return [float(a) for a in v]


def _read_cone(entry: Any, path: str, building: BuildingDims) -> Tuple[TruncatedCone, bool]:
    if not isinstance(entry, dict):
        raise SchemaError(path.rstrip("."), "expected an object")
    pos = _vector(entry, "position", path, 3)
    try:
        axis = Axis(_get(entry, "axis", path, str))
    except ValueError:
        raise SchemaError(f"{path}axis", "expected one of +x, -x, -z") from None
    half = _number(entry, "half_angle_deg", path)
    if not 0 < half < 90:
        raise SchemaError(f"{path}half_angle_deg", "must lie in (0, 90)")
    clipped = _get(entry, "clipped", path, bool) if "clipped" in entry else False
    try:
        cone = cone_from_apex(building, axis, Point3(*pos), half)
    except ValueError as exc:
        raise SchemaError(f"{path}position", str(exc)) from None
    return cone, clipped


def parse_document(doc: Any) -> Tuple[DeploymentPlan, BuildingDims, Optional[List[TruncatedCone]]]:
    """Plan, building and (if present) extra cones from a decoded deployment document."""
    if not isinstance(doc, dict):
        raise SchemaError("<root>", "expected an object")
    version = _get(doc, "schema_version", "", int)
    if version != SCHEMA_VERSION:
        raise SchemaError("schema_version", f"unsupported version {version}")
    try:
        method = Method(_get(doc, "method", "", str))
    except ValueError:
        raise SchemaError("method", "expected FOBS, ABS or AUDA") from None
    b = _get(doc, "building", "", dict)
    try:
        building = BuildingDims(*(_number(b, k, "building.") for k in ("x_b", "y_b", "z_b")))
    except ValueError as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError("building", str(exc)) from None
    p = _get(doc, "parameters", "", dict)
    theta_b = _number(p, "theta_b_deg", "parameters.")
    standoff = _number(p, "standoff_m", "parameters.")
    r_near = _number(p, "r_near_m", "parameters.")
    r_far = _number(p, "r_far_m", "parameters.")
    cells = _get(p, "cells", "parameters.", int) if "cells" in p else 0
    uavs = []
    for i, e in enumerate(_get(doc, "uavs", "", list)):
        cone, clipped = _read_cone(e, f"uavs[{i}].", building)
        uavs.append(Uav(cone.apex, cone, clipped))
    extra = None
    if "extra_uavs" in doc:
        extra = [_read_cone(e, f"extra_uavs[{i}].", building)[0] for i, e in enumerate(_get(doc, "extra_uavs", "", list))]
    diag = doc.get("diagnostic")
    if diag is not None and not isinstance(diag, str):
        raise SchemaError("diagnostic", "expected a string or null")
    plan = DeploymentPlan(method, theta_b, standoff, r_near, r_far, tuple(uavs), cells, diag)
    return plan, building, extra


def load_deployment(path) -> Tuple[DeploymentPlan, BuildingDims, Optional[List[TruncatedCone]]]:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise SchemaError("<file>", f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError("<root>", f"invalid JSON: {exc}") from None
    return parse_document(doc)


def save_deployment(path, plan: DeploymentPlan, building: BuildingDims, extra=None) -> str:
    text = dumps(plan_document(plan, building, extra))
    Path(path).write_text(text)
    return text
