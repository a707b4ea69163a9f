"""Scenario files: flat ``section.key = value`` lines, ``#`` comments, comma-separated lists.

Example::

    building.x_b = 30
    building.y_b = 40
    building.z_b = 60
    radio.f_ghz = 2
    run.methods = FOBS, ABS, AUDA
    run.seed = 7
    sweep.theta_b = 10, 45, 2.5     # min, max, step (degrees)
    sweep.r_far = 5, 10             # extra points, AUDA radius -> beamwidth
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .coverage import DEFAULT_SAMPLES, DEFAULT_VOXEL
from .geometry import BuildingDims, auda_offset, theta_for_r_far
from .linkbudget import DEFAULT_GRID_STEP, RadioParams
from .packing import DEFAULT_MAX_ITERS, DEFAULT_RESTARTS
from .placement import Method


class ScenarioError(ValueError):
    pass


def _float(v: str) -> float:
    x = float(v)
    if not math.isfinite(x):
        raise ValueError(f"not a finite number: {v}")
    return x


def _floats(v: str) -> Tuple[float, ...]:
    return tuple(_float(p) for p in v.split(",") if p.strip())


def _methods(v: str) -> Tuple[Method, ...]:
    return tuple(Method(p.strip().upper()) for p in v.split(",") if p.strip())


def _int(v: str) -> int:
    return int(v)


_KEYS = {
    "building.x_b": _float,
    "building.y_b": _float,
    "building.z_b": _float,
    "radio.f_ghz": _float,
    "radio.theta_b": _float,
    "radio.snr_min_db": _float,
    "radio.noise_dbm": _float,
    "radio.g_r_dir_db": _float,
    "radio.g_r_omni_db": _float,
    "radio.grf_db": _float,
    "run.methods": _methods,
    "run.seed": _int,
    "run.n_samples": _int,
    "run.voxel_size": _float,
    "sweep.theta_b": _floats,
    "sweep.theta_list": _floats,
    "sweep.r_far": _floats,
    "placement.standoff_x": _float,
    "placement.standoff_z": _float,
    "packing.restarts": _int,
    "packing.max_iters": _int,
    "power.grid_step": _float,
}

REQUIRED_RADIO = ("radio.f_ghz", "radio.snr_min_db", "radio.noise_dbm")


@dataclass(frozen=True)
class Scenario:
    building: BuildingDims
    radio: RadioParams = field(default_factory=RadioParams)
    methods: Tuple[Method, ...] = (Method.FOBS, Method.ABS, Method.AUDA)
    theta_range: Optional[Tuple[float, float, float]] = None
    theta_list: Tuple[float, ...] = ()
    r_far_list: Tuple[float, ...] = ()
    seed: int = 0
    n_samples: int = DEFAULT_SAMPLES
    voxel_size: float = DEFAULT_VOXEL
    standoff_x: Optional[float] = None
    standoff_z: Optional[float] = None
    restarts: int = DEFAULT_RESTARTS
    max_iters: int = DEFAULT_MAX_ITERS
    grid_step: float = DEFAULT_GRID_STEP
    has_radio: bool = False

    @property
    def x_standoff(self) -> float:
        return auda_offset(self.building.x_b) if self.standoff_x is None else self.standoff_x

    def sweep_thetas(self) -> List[float]:
        """Sorted, de-duplicated beamwidths (degrees) of the sweep."""
        out = list(self.theta_list)
        if self.theta_range is not None:
            lo, hi, step = self.theta_range
            n = int(math.floor((hi - lo) / step + 1e-9))
            out.extend(lo + k * step for k in range(n + 1))
        out.extend(theta_for_r_far(r, self.x_standoff, self.building.x_b) for r in self.r_far_list)
        out = sorted(out)
        dedup: List[float] = []
        for t in out:
            if not dedup or t - dedup[-1] > 1e-9:
                dedup.append(t)
        return dedup


def parse_scenario(text: str, source: str = "<scenario>") -> Scenario:
    values: Dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"{source}:{lineno}: expected 'key = value'")
        key, val = (p.strip() for p in line.split("=", 1))
        if key not in _KEYS:
            raise ScenarioError(f"{source}:{lineno}: unknown key '{key}'")
        try:
            values[key] = _KEYS[key](val)
        except ValueError as exc:
            raise ScenarioError(f"{source}:{lineno}: bad value for '{key}': {exc}") from None
    return _build(values, source)


def _build(values: Dict[str, object], source: str) -> Scenario:
    missing = [k for k in ("building.x_b", "building.y_b", "building.z_b") if k not in values]
    if missing:
        raise ScenarioError(f"{source}: missing key(s) {', '.join(missing)}")
    try:
        building = BuildingDims(values["building.x_b"], values["building.y_b"], values["building.z_b"])
        radio_kw = {k.split(".", 1)[1]: v for k, v in values.items() if k.startswith("radio.")}
        radio = RadioParams(**radio_kw)
    except ValueError as exc:
        raise ScenarioError(f"{source}: {exc}") from None
    rng = values.get("sweep.theta_b")
    if rng is not None:
        if len(rng) != 3:
            raise ScenarioError(f"{source}: sweep.theta_b needs min, max, step")
        if rng[2] <= 0 or rng[1] < rng[0]:
            raise ScenarioError(f"{source}: sweep.theta_b needs step > 0 and max >= min")
    sc = Scenario(
        building=building,
        radio=radio,
        methods=values.get("run.methods", Scenario.methods),
        theta_range=rng,
        theta_list=values.get("sweep.theta_list", ()),
        r_far_list=values.get("sweep.r_far", ()),
        seed=values.get("run.seed", 0),
        n_samples=values.get("run.n_samples", DEFAULT_SAMPLES),
        voxel_size=values.get("run.voxel_size", DEFAULT_VOXEL),
        standoff_x=values.get("placement.standoff_x"),
        standoff_z=values.get("placement.standoff_z"),
        restarts=values.get("packing.restarts", DEFAULT_RESTARTS),
        max_iters=values.get("packing.max_iters", DEFAULT_MAX_ITERS),
        grid_step=values.get("power.grid_step", DEFAULT_GRID_STEP),
        has_radio=all(k in values for k in REQUIRED_RADIO),
    )
    if not sc.methods:
        raise ScenarioError(f"{source}: run.methods is empty")
    if any(t <= 0 or t >= 180 for t in sc.sweep_thetas()):
        raise ScenarioError(f"{source}: sweep beamwidths must lie in (0, 180) degrees")
    return sc


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from None
    return parse_scenario(text, str(path))


def with_overrides(sc: Scenario, seed: Optional[int] = None, n_samples: Optional[int] = None) -> Scenario:
    kw = {}
    if seed is not None:
        kw["seed"] = seed
    if n_samples is not None:
        kw["n_samples"] = n_samples
    return replace(sc, **kw) if kw else sc
