"""Command line: ``uavplace plan | sweep | power | evaluate``.

Exit codes: 0 success, 2 configuration or input error, 3 infeasible geometry
(the plan document is still written, with its ``diagnostic`` set).

Sweep CSV columns, in this order::

    method, theta_b_deg, r_far_m, n_uavs, analytic_fraction, mc_fraction, mc_ci95

Power CSV columns::

    index, role, axis, x_m, y_m, z_m, theta_b_deg, p_min_dbm, p_min_mw

followed by one ``TOTAL`` row carrying the plan total in mW.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import List, Optional, Sequence

from . import deployment
from .coverage import augment_full_coverage, find_holes, mc_coverage
from .geometry import BuildingDims, TruncatedCone, auda_offset, cone_radii, theta_for_r_far
from .linkbudget import dbm_to_mw, min_tx_power_dbm
from .placement import DeploymentPlan, Method, plan_abs, plan_auda, plan_coverage_summary, plan_fobs
from .scenario import Scenario, ScenarioError, load_scenario, with_overrides

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3

SWEEP_COLUMNS = ("method", "theta_b_deg", "r_far_m", "n_uavs", "analytic_fraction", "mc_fraction", "mc_ci95")
POWER_COLUMNS = ("index", "role", "axis", "x_m", "y_m", "z_m", "theta_b_deg", "p_min_dbm", "p_min_mw")
TOP_HOLES = 20


def _fmt(x: float) -> str:
    return f"{x + 0.0:.{deployment.SIG_DIGITS}g}"


def _z_standoff(sc: Scenario) -> float:
    return auda_offset(sc.building.z_b) if sc.standoff_z is None else sc.standoff_z


def theta_from_r_far(sc: Scenario, method: Method, r_far: float) -> float:
    """Beamwidth giving far-facade radius ``r_far`` for the given method's geometry."""
    b = sc.building
    if method is Method.ABS:
        return theta_for_r_far(r_far, _z_standoff(sc), b.z_b)
    standoff = auda_offset(b.x_b) if method is Method.AUDA else sc.x_standoff
    return theta_for_r_far(r_far, standoff, b.x_b)


def r_far_from_theta(sc: Scenario, method: Method, theta_b: float) -> float:
    b = sc.building
    if method is Method.ABS:
        return cone_radii(_z_standoff(sc), b.z_b, theta_b)[1]
    standoff = auda_offset(b.x_b) if method is Method.AUDA else sc.x_standoff
    return cone_radii(standoff, b.x_b, theta_b)[1]


def build_plan(
    sc: Scenario, method: Method, theta_b: Optional[float] = None, r_far: Optional[float] = None
) -> DeploymentPlan:
    """Run one planner; exactly one of ``theta_b`` (degrees) and ``r_far`` (m) is given."""
    if (theta_b is None) == (r_far is None):
        raise ScenarioError("give exactly one of the beamwidth and the far radius")
    method = Method(method)
    if method is Method.AUDA:
        if r_far is None:
            r_far = r_far_from_theta(sc, method, theta_b)
        return plan_auda(sc.building, r_far)
    if theta_b is None:
        theta_b = theta_from_r_far(sc, method, r_far)
    if not 0 < theta_b < 180:
        raise ScenarioError(f"beamwidth {theta_b} outside (0, 180) degrees")
    kw = dict(seed=sc.seed, restarts=sc.restarts, max_iters=sc.max_iters)
    if method is Method.FOBS:
        return plan_fobs(sc.building, theta_b, sc.standoff_x, **kw)
    return plan_abs(sc.building, theta_b, sc.standoff_z, **kw)


@dataclass(frozen=True)
class SweepRow:
    method: Method
    theta_b_deg: float
    r_far_m: float
    n_uavs: int
    analytic_fraction: float
    mc_fraction: Optional[float] = None
    mc_ci95: Optional[float] = None

    def cells(self) -> List[str]:
        opt = lambda v: "" if v is None else _fmt(v)  # noqa: E731
        return [
            self.method.value,
            _fmt(self.theta_b_deg),
            _fmt(self.r_far_m),
            str(self.n_uavs),
            _fmt(self.analytic_fraction),
            opt(self.mc_fraction),
            opt(self.mc_ci95),
        ]


def _sweep_point(args) -> SweepRow:
    sc, method, theta = args
    plan = build_plan(sc, method, theta_b=theta)
    n, _, frac = plan_coverage_summary(plan, sc.building)
    mc = hw = None
    if sc.n_samples > 0:
        rep = mc_coverage(plan, sc.building, sc.n_samples, sc.seed)
        mc, hw = rep.mc_fraction, rep.mc_halfwidth_95
    return SweepRow(method, theta, plan.r_far, n, frac, mc, hw)


def run_sweep(sc: Scenario, workers: int = 1) -> List[SweepRow]:
    """Rows ordered by method (scenario order) then beamwidth; ``n_samples = 0`` skips sampling."""
    thetas = sc.sweep_thetas()
    if not thetas:
        raise ScenarioError("the sweep is empty; set sweep.theta_b, sweep.theta_list or sweep.r_far")
    jobs = [(sc, m, t) for m in sc.methods for t in thetas]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_point, jobs))
    return [_sweep_point(j) for j in jobs]


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    return _csv_text(SWEEP_COLUMNS, [r.cells() for r in rows])


def power_table(
    plan: DeploymentPlan,
    building: BuildingDims,
    sc: Scenario,
    extra: Optional[Sequence[TruncatedCone]] = None,
) -> str:
    if not sc.has_radio:
        raise ScenarioError("power needs radio.f_ghz, radio.snr_min_db and radio.noise_dbm in the scenario")
    entries = [("base", c) for c in plan.cones] + [("extra", c) for c in (extra or [])]
    rows, total = [], 0.0
    for i, (role, cone) in enumerate(entries):
        dbm = min_tx_power_dbm(cone, building, sc.radio, sc.grid_step)
        mw = dbm_to_mw(dbm)
        total += mw
        rows.append([str(i), role, cone.axis.value, *(_fmt(v) for v in cone.apex.as_array()),
                     _fmt(cone.theta_b), _fmt(dbm), _fmt(mw)])
    rows.append(["TOTAL", "", "", "", "", "", "", "", _fmt(total)])
    return _csv_text(POWER_COLUMNS, rows)


def evaluate_report(plan: DeploymentPlan, building: BuildingDims, sc: Scenario) -> dict:
    rep = mc_coverage(plan, building, sc.n_samples, sc.seed)
    holes = find_holes(plan, building, sc.voxel_size)
    largest = sorted(holes.components, key=lambda c: (-c.voxels, c.bbox_min, c.bbox_max))[:TOP_HOLES]
    return {
        "schema_version": deployment.SCHEMA_VERSION,
        "method": plan.method.value,
        "seed": rep.seed,
        "n_samples": rep.n_samples,
        "coverage": {
            "analytic_fraction": rep.analytic_fraction,
            "mc_fraction": rep.mc_fraction,
            "mc_halfwidth_95": rep.mc_halfwidth_95,
            "overlap_violations": rep.overlap_violations,
        },
        "holes": {
            "voxel_size_m": holes.voxel_size,
            "total_voxels": holes.total_voxels,
            "uncovered_voxels": holes.uncovered_voxels,
            "uncovered_fraction": holes.uncovered_fraction,
            "components": len(holes.components),
            "largest": [
                {"voxels": c.voxels, "bbox_min": list(c.bbox_min), "bbox_max": list(c.bbox_max)} for c in largest
            ],
        },
    }


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _scenario(args) -> Scenario:
    sc = load_scenario(args.scenario)
    return with_overrides(sc, seed=args.seed, n_samples=getattr(args, "samples", None))


def _extras(plan, building, stored, sc: Scenario) -> List[TruncatedCone]:
    if stored is not None:
        return list(stored)
    return augment_full_coverage(plan, building, sc.voxel_size)[1]


def _cmd_plan(args) -> int:
    sc = _scenario(args)
    method = Method(args.method) if args.method else sc.methods[0]
    plan = build_plan(sc, method, theta_b=args.theta_b, r_far=args.r_far)
    extra = augment_full_coverage(plan, sc.building, sc.voxel_size)[1] if args.full_coverage else None
    _emit(deployment.dumps(deployment.plan_document(plan, sc.building, extra)), args.out)
    if not plan.uavs:
        print(f"infeasible: {plan.diagnostic}", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def _cmd_sweep(args) -> int:
    sc = _scenario(args)
    if args.method:
        sc = replace(sc, methods=(Method(args.method),))
    _emit(sweep_csv(run_sweep(sc, args.workers)), args.out)
    return EXIT_OK


def _check_building(sc: Scenario, building: BuildingDims) -> None:
    if sc.building != building:
        raise ScenarioError("the deployment's building differs from the scenario's")


def _cmd_power(args) -> int:
    sc = _scenario(args)
    plan, building, stored = deployment.load_deployment(args.deployment)
    _check_building(sc, building)
    extra = _extras(plan, building, stored, sc) if args.full_coverage else None
    _emit(power_table(plan, building, sc, extra), args.out)
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    sc = _scenario(args)
    plan, building, _ = deployment.load_deployment(args.deployment)
    _check_building(sc, building)
    _emit(deployment.dumps(evaluate_report(plan, building, sc)), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="uavplace", description="Place directional-antenna UAVs around a building.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, samples=False):
        sp.add_argument("--scenario", required=True, help="scenario file (key = value lines)")
        sp.add_argument("--seed", type=int, help="overrides run.seed")
        sp.add_argument("--out", help="output file (default: stdout)")
        if samples:
            sp.add_argument("--samples", type=int, help="overrides run.n_samples")

    sp = sub.add_parser("plan", help="write a deployment document")
    common(sp)
    sp.add_argument("--method", choices=[m.value for m in Method], type=str.upper)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--theta-b", type=float, help="beamwidth in degrees")
    g.add_argument("--r-far", type=float, help="far-facade cone radius in metres")
    sp.add_argument("--full-coverage", action="store_true", help="also store hole-filling UAVs")
    sp.set_defaults(func=_cmd_plan)

    sp = sub.add_parser("sweep", help="coverage and UAV count over a beamwidth sweep (CSV)")
    common(sp, samples=True)
    sp.add_argument("--method", choices=[m.value for m in Method], type=str.upper)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=_cmd_sweep)

    sp = sub.add_parser("power", help="per-UAV minimum transmit power (CSV)")
    common(sp)
    sp.add_argument("deployment")
    sp.add_argument("--full-coverage", action="store_true", help="include hole-filling UAVs")
    sp.set_defaults(func=_cmd_power)

    sp = sub.add_parser("evaluate", help="sampled coverage and holes of a deployment (JSON)")
    common(sp, samples=True)
    sp.add_argument("deployment")
    sp.set_defaults(func=_cmd_evaluate)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return args.func(args)
    except (ScenarioError, deployment.SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
