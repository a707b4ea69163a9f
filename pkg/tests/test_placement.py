from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uavplace.geometry import Axis, BuildingDims, auda_offset, gamma_ratio, truncated_cone_volume
from uavplace.placement import (
    Method,
    auda_cell_fraction,
    plan_abs,
    plan_auda,
    plan_coverage_summary,
    plan_fobs,
    plan_violations,
)

GAMMA = math.sqrt(2) - 1
AUDA_FRACTION = math.pi / 6 * (GAMMA**2 + GAMMA + 1)


class TestAuda:
    def test_design_plan(self, highrise):
        plan = plan_auda(highrise, 10.0)
        assert plan.method is Method.AUDA
        assert plan.cells == 6
        assert plan.r_far == pytest.approx(10.0)
        assert plan.r_near == pytest.approx(10.0 * GAMMA)
        assert plan.theta_b == pytest.approx(22.097355869, abs=1e-8)
        # 6 cell centres on side B, 2 interior corners and 10 clipped boundary corners on side A
        axes = [u.cone.axis for u in plan.uavs]
        assert axes.count(Axis.MINUS_X) == 6
        assert axes.count(Axis.PLUS_X) == 12
        assert sum(u.clipped for u in plan.uavs) == 10
        assert len(plan) == 18

    def test_design_fraction(self, highrise):
        n, vol, frac = plan_coverage_summary(plan_auda(highrise, 10.0), highrise)
        assert frac == pytest.approx(AUDA_FRACTION, rel=1e-9)
        assert vol == pytest.approx(12 * truncated_cone_volume(30.0, 10 * GAMMA, 10.0), rel=1e-9)

    def test_without_boundary(self, highrise):
        plan = plan_auda(highrise, 10.0, include_boundary=False)
        assert len(plan) == 8
        assert not any(u.clipped for u in plan.uavs)

    def test_standoff(self, highrise):
        plan = plan_auda(highrise, 10.0)
        for u in plan.uavs:
            assert u.cone.standoff == pytest.approx(auda_offset(30.0))
            assert abs(u.position.x - 15.0) == pytest.approx(15.0 + auda_offset(30.0))

    def test_no_overlaps(self, highrise):
        assert plan_violations(plan_auda(highrise, 10.0), highrise) == []

    @pytest.mark.parametrize("k", range(1, 11))
    def test_cell_formula(self, highrise, k):
        r = 10.0 / k
        frac = plan_coverage_summary(plan_auda(highrise, r), highrise)[2]
        assert frac == pytest.approx(auda_cell_fraction(highrise, r), rel=1e-9)
        assert frac == pytest.approx(AUDA_FRACTION, rel=1e-9)

    def test_facade_too_small(self):
        plan = plan_auda(BuildingDims(30, 5, 5), 10.0)
        assert len(plan) == 0
        assert plan.diagnostic == "facade smaller than one cell"

    def test_bad_radius(self, highrise):
        with pytest.raises(ValueError):
            plan_auda(highrise, 0.0)

    @settings(max_examples=25)
    @given(st.floats(2.0, 19.0))
    def test_non_tiling_radii_valid(self, r):
        b = BuildingDims(30.0, 40.0, 60.0)
        plan = plan_auda(b, r)
        assert plan_violations(plan, b) == []
        frac = plan_coverage_summary(plan, b)[2]
        # boundary cones can only add to the two-cones-per-cell volume
        assert frac >= auda_cell_fraction(b, r) - 1e-9


class TestFobs:
    def test_design_plan(self, highrise):
        th = 22.097355869
        plan = plan_fobs(highrise, th, seed=0)
        assert len(plan) == 6
        assert all(u.cone.axis is Axis.PLUS_X for u in plan.uavs)
        assert plan_violations(plan, highrise) == []
        frac = plan_coverage_summary(plan, highrise)[2]
        assert frac == pytest.approx(AUDA_FRACTION / 2, rel=1e-6)

    def test_too_wide(self, highrise):
        plan = plan_fobs(highrise, 60.0)
        assert len(plan) == 0
        assert plan.diagnostic == "no circle fits"
        assert plan_coverage_summary(plan, highrise) == (0, 0.0, 0.0)

    def test_custom_standoff(self, highrise):
        plan = plan_fobs(highrise, 20.0, standoff=5.0)
        assert all(u.cone.standoff == pytest.approx(5.0) for u in plan.uavs)
        assert plan_violations(plan, highrise) == []

    @pytest.mark.parametrize("theta", [10.0, 15.0, 25.0, 35.0])
    def test_below_half(self, highrise, theta):
        frac = plan_coverage_summary(plan_fobs(highrise, theta), highrise)[2]
        assert frac < 0.5


class TestAbs:
    def test_plan(self, highrise):
        plan = plan_abs(highrise, 11.1523524)
        assert len(plan) == 2
        assert all(u.cone.axis is Axis.MINUS_Z for u in plan.uavs)
        assert plan.standoff == pytest.approx(auda_offset(60.0))
        assert plan_violations(plan, highrise) == []
        assert plan_coverage_summary(plan, highrise)[2] < 0.5

    def test_too_wide(self, highrise):
        assert len(plan_abs(highrise, 40.0)) == 0


class TestViolations:
    def test_detects_overlap(self, highrise):
        plan = plan_auda(highrise, 10.0)
        first = plan.uavs[0]
        broken = replace(plan, uavs=plan.uavs + (first,))
        assert any("overlap" in v for v in plan_violations(broken, highrise))


def test_cell_fraction_closed_form(highrise):
    g = gamma_ratio()
    expected = 6 * (2 * math.pi / 3) * (g * g + g + 1) * 100 / (40 * 60)
    assert auda_cell_fraction(highrise, 10.0) == pytest.approx(expected, rel=1e-12)
    np.testing.assert_allclose(expected, 0.8303158371, atol=1e-10)
