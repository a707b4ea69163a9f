from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from uavplace.geometry import (
    Axis,
    BuildingDims,
    Facade,
    FacadeCircle,
    Point3,
    TruncatedCone,
    auda_offset,
    circles_disjoint,
    clipped_cone_volume,
    cone_from_apex,
    cone_radii,
    cones_disjoint,
    disk_rect_area,
    facade_projections,
    gamma_ratio,
    is_clipped,
    make_cone,
    point_in_cone,
    theta_for_r_far,
    truncated_cone_volume,
)

GAMMA = math.sqrt(2) - 1


class TestConstants:
    def test_gamma(self):
        assert gamma_ratio() == pytest.approx(GAMMA, abs=1e-15)
        assert gamma_ratio() == pytest.approx(0.414213562, abs=1e-9)

    def test_gamma_square_cell_identity(self):
        # large radius r, small radius g*r: r + g r equals the half diagonal of a 2r cell
        g = gamma_ratio()
        assert (1 + g) == pytest.approx(math.sqrt(2), abs=1e-15)

    @pytest.mark.parametrize("x_b, expected", [(30.0, 21.21320344), (1.0, 0.7071067812), (100.0, 70.71067812)])
    def test_auda_offset(self, x_b, expected):
        assert auda_offset(x_b) == pytest.approx(expected, rel=1e-9)

    def test_auda_offset_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            auda_offset(0.0)

    def test_offset_makes_near_radius_gamma_of_far(self):
        s = auda_offset(30.0)
        r_n, r_f = cone_radii(s, 30.0, 22.0)
        assert r_n / r_f == pytest.approx(GAMMA, rel=1e-12)


class TestConeRadii:
    def test_design_point(self):
        # beamwidth that puts the far radius at exactly 10 m on the 30 m building
        th = theta_for_r_far(10.0, auda_offset(30.0), 30.0)
        assert th == pytest.approx(22.097355869, abs=1e-8)
        r_n, r_f = cone_radii(auda_offset(30.0), 30.0, th)
        assert r_f == pytest.approx(10.0, rel=1e-12)
        assert r_n == pytest.approx(10.0 * GAMMA, rel=1e-12)

    @pytest.mark.parametrize("theta", [0.0, 180.0, -5.0, 200.0])
    def test_bad_theta(self, theta):
        with pytest.raises(ValueError):
            cone_radii(10.0, 30.0, theta)

    @given(
        st.floats(0.5, 100), st.floats(0.5, 100), st.floats(1.0, 170.0),
    )
    def test_radii_linear_in_distance(self, standoff, span, theta):
        r_n, r_f = cone_radii(standoff, span, theta)
        t = math.tan(math.radians(theta / 2))
        np.testing.assert_allclose([r_n, r_f], [standoff * t, (standoff + span) * t], rtol=1e-12)
        assert r_n < r_f

    @given(st.floats(0.1, 50), st.floats(0.5, 100), st.floats(0.5, 100))
    def test_theta_roundtrip(self, r_far, standoff, span):
        th = theta_for_r_far(r_far, standoff, span)
        assert cone_radii(standoff, span, th)[1] == pytest.approx(r_far, rel=1e-10)


class TestVolume:
    def test_frozen_value(self):
        r_f = 10.0
        r_n = GAMMA * r_f
        assert truncated_cone_volume(30.0, r_n, r_f) == pytest.approx(4981.895, abs=1e-3)

    def test_cylinder_limit(self):
        assert truncated_cone_volume(2.0, 3.0, 3.0) == pytest.approx(math.pi * 9 * 2)

    def test_matches_slice_integral(self):
        span, r_n, r_f = 17.0, 2.5, 7.25
        s = np.linspace(0, span, 200_001)
        r = r_n + (r_f - r_n) * s / span
        numeric = np.trapezoid(math.pi * r * r, s)
        assert truncated_cone_volume(span, r_n, r_f) == pytest.approx(numeric, rel=1e-9)

    @pytest.mark.parametrize("args", [(0.0, 1.0, 2.0), (1.0, 0.0, 2.0), (1.0, 3.0, 2.0)])
    def test_rejects_bad_input(self, args):
        with pytest.raises(ValueError):
            truncated_cone_volume(*args)


class TestCone:
    def test_make_cone_x(self, highrise):
        c = make_cone(highrise, Axis.PLUS_X, (20.0, 30.0), auda_offset(30.0), 22.097355869)
        assert c.apex.x == pytest.approx(-auda_offset(30.0))
        assert (c.near_plane, c.far_plane) == (0.0, 30.0)
        assert c.r_far == pytest.approx(10.0, rel=1e-9)
        assert c.span == 30.0
        assert c.standoff == pytest.approx(auda_offset(30.0))

    def test_make_cone_minus_x(self, highrise):
        c = make_cone(highrise, Axis.MINUS_X, (10.0, 10.0), 5.0, 30.0)
        assert c.apex.x == pytest.approx(35.0)
        assert (c.near_plane, c.far_plane) == (30.0, 0.0)
        assert c.radius_at(30.0) == pytest.approx(c.r_near)
        assert c.radius_at(0.0) == pytest.approx(c.r_far)

    def test_make_cone_roof(self, highrise):
        c = make_cone(highrise, Axis.MINUS_Z, (15.0, 20.0), 10.0, 20.0)
        assert c.apex == Point3(15.0, 20.0, 70.0)
        assert c.axis.family == "z"
        assert c.span == 60.0

    def test_from_apex_roundtrip(self, highrise):
        c = make_cone(highrise, Axis.MINUS_X, (12.0, 41.0), 7.0, 18.0)
        d = cone_from_apex(highrise, c.axis, c.apex, c.half_angle)
        assert d == c

    def test_from_apex_wrong_side(self, highrise):
        with pytest.raises(ValueError):
            cone_from_apex(highrise, Axis.PLUS_X, Point3(3.0, 10.0, 10.0), 10.0)

    def test_inconsistent_radii_rejected(self):
        with pytest.raises(ValueError):
            TruncatedCone(Axis.PLUS_X, Point3(-10, 0, 0), 10.0, 0.0, 30.0, (0.0, 0.0), 1.0, 2.0)

    def test_foot_off_axis_rejected(self, highrise):
        c = make_cone(highrise, Axis.PLUS_X, (5.0, 5.0), 10.0, 20.0)
        with pytest.raises(ValueError):
            TruncatedCone(c.axis, c.apex, c.half_angle, c.near_plane, c.far_plane, (6.0, 5.0), c.r_near, c.r_far)

    def test_membership(self, highrise):
        c = make_cone(highrise, Axis.PLUS_X, (20.0, 30.0), 10.0, 20.0)
        r_mid = c.radius_at(15.0)
        assert point_in_cone(c, Point3(15.0, 20.0 + r_mid * 0.999, 30.0), highrise)
        assert not point_in_cone(c, Point3(15.0, 20.0 + r_mid * 1.001, 30.0), highrise)
        # outside the building slab
        assert not point_in_cone(c, Point3(-1.0, 20.0, 30.0), highrise)

    def test_contains_vectorised_shape(self, highrise):
        c = make_cone(highrise, Axis.MINUS_Z, (15.0, 20.0), 10.0, 20.0)
        pts = np.zeros((4, 5, 3)) + [15.0, 20.0, 30.0]
        assert c.contains(pts, highrise).shape == (4, 5)
        assert c.contains(pts, highrise).all()


class TestProjections:
    def test_plus_x(self, highrise):
        c = make_cone(highrise, Axis.PLUS_X, (20.0, 30.0), 10.0, 20.0)
        a, b = facade_projections(c)
        assert a.facade is Facade.A and b.facade is Facade.B
        assert a.radius == pytest.approx(c.r_near)
        assert b.radius == pytest.approx(c.r_far)
        assert a.center == b.center == (20.0, 30.0)

    def test_minus_x_is_reversed(self, highrise):
        c = make_cone(highrise, Axis.MINUS_X, (20.0, 30.0), 10.0, 20.0)
        first, second = facade_projections(c)
        assert first.facade is Facade.B and first.radius == pytest.approx(c.r_near)
        assert second.facade is Facade.A and second.radius == pytest.approx(c.r_far)

    def test_roof(self, highrise):
        c = make_cone(highrise, Axis.MINUS_Z, (15.0, 20.0), 10.0, 20.0)
        assert [p.facade for p in facade_projections(c)] == [Facade.ROOF, Facade.FLOOR]

    def test_circles_disjoint_tangent(self):
        a = FacadeCircle(Facade.A, (0.0, 0.0), 1.0)
        b = FacadeCircle(Facade.A, (2.0, 0.0), 1.0)
        assert circles_disjoint(a, b)
        assert not circles_disjoint(a, FacadeCircle(Facade.A, (1.99, 0.0), 1.0))


class TestConesDisjoint:
    def test_auda_opposite_cones_tangent_everywhere(self, highrise):
        s = auda_offset(30.0)
        th = theta_for_r_far(10.0, s, 30.0)
        big = make_cone(highrise, Axis.MINUS_X, (10.0, 10.0), s, th)
        small = make_cone(highrise, Axis.PLUS_X, (20.0, 20.0), s, th)
        assert cones_disjoint(big, small)
        # radius sum is the same at every depth, and equals the foot distance
        xs = np.linspace(0, 30, 7)
        np.testing.assert_allclose(big.radius_at(xs) + small.radius_at(xs), math.hypot(10, 10), rtol=1e-12)

    def test_same_axis_overlap(self, highrise):
        a = make_cone(highrise, Axis.PLUS_X, (10.0, 10.0), 10.0, 20.0)
        b = make_cone(highrise, Axis.PLUS_X, (10.0 + a.r_far * 1.5, 10.0), 10.0, 20.0)
        assert not cones_disjoint(a, b)

    def test_cross_family_needs_building(self, highrise):
        a = make_cone(highrise, Axis.PLUS_X, (10.0, 10.0), 10.0, 20.0)
        b = make_cone(highrise, Axis.MINUS_Z, (15.0, 20.0), 10.0, 20.0)
        with pytest.raises(ValueError):
            cones_disjoint(a, b)
        assert not cones_disjoint(a, b, highrise)

    def test_cross_family_far_apart(self):
        b = BuildingDims(30.0, 200.0, 60.0)
        a = make_cone(b, Axis.PLUS_X, (10.0, 10.0), 5.0, 10.0)
        c = make_cone(b, Axis.MINUS_Z, (15.0, 180.0), 5.0, 10.0)
        assert cones_disjoint(a, c, b)


def _mc_disk_rect(cx, cy, r, w, h, n=400_000, seed=3):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1, 1, size=(n, 2)) * r
    keep = (pts**2).sum(axis=1) <= r * r
    p = pts[keep] + [cx, cy]
    inside = (p[:, 0] >= 0) & (p[:, 0] <= w) & (p[:, 1] >= 0) & (p[:, 1] <= h)
    return math.pi * r * r * inside.mean()


class TestDiskRectArea:
    @pytest.mark.parametrize(
        "cx, cy, r, frac",
        [
            (20.0, 30.0, 5.0, 1.0),   # fully inside
            (0.0, 30.0, 5.0, 0.5),    # on an edge
            (0.0, 0.0, 5.0, 0.25),    # on a corner
            (40.0, 60.0, 5.0, 0.25),  # opposite corner
            (-5.0, 30.0, 5.0, 0.0),   # tangent outside
        ],
    )
    def test_exact_fractions(self, cx, cy, r, frac):
        assert disk_rect_area(cx, cy, r, 40.0, 60.0) == pytest.approx(frac * math.pi * r * r, abs=1e-9)

    @pytest.mark.parametrize(
        "cx, cy, r",
        [(1.0, 2.0, 4.0), (39.0, 3.0, 6.0), (-2.0, 10.0, 5.0), (5.0, 5.0, 30.0), (20.0, -3.0, 7.0)],
    )
    def test_against_sampling(self, cx, cy, r):
        exact = disk_rect_area(cx, cy, r, 40.0, 60.0)
        assert exact == pytest.approx(_mc_disk_rect(cx, cy, r, 40.0, 60.0), abs=0.01 * math.pi * r * r)

    def test_disk_larger_than_rect(self):
        assert disk_rect_area(2.0, 2.0, 100.0, 4.0, 4.0) == pytest.approx(16.0)

    @given(
        st.floats(-20, 60), st.floats(-20, 80), st.floats(0.1, 40),
    )
    def test_bounds(self, cx, cy, r):
        a = disk_rect_area(cx, cy, r, 40.0, 60.0)
        assert -1e-9 <= a <= min(math.pi * r * r, 2400.0) + 1e-9

    @given(st.floats(0, 40), st.floats(0, 60), st.floats(0.1, 20))
    def test_mirror_symmetry(self, cx, cy, r):
        a = disk_rect_area(cx, cy, r, 40.0, 60.0)
        assert disk_rect_area(40.0 - cx, cy, r, 40.0, 60.0) == pytest.approx(a, abs=1e-7)
        assert disk_rect_area(cx, 60.0 - cy, r, 40.0, 60.0) == pytest.approx(a, abs=1e-7)


class TestClippedVolume:
    def test_unclipped_equals_formula(self, highrise):
        c = make_cone(highrise, Axis.PLUS_X, (20.0, 30.0), 10.0, 20.0)
        assert not is_clipped(c, highrise)
        assert clipped_cone_volume(c, highrise) == pytest.approx(truncated_cone_volume(30.0, c.r_near, c.r_far))

    @pytest.mark.parametrize("foot, frac", [((0.0, 0.0), 0.25), ((0.0, 30.0), 0.5), ((40.0, 60.0), 0.25)])
    def test_corner_and_edge(self, highrise, foot, frac):
        c = make_cone(highrise, Axis.PLUS_X, foot, 10.0, 20.0)
        assert is_clipped(c, highrise)
        full = truncated_cone_volume(30.0, c.r_near, c.r_far)
        assert clipped_cone_volume(c, highrise) == pytest.approx(frac * full, rel=1e-9)

    def test_against_sampling(self, highrise):
        c = make_cone(highrise, Axis.MINUS_Z, (3.0, 5.0), 10.0, 20.0)
        rng = np.random.default_rng(11)
        pts = rng.random((400_000, 3)) * highrise.dims
        est = c.contains(pts, highrise).mean() * highrise.volume
        assert clipped_cone_volume(c, highrise) == pytest.approx(est, rel=0.03)
