"""Outdoor-to-indoor link budget between a UAV and users inside the building.

Path loss is the sum of free-space loss, building penetration loss and a
linear indoor loss:

    L = (20 log10 d3d + 20 log10 f_GHz + 32.4) + (14 + 15 (1 - cos th)^2) + 0.5 d2d

with ``th`` the angle between the UAV->user ray and the inward facade normal
and ``d2d`` the user's perpendicular depth behind the penetrated facade.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np

from .geometry import Axis, BuildingDims, Facade, Point3, TruncatedCone

W_LOG = 20.0
G1 = 32.4
G2 = 14.0
G3 = 15.0
G4 = 0.5

DEFAULT_GRID_STEP = 0.5
# rim points within this distance of the cone surface are kept, so a cone
# re-read from a rounded deployment file samples the same points
_RIM_TOL = 1e-6

# inward normal and penetrated facade per cone axis
_FACADE_OF_AXIS = {Axis.PLUS_X: Facade.A, Axis.MINUS_X: Facade.B, Axis.MINUS_Z: Facade.ROOF}


@dataclass(frozen=True)
class RadioParams:
    f_ghz: float = 2.0
    theta_b: float = 60.0
    snr_min_db: float = 25.0
    noise_dbm: float = -120.0
    g_r_dir_db: float = 14.4
    g_r_omni_db: float = 0.0
    grf_db: float = 0.0

    def __post_init__(self):
        if not self.f_ghz > 0:
            raise ValueError("carrier frequency must be positive")
        if not 0 < self.theta_b < 180:
            raise ValueError("beamwidth must lie in (0, 180) degrees")
        if self.grf_db < 0:
            raise ValueError("gain reduction factor must be non-negative")


@dataclass(frozen=True)
class PathLossBreakdown:
    d_3d: float
    d_2d: float
    theta_i: float
    l_f: float
    l_b: float
    l_i: float

    @property
    def total(self) -> float:
        return self.l_f + self.l_b + self.l_i


def dbm_to_mw(dbm):
    return 10.0 ** (np.asarray(dbm, dtype=float) / 10.0) if np.ndim(dbm) else 10.0 ** (dbm / 10.0)


def mw_to_dbm(mw):
    return 10.0 * np.log10(mw) if np.ndim(mw) else 10.0 * math.log10(mw)


def tx_antenna_gain_db(theta_b: float) -> float:
    """UAV antenna gain from the 29000 / theta_b^2 approximation (theta_b in degrees)."""
    if not 0 < theta_b < 180:
        raise ValueError(f"beamwidth must lie in (0, 180) degrees, got {theta_b}")
    return 10.0 * math.log10(29000.0 / theta_b**2)


def rx_antenna_gain_db(params: RadioParams) -> float:
    return params.g_r_dir_db + params.g_r_omni_db - params.grf_db


def _facade_terms(uav: np.ndarray, users: np.ndarray, facade: Facade, building: BuildingDims):
    # returns (depth behind facade, cosine of incidence angle, 3D distance)
    ray = users - uav
    d3 = np.linalg.norm(ray, axis=-1)
    if facade is Facade.A:
        depth, along = users[..., 0], ray[..., 0]
    elif facade is Facade.B:
        depth, along = building.x_b - users[..., 0], -ray[..., 0]
    elif facade is Facade.ROOF:
        depth, along = building.z_b - users[..., 2], -ray[..., 2]
    else:
        raise ValueError(f"no UAV can transmit through facade {facade}")
    cos_t = np.clip(along / d3, -1.0, 1.0)
    return depth, cos_t, d3


def _uav_on_side(uav: Point3, facade: Facade, building: BuildingDims) -> bool:
    if facade is Facade.A:
        return uav.x < 0
    if facade is Facade.B:
        return uav.x > building.x_b
    if facade is Facade.ROOF:
        return uav.z > building.z_b
    return False


def path_loss_db(
    uav: Point3, user: Point3, facade: Facade, f_ghz: float, building: BuildingDims
) -> PathLossBreakdown:
    facade = Facade(facade)
    if not building.contains(user.as_array()):
        raise ValueError(f"user {user} is not inside the building")
    if not _uav_on_side(uav, facade, building):
        raise ValueError(f"UAV {uav} is not outside facade {facade.value}")
    if f_ghz <= 0:
        raise ValueError("carrier frequency must be positive")
    depth, cos_t, d3 = _facade_terms(uav.as_array(), user.as_array(), facade, building)
    depth, cos_t, d3 = float(max(depth, 0.0)), float(cos_t), float(d3)
    l_f = W_LOG * math.log10(d3) + W_LOG * math.log10(f_ghz) + G1
    l_b = G2 + G3 * (1.0 - cos_t) ** 2
    l_i = G4 * depth
    return PathLossBreakdown(d3, depth, math.acos(cos_t), l_f, l_b, l_i)


def path_loss_total(uav: np.ndarray, users: np.ndarray, facade: Facade, f_ghz: float, building: BuildingDims):
    """Total path loss (dB) from one UAV to an (N, 3) array of users."""
    depth, cos_t, d3 = _facade_terms(np.asarray(uav, float), np.asarray(users, float), facade, building)
    return (
        W_LOG * np.log10(d3)
        + W_LOG * math.log10(f_ghz)
        + G1
        + G2
        + G3 * (1.0 - cos_t) ** 2
        + G4 * np.maximum(depth, 0.0)
    )


def received_power_dbm(p_t_dbm: float, params: RadioParams, loss: PathLossBreakdown) -> float:
    return p_t_dbm + tx_antenna_gain_db(params.theta_b) + rx_antenna_gain_db(params) - loss.total


def cone_sample_points(cone: TruncatedCone, building: BuildingDims, grid_step: float) -> np.ndarray:
    """Grid points inside the cone (and building), on a lattice anchored at the axis foot.

    Depth slices include both facades, so the rim of the far face, where the
    link is worst, is always sampled when the radius is a multiple of the step.
    """
    if grid_step <= 0:
        raise ValueError("grid step must be positive")
    n_depth = int(math.floor(cone.span / grid_step + 1e-9))
    s = np.append(np.arange(n_depth + 1) * grid_step, cone.span)
    s = np.unique(np.minimum(s, cone.span))
    k = int(math.floor(cone.r_far / grid_step + 1e-9))
    offs = np.arange(-k, k + 1) * grid_step
    du, dv = np.meshgrid(offs, offs, indexing="ij")
    du, dv = du.ravel(), dv.ravel()
    rad = np.hypot(du, dv)
    coord = cone.near_plane + np.sign(cone.far_plane - cone.near_plane) * s
    r_at = cone.radius_at(coord)
    keep = rad[None, :] <= r_at[:, None] + _RIM_TOL
    ii, jj = np.nonzero(keep)
    pts = np.empty((ii.size, 3))
    u, v = cone.axis_foot
    if cone.axis.family == "x":
        pts[:, 0], pts[:, 1], pts[:, 2] = coord[ii], u + du[jj], v + dv[jj]
    else:
        pts[:, 0], pts[:, 1], pts[:, 2] = u + du[jj], v + dv[jj], coord[ii]
    return pts[building.contains(pts, _RIM_TOL)]


def _required_power(cone: TruncatedCone, pts: np.ndarray, building: BuildingDims, params: RadioParams):
    facade = _FACADE_OF_AXIS[cone.axis]
    loss = path_loss_total(cone.apex.as_array(), pts, facade, params.f_ghz, building)
    g_t = tx_antenna_gain_db(cone.theta_b)
    return params.snr_min_db + params.noise_dbm - g_t - rx_antenna_gain_db(params) + loss


def worst_case_tx_power(
    cone: TruncatedCone,
    building: BuildingDims,
    params: RadioParams,
    grid_step: float = DEFAULT_GRID_STEP,
) -> Tuple[float, Point3]:
    """Transmit power (dBm) meeting the SNR target at every sampled point, and the binding point."""
    pts = cone_sample_points(cone, building, grid_step)
    if pts.size == 0:
        raise ValueError("cone has no sample points inside the building")
    req = _required_power(cone, pts, building, params)
    i = int(np.argmax(req))
    return float(req[i]), Point3(*pts[i].tolist())


def min_tx_power_dbm(
    cone: TruncatedCone,
    building: BuildingDims,
    params: RadioParams,
    grid_step: float = DEFAULT_GRID_STEP,
) -> float:
    """Smallest transmit power guaranteeing ``params.snr_min_db`` across the cone.

    The UAV gain is taken from the cone's own beamwidth, not ``params.theta_b``.
    """
    return worst_case_tx_power(cone, building, params, grid_step)[0]


def total_tx_power_mw(
    cones: Iterable[TruncatedCone],
    building: BuildingDims,
    params: RadioParams,
    grid_step: float = DEFAULT_GRID_STEP,
) -> float:
    return float(sum(dbm_to_mw(min_tx_power_dbm(c, building, params, grid_step)) for c in cones))
