"""Independent checks of deployment plans: sampling, facade index, holes, hole filling."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy import ndimage
from scipy.signal import fftconvolve

from .geometry import (
    Axis,
    BuildingDims,
    TruncatedCone,
    disk_rect_area,
    facade_projections,
    make_cone,
)
from .placement import DeploymentPlan, Method, plan_coverage_summary

DEFAULT_SAMPLES = 1_000_000
DEFAULT_VOXEL = 0.5
_CHUNK = 250_000


@dataclass(frozen=True)
class CoverageReport:
    analytic_fraction: float
    mc_fraction: float
    mc_halfwidth_95: float
    n_samples: int
    seed: int
    overlap_violations: int


@dataclass(frozen=True)
class HoleComponent:
    voxels: int
    bbox_min: Tuple[float, float, float]
    bbox_max: Tuple[float, float, float]


@dataclass(frozen=True)
class HoleSet:
    voxel_size: float
    uncovered_voxels: int
    components: Tuple[HoleComponent, ...]
    total_voxels: int = 0

    @property
    def uncovered_fraction(self) -> float:
        return self.uncovered_voxels / self.total_voxels if self.total_voxels else 0.0


def cover_counts(cones: Sequence[TruncatedCone], pts: np.ndarray, building: BuildingDims) -> np.ndarray:
    """Number of cones containing each point."""
    counts = np.zeros(len(pts), dtype=np.int32)
    for c in cones:
        counts += c.contains(pts, None)
    return counts * building.contains(pts)


def sample_coverage(
    cones: Sequence[TruncatedCone], building: BuildingDims, n_samples: int, seed: int
) -> Tuple[float, float, int]:
    """Monte-Carlo covered share, its 95% half-width, and the count of multiply covered samples."""
    rng = np.random.default_rng(seed)
    covered = overlap = 0
    hi = np.array(building.dims)
    left = n_samples
    while left > 0:
        m = min(_CHUNK, left)
        pts = rng.random((m, 3)) * hi
        counts = cover_counts(cones, pts, building)
        covered += int(np.count_nonzero(counts))
        overlap += int(np.count_nonzero(counts >= 2))
        left -= m
    p = covered / n_samples
    return p, 1.96 * math.sqrt(p * (1 - p) / n_samples), overlap


def mc_coverage(
    plan: DeploymentPlan, building: BuildingDims, n_samples: int = DEFAULT_SAMPLES, seed: int = 0
) -> CoverageReport:
    if n_samples < 10_000:
        raise ValueError("use at least 1e4 samples")
    p, hw, overlap = sample_coverage(plan.cones, building, n_samples, seed)
    analytic = plan_coverage_summary(plan, building)[2]
    return CoverageReport(analytic, p, hw, n_samples, seed, overlap)


def facade_coverage_index(plan: DeploymentPlan, building: BuildingDims) -> float:
    """Projected circle area on sides A and B over the area of one side.

    AUDA plans use the per-cell count (pi r_i^2 + pi r_j^2 on each side per
    cell); other plans sum the in-facade part of every projected circle.
    The value can exceed 1.
    """
    if any(c.axis.family != "x" for c in plan.cones):
        raise ValueError("facade index is defined for plans facing sides A and B only")
    face = building.y_b * building.z_b
    if plan.method is Method.AUDA:
        return plan.cells * 2 * math.pi * (plan.r_near**2 + plan.r_far**2) / face
    total = 0.0
    for cone in plan.cones:
        for circle in facade_projections(cone):
            total += disk_rect_area(circle.center[0], circle.center[1], circle.radius, building.y_b, building.z_b)
    return total / face


class VoxelGrid:
    """Cell-centred voxelisation of the building; spacing is adjusted per axis to tile it exactly."""

    def __init__(self, building: BuildingDims, voxel_size: float):
        if voxel_size <= 0 or voxel_size > min(building.dims) / 4:
            raise ValueError("voxel size must be positive and at most a quarter of the smallest dimension")
        self.building = building
        self.voxel_size = voxel_size
        self.shape = tuple(max(1, int(round(d / voxel_size))) for d in building.dims)
        self.step = tuple(d / n for d, n in zip(building.dims, self.shape))
        self.axes = [(np.arange(n) + 0.5) * h for n, h in zip(self.shape, self.step)]

    def centers(self) -> np.ndarray:
        g = np.meshgrid(*self.axes, indexing="ij")
        return np.stack(g, axis=-1).reshape(-1, 3)

    def covered_mask(self, cones: Sequence[TruncatedCone]) -> np.ndarray:
        # slab-wise to bound memory
        mask = np.zeros(self.shape, dtype=bool)
        yy, zz = np.meshgrid(self.axes[1], self.axes[2], indexing="ij")
        for i, x in enumerate(self.axes[0]):
            pts = np.stack([np.full_like(yy, x), yy, zz], axis=-1).reshape(-1, 3)
            hit = np.zeros(len(pts), dtype=bool)
            for c in cones:
                hit |= c.contains(pts, None)
            mask[i] = hit.reshape(yy.shape)
        return mask


_SIX_CONNECTED = ndimage.generate_binary_structure(3, 1)


def _holes_from_mask(grid: VoxelGrid, uncovered: np.ndarray) -> Tuple[HoleSet, np.ndarray]:
    labels, n = ndimage.label(uncovered, structure=_SIX_CONNECTED)
    comps = []
    sizes = ndimage.sum_labels(uncovered, labels, index=np.arange(1, n + 1)) if n else []
    for k, sl in enumerate(ndimage.find_objects(labels)):
        lo = tuple(s.start * h for s, h in zip(sl, grid.step))
        hi = tuple(s.stop * h for s, h in zip(sl, grid.step))
        comps.append(HoleComponent(int(sizes[k]), lo, hi))
    hs = HoleSet(grid.voxel_size, int(uncovered.sum()), tuple(comps), int(uncovered.size))
    return hs, labels


def find_holes(plan: DeploymentPlan, building: BuildingDims, voxel_size: float = DEFAULT_VOXEL) -> HoleSet:
    """Voxels whose centres no cone covers, grouped into 6-connected components."""
    grid = VoxelGrid(building, voxel_size)
    return _holes_from_mask(grid, ~grid.covered_mask(plan.cones))[0]


def _lateral(axis: Axis) -> Tuple[int, int, int]:
    # (axis index, first lateral index, second lateral index)
    return (2, 0, 1) if axis is Axis.MINUS_Z else (0, 1, 2)


def _slice_radii(grid: VoxelGrid, axis: Axis, standoff: float, theta_b: float) -> np.ndarray:
    """Cone radius at the apex-side face of every voxel slab along ``axis``."""
    b = grid.building
    ai = _lateral(axis)[0]
    h = grid.step[ai] / 2
    c = grid.axes[ai]
    if axis is Axis.PLUS_X:
        d = standoff + c - h
    elif axis is Axis.MINUS_X:
        d = standoff + b.x_b - c - h
    else:
        d = standoff + b.z_b - c - h
    return d * math.tan(math.radians(theta_b) / 2)


def fully_covered_mask(grid: VoxelGrid, cones: Sequence[TruncatedCone]) -> np.ndarray:
    """Voxels lying entirely inside at least one cone.

    A cone is convex, so a box is inside it iff its eight corners are; for an
    axis-aligned cone that reduces to the farthest lateral corner fitting the
    radius on the slab face nearer the apex.
    """
    mask = np.zeros(grid.shape, dtype=bool)
    for cone in cones:
        ai, l0, l1 = _lateral(cone.axis)
        h0, h1 = grid.step[l0] / 2, grid.step[l1] / 2
        radii = _slice_radii(grid, cone.axis, cone.standoff, cone.theta_b)
        u, v = cone.axis_foot
        du = np.abs(grid.axes[l0] - u) + h0
        dv = np.abs(grid.axes[l1] - v) + h1
        far = np.hypot(du[:, None], dv[None, :])
        inside = far[None, :, :] <= radii[:, None, None] + 1e-9
        if ai == 2:
            inside = np.moveaxis(inside, 0, 2)
        mask |= inside
    return mask


def _kernel(grid: VoxelGrid, axis: Axis, radius: float) -> np.ndarray:
    # foot offsets (on the voxel lattice) whose cone slab contains the whole voxel
    _, l0, l1 = _lateral(axis)
    s0, s1 = grid.step[l0], grid.step[l1]
    k0, k1 = int(radius / s0) + 1, int(radius / s1) + 1
    du = np.abs(np.arange(-k0, k0 + 1) * s0)[:, None] + s0 / 2
    dv = np.abs(np.arange(-k1, k1 + 1) * s1)[None, :] + s1 / 2
    return (np.hypot(du, dv) <= radius + 1e-9).astype(float)


def augmentation_shapes(plan: DeploymentPlan, building: BuildingDims) -> List[Tuple[Axis, float, float]]:
    """(axis, standoff, beamwidth) of the extra UAVs a plan may call on.

    Extra UAVs are of the same kind as the plan's and fly on the same
    side(s): side A for FOBS, the roof for ABS, sides A and B for AUDA.
    """
    th = plan.theta_b
    if plan.method is Method.FOBS:
        return [(Axis.PLUS_X, plan.standoff, th)]
    if plan.method is Method.ABS:
        return [(Axis.MINUS_Z, plan.standoff, th)]
    return [(Axis.PLUS_X, plan.standoff, th), (Axis.MINUS_X, plan.standoff, th)]


def augment_full_coverage(
    plan: DeploymentPlan, building: BuildingDims, voxel_size: float = DEFAULT_VOXEL
) -> Tuple[int, List[TruncatedCone]]:
    """Extra (different-channel) UAVs until every voxel lies wholly inside some cone.

    Greedy: each round adds the cone, among all allowed sides and all axis
    feet on the voxel-centre lattice, that swallows the most still-uncovered
    voxels.  Ties go to the first side in ``augmentation_shapes`` order, then
    the lowest lattice index.  Extra cones may overlap the plan and each
    other.
    """
    grid = VoxelGrid(building, voxel_size)
    todo = ~fully_covered_mask(grid, plan.cones)
    shapes = augmentation_shapes(plan, building)
    kernels = []
    for axis, standoff, th in shapes:
        radii = _slice_radii(grid, axis, standoff, th)
        kernels.append([_kernel(grid, axis, r) for r in radii])
    extra: List[TruncatedCone] = []
    while todo.any():
        best = None
        for f, (axis, _, _) in enumerate(shapes):
            ai, l0, l1 = _lateral(axis)
            gain = np.zeros((grid.shape[l0], grid.shape[l1]))
            for k, ker in enumerate(kernels[f]):
                sl = np.take(todo, k, axis=ai)
                if sl.any():
                    gain += fftconvolve(sl.astype(float), ker, mode="same")
            gain = np.rint(gain)
            idx = np.unravel_index(int(np.argmax(gain)), gain.shape)
            if best is None or gain[idx] > best[0]:
                best = (gain[idx], f, idx)
        _, f, (i0, i1) = best
        axis, standoff, th = shapes[f]
        _, l0, l1 = _lateral(axis)
        cone = make_cone(building, axis, (grid.axes[l0][i0], grid.axes[l1][i1]), standoff, th)
        todo &= ~fully_covered_mask(grid, [cone])
        extra.append(cone)
    return len(extra), extra
