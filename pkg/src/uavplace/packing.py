"""Equal-circle packing in a rectangle.

``packing_decision`` answers "do N circles of radius r fit in d1 x d2?" by
minimising a smooth overlap penalty from several starting layouts.  A feasible
answer carries checkable centres; an infeasible answer is either proved by a
counting bound or is the solver giving up.  ``max_circles`` is the
incremental loop on top: grow N until the answer turns negative.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize

FEAS_TOL = 1e-6
DEFAULT_RESTARTS = 50
DEFAULT_MAX_ITERS = 2000

# structured starts tried before the random ones
_N_STRUCTURED = 3
# the penalty asks for this much extra separation so solved packings end up
# strictly non-overlapping rather than within FEAS_TOL of touching
_MARGIN = 1e-7


@dataclass(frozen=True)
class PackingInstance:
    n: int
    r: float
    d1: float
    d2: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one circle")
        if not (self.r > 0 and self.d1 > 0 and self.d2 > 0):
            raise ValueError("radius and rectangle sides must be positive")


@dataclass(frozen=True)
class PackingSolution:
    feasible: bool
    centers: Tuple[Tuple[float, float], ...]
    residual: float
    seed: int
    restarts_used: int
    proved: bool = field(default=False, compare=False)


def grid_lower_bound(r: float, d1: float, d2: float) -> int:
    return int(math.floor(d1 / (2 * r) + 1e-9)) * int(math.floor(d2 / (2 * r) + 1e-9))


def count_upper_bound(r: float, d1: float, d2: float) -> int:
    """Largest N not excluded by a counting argument.

    Centres sit in the inner (d1-2r) x (d2-2r) rectangle at mutual distance
    >= 2r.  Oler's inequality for a convex region K bounds the count of such
    points by 2/sqrt(3) * area/(2r)^2 + perimeter/(2 * 2r) + 1, which is
    never weaker than the hexagonal density bound pi/sqrt(12).
    """
    a, b = d1 - 2 * r, d2 - 2 * r
    if a < -FEAS_TOL or b < -FEAS_TOL:
        return 0
    a, b = max(a, 0.0), max(b, 0.0)
    s = 2 * r
    oler = 2.0 / math.sqrt(3.0) * a * b / s**2 + (a + b) / s + 1.0
    density = math.pi / math.sqrt(12.0) * d1 * d2 / (math.pi * r * r)
    return int(math.floor(min(oler, density) + 1e-9))


def verify_packing(centers, r: float, d1: float, d2: float) -> float:
    """Worst constraint violation (m) of a candidate packing; <= 0 means exact."""
    c = np.asarray(centers, dtype=float).reshape(-1, 2)
    if c.size == 0:
        return 0.0
    edge = np.concatenate([r - c[:, 0], c[:, 0] + r - d1, r - c[:, 1], c[:, 1] + r - d2])
    worst = float(edge.max())
    if len(c) > 1:
        i, j = np.triu_indices(len(c), 1)
        dist = np.hypot(*(c[i] - c[j]).T)
        worst = max(worst, float((2 * r - dist).max()))
    return worst


def _penalty(flat: np.ndarray, n: int, r: float, pi: np.ndarray, pj: np.ndarray):
    c = flat.reshape(n, 2)
    diff = c[pi] - c[pj]
    dist = np.sqrt(np.maximum((diff * diff).sum(axis=1), 1e-24))
    over = np.maximum(0.0, 2 * r + _MARGIN - dist)
    f = float((over * over).sum())
    coef = (-2.0 * over / dist)[:, None] * diff
    g = np.zeros_like(c)
    np.add.at(g, pi, coef)
    np.add.at(g, pj, -coef)
    return f, g.ravel()


def _lattice_start(inst: PackingInstance, kind: str, rng: np.random.Generator) -> np.ndarray:
    r, d1, d2, n = inst.r, inst.d1, inst.d2, inst.n
    pts: List[Tuple[float, float]] = []
    if kind == "square":
        nx = max(int(math.floor(d1 / (2 * r) + 1e-9)), 1)
        ny = max(int(math.floor(d2 / (2 * r) + 1e-9)), 1)
        pts = [((2 * i + 1) * r, (2 * j + 1) * r) for i in range(nx) for j in range(ny)]
    else:
        # hexagonal rows running along the first (hex_u) or second (hex_v) side
        long_, short = (d1, d2) if kind == "hex_u" else (d2, d1)
        pitch = math.sqrt(3.0) * r
        row = 0
        while r + row * pitch <= short - r + 1e-9:
            off = r if row % 2 == 0 else 2 * r
            k = 0
            while off + 2 * k * r <= long_ - r + 1e-9:
                a, b = off + 2 * k * r, r + row * pitch
                pts.append((a, b) if kind == "hex_u" else (b, a))
                k += 1
            row += 1
    pts = pts[:n]
    if len(pts) < n:
        extra = rng.uniform([r, r], [max(d1 - r, r), max(d2 - r, r)], size=(n - len(pts), 2))
        pts.extend(map(tuple, extra))
    return np.asarray(pts, dtype=float)


def _initial_layout(inst: PackingInstance, seed: int, k: int) -> np.ndarray:
    rng = np.random.default_rng([seed, k])
    if k < _N_STRUCTURED:
        return _lattice_start(inst, ("square", "hex_u", "hex_v")[k], rng)
    r = inst.r
    return rng.uniform([r, r], [inst.d1 - r, inst.d2 - r], size=(inst.n, 2))


def _attempt(inst: PackingInstance, seed: int, k: int, max_iters: int) -> Tuple[float, np.ndarray]:
    x0 = _initial_layout(inst, seed, k)
    r, n = inst.r, inst.n
    pi, pj = np.triu_indices(n, 1)
    bounds = [(r, inst.d1 - r), (r, inst.d2 - r)] * n
    x0 = np.clip(x0, [b[0] for b in bounds[:2]], [b[1] for b in bounds[:2]]).ravel()
    c = x0.reshape(n, 2)
    res0 = verify_packing(c, r, inst.d1, inst.d2)
    if res0 <= 1e-12 or n == 1:
        return res0, c
    res = minimize(
        _penalty,
        x0,
        args=(n, r, pi, pj),
        jac=True,
        method="L-BFGS-B",
        bounds=bounds,
        options={"maxiter": max_iters, "ftol": 0.0, "gtol": 1e-14},
    )
    c = res.x.reshape(n, 2)
    return verify_packing(c, r, inst.d1, inst.d2), c


def _attempt_star(args):
    return _attempt(*args)


def packing_decision(
    inst: PackingInstance,
    seed: int = 0,
    restarts: int = DEFAULT_RESTARTS,
    max_iters: int = DEFAULT_MAX_ITERS,
    workers: int = 1,
) -> PackingSolution:
    """Decide whether ``inst.n`` circles fit.

    Restart k starts from a square grid (k=0), a hexagonal layout along
    either side (k=1, 2) or a seeded uniform layout.  The first restart, in
    order, whose residual is within ``FEAS_TOL`` wins, so the answer does not
    depend on ``workers``.
    """
    if inst.n > count_upper_bound(inst.r, inst.d1, inst.d2):
        return PackingSolution(False, (), math.inf, seed, 0, proved=True)
    best_res, best_c = math.inf, None
    jobs = [(inst, seed, k, max_iters) for k in range(restarts)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_attempt_star, jobs))
        for k, (res, c) in enumerate(results):
            if res <= FEAS_TOL:
                return _solution(True, c, res, seed, k + 1)
            if res < best_res:
                best_res, best_c = res, c
    else:
        for k, job in enumerate(jobs):
            res, c = _attempt(*job)
            if res <= FEAS_TOL:
                return _solution(True, c, res, seed, k + 1)
            if res < best_res:
                best_res, best_c = res, c
    return _solution(False, best_c, best_res, seed, restarts)


def _solution(feasible: bool, c: Optional[np.ndarray], res: float, seed: int, used: int) -> PackingSolution:
    centers = () if c is None else tuple((float(a), float(b)) for a, b in c)
    return PackingSolution(feasible, centers, float(res), seed, used)


def max_circles(
    r: float,
    d1: float,
    d2: float,
    seed: int = 0,
    restarts: int = DEFAULT_RESTARTS,
    max_iters: int = DEFAULT_MAX_ITERS,
    workers: int = 1,
) -> Tuple[int, PackingSolution]:
    """Largest N for which the decision problem answers yes (incremental search from N = 1)."""
    if not (r > 0 and d1 > 0 and d2 > 0):
        raise ValueError("radius and rectangle sides must be positive")
    best = PackingSolution(False, (), math.inf, seed, 0)
    n = 1
    while True:
        sol = packing_decision(PackingInstance(n, r, d1, d2), seed, restarts, max_iters, workers)
        if not sol.feasible:
            return n - 1, best
        best = sol
        n += 1
