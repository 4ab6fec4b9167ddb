"""BMO and homogeneous Lipschitz seminorm estimators.

Each estimator is a maximum over a finite cube family or a finite set of
point pairs, hence a lower bound of the seminorm it estimates.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidArgument
from .lattice import GridFunction
from .operators.maximal import mean_oscillation

__all__ = [
    "bmo_norm",
    "lipschitz_norm_pointwise",
    "lipschitz_norm_oscillation",
    "pair_sample",
    "MAX_PAIR_POINTS",
    "MAX_OSCILLATION_Q",
]

#: All pairs are used up to this many grid points; larger grids are subsampled.
MAX_PAIR_POINTS = 4096
MAX_OSCILLATION_Q = 64.0


def bmo_norm(b: GridFunction, family) -> float:
    """``max_Q (1/|Q|) int_Q |b - b_Q|``."""
    levels = family.resolve(b.grid)
    return float(max(np.max(mean_oscillation(b.values, lv)) for lv in levels))


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not 0 < beta < 1:
        raise InvalidArgument(f"beta must lie in (0, 1), got {beta}")
    return beta


def pair_sample(grid, max_points: int = MAX_PAIR_POINTS) -> np.ndarray:
    """Flat indices of the points used by :func:`lipschitz_norm_pointwise`.

    Every cell when the grid is small enough.  Otherwise a regular sub-lattice
    with the smallest common stride that fits, offset to the middle of each
    stride block, plus the cells nearest the origin and the box corners, so
    near-singular and long-range pairs are always represented.
    """
    if grid.size <= max_points:
        return np.arange(grid.size)
    n = grid.ndim
    stride = 1
    while np.prod([-(-s // stride) for s in grid.shape]) > max_points - 2**n - 2**n:
        stride += 1
    axes = [np.arange(stride // 2, s, stride) for s in grid.shape]
    mesh = np.meshgrid(*axes, indexing="ij")
    idx = [m.ravel() for m in mesh]
    extra = []
    for corner in range(2**n):
        extra.append([0 if not (corner >> i) & 1 else grid.shape[i] - 1 for i in range(n)])
    for near in range(2**n):
        cell = []
        for i in range(n):
            c = grid.centers(i)
            k = int(np.argmin(np.abs(c)))
            if (near >> i) & 1:
                k = k + 1 if c[k] < 0 else k - 1
            cell.append(min(max(k, 0), grid.shape[i] - 1))
        extra.append(cell)
    flat = np.ravel_multi_index(tuple(idx), grid.shape)
    flat_extra = np.ravel_multi_index(tuple(np.asarray(extra).T), grid.shape)
    return np.unique(np.concatenate([flat, flat_extra]))


def lipschitz_norm_pointwise(b: GridFunction, beta: float, max_points: int = MAX_PAIR_POINTS) -> float:
    """``max_{x != y} |b(x) - b(y)| / |x - y|^beta`` over sampled cell-centre pairs."""
    beta = _check_beta(beta)
    grid = b.grid
    idx = pair_sample(grid, max_points)
    pts = grid.points().reshape(-1, grid.ndim)[idx]
    vals = b.values.ravel()[idx]
    best = 0.0
    per = max(1, 2_000_000 // len(idx))
    for lo in range(0, len(idx), per):
        d = pts[lo : lo + per, None, :] - pts[None, :, :]
        r = np.sqrt(np.einsum("ijk,ijk->ij", d, d))
        diff = np.abs(vals[lo : lo + per, None] - vals[None, :])
        mask = r > 0
        if np.any(mask):
            best = max(best, float(np.max(diff[mask] / r[mask] ** beta)))
    return best


def lipschitz_norm_oscillation(b: GridFunction, beta: float, q: float, family) -> float:
    """``max_Q |Q|^{-beta/n} ((1/|Q|) int_Q |b - b_Q|^q)^{1/q}``.

    ``q = 1`` is the first form, ``|Q|^{-1-beta/n} int_Q |b - b_Q|``.
    """
    beta = _check_beta(beta)
    q = float(q)
    if not 1 <= q <= MAX_OSCILLATION_Q:
        raise InvalidArgument(f"q must lie in [1, {MAX_OSCILLATION_Q:g}], got {q}")
    grid = b.grid
    n = grid.ndim
    vol = grid.cell_volume
    best = 0.0
    for lv in family.resolve(grid):
        osc = mean_oscillation(b.values, lv, q) ** (1.0 / q)
        best = max(best, float(np.max(osc)) * (lv.cells * vol) ** (-beta / n))
    return best
