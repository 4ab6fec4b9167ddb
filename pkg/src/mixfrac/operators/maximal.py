"""Maximal operators over finite cube families.

All outputs are lower bounds of the corresponding suprema over all cubes.
Cells covered by no cube of the family get the value 0; their number is
recorded in ``result.meta["uncovered"]``.
"""

from __future__ import annotations

import numpy as np

from ..errors import InvalidArgument
from ..lattice import GridFunction
from .families import BlockLevel, block_sums, block_windows, scatter_max

__all__ = [
    "maximal",
    "sharp_maximal",
    "fractional_maximal",
    "fractional_maximal_commutator",
    "mean_oscillation",
    "block_averages",
]


def _finish(f: GridFunction, out: np.ndarray, **meta) -> GridFunction:
    uncovered = out == -np.inf
    out[uncovered] = 0.0
    return f.with_values(out, uncovered=int(uncovered.sum()), **meta)


def _levels(f: GridFunction, family) -> list:
    if family is None:
        raise InvalidArgument("a cube family is required")
    return family.resolve(f.grid)


def block_averages(values: np.ndarray, level: BlockLevel) -> np.ndarray:
    """Average of ``values`` over each block (cells have equal volume)."""
    return block_sums(values, level) / level.cells


def mean_oscillation(values: np.ndarray, level: BlockLevel, q: float = 1.0) -> np.ndarray:
    """``(1/|Q|) int_Q |v - v_Q|^q`` for each block ``Q`` of ``level``."""
    out = np.empty(level.count)
    for sl, w in block_windows(values, level):
        dev = np.abs(w - w.mean(axis=1, keepdims=True))
        out[sl] = (dev if q == 1 else dev**q).mean(axis=1)
    return out


def maximal(f: GridFunction, family) -> GridFunction:
    """Hardy-Littlewood maximal function ``max_{Q ni x} (1/|Q|) int_Q |f|``."""
    a = np.abs(f.values)
    out = np.full(f.grid.shape, -np.inf)
    for level in _levels(f, family):
        scatter_max(out, block_averages(a, level), level)
    return _finish(f, out)


def sharp_maximal(f: GridFunction, family) -> GridFunction:
    """Sharp maximal function ``max_{Q ni x} (1/|Q|) int_Q |f - f_Q|``."""
    out = np.full(f.grid.shape, -np.inf)
    for level in _levels(f, family):
        scatter_max(out, mean_oscillation(f.values, level), level)
    return _finish(f, out)


def _check_alpha(alpha: float, n: int) -> float:
    alpha = float(alpha)
    if not 0 < alpha < n:
        raise InvalidArgument(f"alpha must lie in (0, {n}), got {alpha}")
    return alpha


def fractional_maximal(f: GridFunction, alpha: float, family) -> GridFunction:
    """``M_alpha f(x) = max_{Q ni x} |Q|^{alpha/n - 1} int_Q |f|``."""
    n = f.grid.ndim
    alpha = _check_alpha(alpha, n)
    vol = f.grid.cell_volume
    a = np.abs(f.values)
    out = np.full(f.grid.shape, -np.inf)
    for level in _levels(f, family):
        measure = level.cells * vol
        scatter_max(out, block_sums(a, level) * vol * measure ** (alpha / n - 1.0), level)
    return _finish(f, out)


def _cell_offsets(level: BlockLevel) -> np.ndarray:
    mesh = np.meshgrid(*[np.arange(s) for s in level.shape], indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def fractional_maximal_commutator(b: GridFunction, f: GridFunction, alpha: float, family) -> GridFunction:
    """``M_{alpha,b} f(x) = max_{Q ni x} |Q|^{alpha/n-1} int_Q |b(x) - b(y)| |f(y)| dy``.

    The integrand depends on ``x``, so each cube costs ``|Q|^2`` cell pairs.
    """
    if b.grid != f.grid:
        raise InvalidArgument("b and f must share a grid")
    grid = f.grid
    n = grid.ndim
    alpha = _check_alpha(alpha, n)
    vol = grid.cell_volume
    a = np.abs(f.values)
    out = np.full(grid.size, -np.inf)
    for level in _levels(f, family):
        scale = vol * (level.cells * vol) ** (alpha / n - 1.0)
        offs = _cell_offsets(level)
        chunk = max(level.cells, 4_000_000 // max(1, level.cells))
        wb_iter = block_windows(b.values, level, chunk=chunk)
        wf_iter = block_windows(a, level, chunk=chunk)
        for (sl, wb), (_, wf) in zip(wb_iter, wf_iter):
            diff = np.abs(wb[:, :, None] - wb[:, None, :])
            vals = np.einsum("kxy,ky->kx", diff, wf) * scale
            cells = level.starts[sl][:, None, :] + offs[None, :, :]
            flat = np.ravel_multi_index(tuple(np.moveaxis(cells, -1, 0)), grid.shape)
            np.maximum.at(out, flat.ravel(), vals.ravel())
    return _finish(f, out.reshape(grid.shape))
