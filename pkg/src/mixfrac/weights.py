"""Muckenhoupt weight constants, embedding and product weights, Rubio de Francia iteration.

Constants are maxima over a finite cube or rectangle family and therefore
lower bounds of the true suprema.  Essential suprema of ``1/w`` are grid
maxima.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument, InvalidWeight
from .lattice import Box, FnSpec, Grid, GridFunction, sample
from .operators.families import BlockLevel, block_max, level_boxes
from .operators.maximal import block_averages, maximal

__all__ = [
    "Weight",
    "EMBEDDING_FLOOR",
    "ap_constant",
    "a1_constant",
    "ap_star_constant",
    "ap_table",
    "embedding_weight",
    "power_weight",
    "product_weight",
    "rubio_de_francia",
    "rubio_de_francia_iterates",
]

#: Floor applied to the embedding weight at cells no cube of the family covers.
EMBEDDING_FLOOR = 1e-8


@dataclass
class Weight:
    """A strictly positive grid function with a provenance descriptor."""

    w: GridFunction
    provenance: dict = field(default_factory=lambda: {"kind": "custom"})

    def __post_init__(self):
        if isinstance(self.w, Weight):
            self.w = self.w.w
        if np.any(self.w.values <= 0):
            raise InvalidWeight("weights must be strictly positive on the grid")

    @property
    def grid(self) -> Grid:
        return self.w.grid

    @property
    def values(self) -> np.ndarray:
        return self.w.values

    def scaled(self, c: float) -> "Weight":
        if not c > 0:
            raise InvalidArgument("weights can only be scaled by positive constants")
        return Weight(self.w * c, {"kind": "scaled", "factor": c, "of": self.provenance})


def _weight(w) -> Weight:
    return w if isinstance(w, Weight) else Weight(w)


def _ap_per_block(values: np.ndarray, p: float, level: BlockLevel) -> np.ndarray:
    avg = block_averages(values, level)
    if p == 1:
        return avg * block_max(1.0 / values, level)
    dual = block_averages(values ** (1.0 / (1.0 - p)), level)
    return avg * dual ** (p - 1.0)


def _check_p(p: float, allow_one: bool) -> float:
    p = float(p)
    if p < 1 or (p == 1 and not allow_one) or not np.isfinite(p):
        raise InvalidArgument(f"invalid weight exponent p = {p}" + ("" if allow_one else " (use a1_constant for p = 1)"))
    return p


def _max_over(levels, values, p) -> float:
    return float(max(np.max(_ap_per_block(values, p, lv)) for lv in levels))


def ap_constant(w, p: float, family) -> float:
    """``max_Q avg_Q(w) * avg_Q(w^{1/(1-p)})^{p-1}`` over the cubes of ``family``."""
    w = _weight(w)
    p = _check_p(p, allow_one=False)
    return _max_over(family.resolve(w.grid), w.values, p)


def a1_constant(w, family) -> float:
    """``max_Q avg_Q(w) * max_{x in Q} 1/w(x)`` over the cubes of ``family``."""
    w = _weight(w)
    return _max_over(family.resolve(w.grid), w.values, 1.0)


def ap_star_constant(w, p: float, rectangles) -> float:
    """Rectangle (product-domain) analogue of :func:`ap_constant`; ``p = 1`` gives the A1 form."""
    w = _weight(w)
    p = _check_p(p, allow_one=True)
    return _max_over(rectangles.resolve(w.grid), w.values, p)


def ap_table(w, p: float, family) -> list:
    """Per-cube rows ``(box, constant)`` for reporting; ``p = 1`` gives the A1 form."""
    w = _weight(w)
    p = _check_p(p, allow_one=True)
    rows = []
    for lv in family.resolve(w.grid):
        for box, v in zip(level_boxes(w.grid, lv), _ap_per_block(w.values, p, lv)):
            rows.append((box, float(v)))
    return rows


def embedding_weight(grid: Grid, epsilon: float, family, cube: Box | None = None) -> Weight:
    """``[M(chi_Q)]^epsilon`` with ``Q = Q(0, 1)``, the unit cube centred at the origin.

    Cells that no cube of ``family`` covers get :data:`EMBEDDING_FLOOR`.
    """
    epsilon = float(epsilon)
    if not 0 < epsilon < 1:
        raise InvalidArgument(f"epsilon must lie in (0, 1), got {epsilon}")
    cube = cube or Box.cube(np.zeros(grid.ndim), 1.0)
    if not grid.box.contains_box(cube):
        raise InvalidArgument("the embedding cube must lie inside the grid box")
    m = maximal(sample(FnSpec.indicator(cube), grid), family)
    values = np.maximum(m.values**epsilon, EMBEDDING_FLOOR)
    return Weight(GridFunction(grid, values), {"kind": "embedding", "epsilon": epsilon, "cube": cube.to_dict()})


def power_weight(grid: Grid, a: float) -> Weight:
    """``|x|^a``; the grid must not have a cell centre at the origin."""
    return Weight(sample(FnSpec.power(a), grid), {"kind": "power", "a": float(a)})


def product_weight(mu, nu) -> Weight:
    """``w(x, y) = mu(x) nu(y)`` on the product of the two grids."""
    mu, nu = _weight(mu), _weight(nu)
    g1, g2 = mu.grid, nu.grid
    box = Box(g1.box.lower + g2.box.lower, g1.box.upper + g2.box.upper)
    grid = Grid(box, g1.resolution + g2.resolution)
    values = np.multiply.outer(mu.values, nu.values)
    return Weight(GridFunction(grid, values), {"kind": "product", "factors": [mu.provenance, nu.provenance]})


def rubio_de_francia_iterates(h: GridFunction, K: int, family) -> list:
    """``[M^0 h, ..., M^K h]`` with ``M^0 h = |h|``."""
    if K < 0:
        raise InvalidArgument("iteration count K must be >= 0")
    out = [abs(h)]
    for _ in range(K):
        out.append(maximal(out[-1], family))
    return out


def rubio_de_francia(h: GridFunction, A: float, K: int, family) -> GridFunction:
    """Truncated series ``R_K h = sum_{k=0}^{K} M^k h / (2A)^k``."""
    if not A > 0:
        raise InvalidArgument("A must be positive")
    iterates = rubio_de_francia_iterates(h, K, family)
    total = np.zeros(h.grid.shape)
    for k, g in enumerate(iterates):
        total = total + g.values / (2.0 * A) ** k
    return h.with_values(total, A=A, K=K)
