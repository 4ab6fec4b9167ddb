"""Maximal operators, fractional integrals, commutators and the heat-semigroup kernel."""

from .families import BlockLevel, CubeFamily, RectangleFamily, coverage
from .fractional import (
    KernelQuadrature,
    abs_commutator,
    cell_kernel_integral,
    commutator_fractional,
    fractional_integral,
    fractional_integral_at,
    offset_cell_integral,
    radial_operator,
)
from .heat import HeatQuadrature, heat_kernel_constant, heat_kernel_fractional, riesz_constant
from .maximal import (
    fractional_maximal,
    fractional_maximal_commutator,
    maximal,
    mean_oscillation,
    sharp_maximal,
)

__all__ = [
    "BlockLevel",
    "CubeFamily",
    "RectangleFamily",
    "coverage",
    "KernelQuadrature",
    "abs_commutator",
    "cell_kernel_integral",
    "commutator_fractional",
    "fractional_integral",
    "fractional_integral_at",
    "offset_cell_integral",
    "radial_operator",
    "HeatQuadrature",
    "heat_kernel_constant",
    "heat_kernel_fractional",
    "riesz_constant",
    "fractional_maximal",
    "fractional_maximal_commutator",
    "maximal",
    "mean_oscillation",
    "sharp_maximal",
]
