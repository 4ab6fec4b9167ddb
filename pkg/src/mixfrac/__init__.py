"""Numerical laboratory for mixed-norm Lebesgue spaces, fractional integrals and their commutators."""

from .errors import InvalidArgument, InvalidWeight, SingularityError
from .lattice import Box, FnSpec, Grid, GridFunction, make_grid, riemann_integral, sample
from .mixed_norms import ExponentVector, classical_norm, exact_exponent, mixed_norm, parse_exponent

__version__ = "0.1.0"

__all__ = [
    "InvalidArgument",
    "InvalidWeight",
    "SingularityError",
    "Box",
    "FnSpec",
    "Grid",
    "GridFunction",
    "make_grid",
    "riemann_integral",
    "sample",
    "ExponentVector",
    "classical_norm",
    "exact_exponent",
    "mixed_norm",
    "parse_exponent",
]
