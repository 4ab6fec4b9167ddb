"""Mixed-norm, classical, weighted and convexified Lebesgue norms on grids."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import InvalidArgument, InvalidWeight
from .lattice import Box, GridFunction, riemann_integral

__all__ = [
    "ExponentVector",
    "parse_exponent",
    "exact_exponent",
    "mixed_norm",
    "classical_norm",
    "dual_exponents",
    "holder_gap",
    "indicator_norm_formula",
    "local_integral_constant",
    "weighted_norm",
    "convexified_norm",
]


def exact_exponent(value) -> Fraction:
    """Exact rational value of a number or a string such as ``"8/3"``."""
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidArgument(f"cannot parse exponent {value!r}") from exc
    if isinstance(value, Fraction):
        return value
    v = float(value)
    if not np.isfinite(v):
        return v
    return Fraction(v)


def parse_exponent(value) -> float:
    """Parse a float or an exact rational string such as ``"8/3"``."""
    return float(exact_exponent(value))


class ExponentVector(tuple):
    """Per-axis integrability exponents ``(p_1, ..., p_n)`` with ``1 < p_i < inf``.

    Entries may be given as numbers or rational strings (``"8/3"``).
    """

    def __new__(cls, entries):
        if isinstance(entries, ExponentVector):
            entries = entries.exact
        if np.isscalar(entries) or isinstance(entries, str):
            entries = [entries]
        exact = tuple(exact_exponent(e) for e in entries)
        vals = tuple(float(e) for e in exact)
        if not vals:
            raise InvalidArgument("exponent vector must be non-empty")
        if not all(1.0 < v < np.inf for v in vals):
            raise InvalidArgument(f"exponents must satisfy 1 < p_i < \u221e, got {list(vals)}")
        self = super().__new__(cls, vals)
        self.exact = exact
        return self

    @property
    def n(self) -> int:
        return len(self)

    @property
    def p_minus(self) -> float:
        return min(self)

    @property
    def p_plus(self) -> float:
        return max(self)

    def inverse_sum(self) -> float:
        return float(sum(1.0 / v for v in self))

    def scaled(self, r: float) -> "ExponentVector":
        return ExponentVector([exact_exponent(r) * v for v in self.exact])

    def __repr__(self):
        return f"ExponentVector({list(self)})"


def _as_exponents(p, n: int) -> np.ndarray:
    if isinstance(p, ExponentVector):
        arr = np.asarray(p, dtype=float)
    else:
        arr = np.atleast_1d(np.asarray([parse_exponent(v) for v in np.atleast_1d(p)], dtype=float))
    if arr.size != n:
        raise InvalidArgument(f"exponent vector has {arr.size} entries, grid has dimension {n}")
    return arr


def _iterated_norm(values: np.ndarray, spacing, p: np.ndarray) -> float:
    # axis 0 innermost; each step is a one-dimensional L^{p_i} norm
    a = np.abs(values)
    for h, pi in zip(spacing, p):
        a = (np.sum(a**pi, axis=0) * h) ** (1.0 / pi)
    return float(a)


def mixed_norm(f: GridFunction, p) -> float:
    """Iterated norm: ``L^{p_1}`` in ``x_1`` first, then ``L^{p_2}`` in ``x_2``, and so on.

    Any finite positive exponents are accepted (quasi-norms below 1) so the
    function also serves the convexification route; :class:`ExponentVector`
    enforces the strict ``1 < p_i`` rule where a caller needs it.
    """
    exps = _as_exponents(p, f.grid.ndim)
    if np.any(exps <= 0) or not np.all(np.isfinite(exps)):
        raise InvalidArgument(f"exponents must be finite and positive, got {exps.tolist()}")
    return _iterated_norm(f.values, f.grid.spacing, exps)


def classical_norm(f: GridFunction, p: float) -> float:
    """``(int |f|^p)^(1/p)`` over the whole grid box."""
    p = parse_exponent(p)
    if not p >= 1:
        raise InvalidArgument(f"classical norm needs p >= 1, got {p}")
    return riemann_integral(abs(f) ** p) ** (1.0 / p)


def dual_exponents(p) -> ExponentVector:
    """Componentwise Hölder conjugates ``p_i / (p_i - 1)``."""
    p = ExponentVector(p)
    return ExponentVector([v / (v - 1) for v in p.exact])


def holder_gap(f: GridFunction, g: GridFunction, p) -> float:
    """``||f||_p * ||g||_{p'} - int |f g|``, which is nonnegative by Hölder."""
    if f.grid != g.grid:
        raise InvalidArgument("holder_gap needs both functions on the same grid")
    p = ExponentVector(p)
    return mixed_norm(f, p) * mixed_norm(g, dual_exponents(p)) - riemann_integral(abs(f * g))


def indicator_norm_formula(cube: Box, p) -> float:
    """Closed form ``|Q|^{(1/n) sum_i 1/p_i}`` of the mixed norm of a cube's indicator."""
    if not cube.is_cube():
        raise InvalidArgument("indicator_norm_formula needs a cube")
    exps = _as_exponents(p, cube.ndim)
    return cube.volume ** (float(np.sum(1.0 / exps)) / cube.ndim)


def local_integral_constant(cube: Box, p) -> float:
    """``C_Q = |Q|^{(1/n) sum_i 1/p'_i}`` bounding ``int_Q f`` by ``C_Q ||f||_p``."""
    return indicator_norm_formula(cube, dual_exponents(p))


def weighted_norm(f: GridFunction, p: float, w: GridFunction) -> float:
    """``(int |f|^p w)^(1/p)``."""
    p = parse_exponent(p)
    if not p > 0:
        raise InvalidArgument("weighted norm needs p > 0")
    if f.grid != w.grid:
        raise InvalidArgument("function and weight live on different grids")
    if np.any(w.values <= 0):
        raise InvalidWeight("weight must be strictly positive on the grid")
    return riemann_integral((abs(f) ** p) * w) ** (1.0 / p)


def convexified_norm(f: GridFunction, p, r: float) -> float:
    """Norm of the ``r``-convexification: ``|| |f|^r ||_p^{1/r}``."""
    r = parse_exponent(r)
    if not r > 0:
        raise InvalidArgument("convexification exponent must be positive")
    return mixed_norm(abs(f) ** r, p) ** (1.0 / r)
