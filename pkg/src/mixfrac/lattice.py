"""Uniform cell-centred grids, grid functions and a catalogue of test functions.

Every function in the package is carried as a :class:`GridFunction`: the
samples of a real function at the cell centres of a uniform rectangular
:class:`Grid`.  Integrals are midpoint-rule sums, so a grid function is
treated as the step function that is constant on each cell.

Axis 0 of the value array is the first coordinate ``x_1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidArgument, SingularityError

__all__ = [
    "Box",
    "Grid",
    "GridFunction",
    "FnSpec",
    "make_grid",
    "sample",
    "riemann_integral",
    "DEFAULT_HALF_WIDTH",
]

#: ``R^n`` is truncated to ``[-DEFAULT_HALF_WIDTH, DEFAULT_HALF_WIDTH]^n``.
DEFAULT_HALF_WIDTH = 8.0


@dataclass(frozen=True)
class Box:
    """Closed axis-parallel box ``prod_i [lower[i], upper[i]]``."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        lower = tuple(float(v) for v in np.atleast_1d(self.lower))
        upper = tuple(float(v) for v in np.atleast_1d(self.upper))
        if len(lower) == 0 or len(lower) != len(upper):
            raise InvalidArgument("box bounds must be non-empty and of equal length")
        if any(not (lo < hi) for lo, hi in zip(lower, upper)):
            raise InvalidArgument(f"box needs lower < upper on every axis, got {lower}, {upper}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def cube(cls, center, side: float) -> "Box":
        """The cube ``Q(center, side)`` of the given side length."""
        c = np.atleast_1d(np.asarray(center, dtype=float))
        return cls(tuple(c - side / 2), tuple(c + side / 2))

    @classmethod
    def symmetric(cls, half_width: float = DEFAULT_HALF_WIDTH, n: int = 1) -> "Box":
        return cls((-half_width,) * n, (half_width,) * n)

    @property
    def ndim(self) -> int:
        return len(self.lower)

    @property
    def sides(self) -> np.ndarray:
        return np.subtract(self.upper, self.lower)

    @property
    def volume(self) -> float:
        return float(np.prod(self.sides))

    @property
    def center(self) -> np.ndarray:
        return (np.asarray(self.lower) + np.asarray(self.upper)) / 2

    def is_cube(self, rtol: float = 1e-12) -> bool:
        s = self.sides
        return bool(np.all(np.abs(s - s[0]) <= rtol * s[0]))

    def contains_box(self, other: "Box", atol: float = 1e-12) -> bool:
        return all(
            lo - atol <= olo and ohi <= hi + atol
            for lo, hi, olo, ohi in zip(self.lower, self.upper, other.lower, other.upper)
        )

    def to_dict(self) -> dict:
        return {"lower": list(self.lower), "upper": list(self.upper)}


@dataclass(frozen=True)
class Grid:
    """Uniform grid of ``resolution[i]`` cells along axis ``i`` of ``box``."""

    box: Box
    resolution: tuple
    spacing: tuple = field(init=False)

    def __post_init__(self):
        res = tuple(int(r) for r in np.atleast_1d(self.resolution))
        if len(res) != self.box.ndim:
            raise InvalidArgument("resolution length must match the box dimension")
        if any(r < 1 for r in res):
            raise InvalidArgument(f"resolution entries must be positive, got {res}")
        object.__setattr__(self, "resolution", res)
        object.__setattr__(
            self,
            "spacing",
            tuple((hi - lo) / r for lo, hi, r in zip(self.box.lower, self.box.upper, res)),
        )

    @property
    def ndim(self) -> int:
        return len(self.resolution)

    @property
    def shape(self) -> tuple:
        return self.resolution

    @property
    def size(self) -> int:
        return int(np.prod(self.resolution))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def centers(self, axis: int) -> np.ndarray:
        k = np.arange(self.resolution[axis])
        return self.box.lower[axis] + (k + 0.5) * self.spacing[axis]

    def points(self) -> np.ndarray:
        """Cell centres as an array of shape ``shape + (ndim,)``."""
        axes = np.meshgrid(*[self.centers(i) for i in range(self.ndim)], indexing="ij")
        return np.stack(axes, axis=-1)

    def index_range(self, region: Box) -> tuple:
        """Per-axis ``slice`` of the cells whose centres lie in ``region``."""
        out = []
        for i in range(self.ndim):
            c = self.centers(i)
            lo = int(np.searchsorted(c, region.lower[i], side="left"))
            hi = int(np.searchsorted(c, region.upper[i], side="right"))
            out.append(slice(lo, hi))
        return tuple(out)

    def is_isotropic(self, rtol: float = 1e-12) -> bool:
        h = np.asarray(self.spacing)
        return bool(np.all(np.abs(h - h[0]) <= rtol * h[0]))

    def to_dict(self) -> dict:
        return {"box": self.box.to_dict(), "resolution": list(self.resolution)}


def make_grid(box: Box, resolution) -> Grid:
    """Grid with cell centres at ``lower[i] + (k + 0.5) * spacing[i]``."""
    res = np.atleast_1d(np.asarray(resolution))
    if res.size == 1 and box.ndim > 1:
        res = np.repeat(res, box.ndim)
    if np.any(res <= 0):
        raise InvalidArgument(f"resolution entries must be positive, got {res.tolist()}")
    return Grid(box, tuple(int(r) for r in res))


class GridFunction:
    """Real samples of a function at the cell centres of ``grid``.

    ``values`` has shape ``grid.shape`` and is read-only.  Arithmetic between
    grid functions requires identical grids.
    """

    __slots__ = ("grid", "values", "meta")

    def __init__(self, grid: Grid, values, meta: dict | None = None):
        v = np.array(values, dtype=float)
        if v.size != grid.size:
            raise InvalidArgument(f"expected {grid.size} values, got {v.size}")
        v = v.reshape(grid.shape)
        if not np.all(np.isfinite(v)):
            raise InvalidArgument("grid function values must be finite")
        v.flags.writeable = False
        self.grid = grid
        self.values = v
        self.meta = dict(meta or {})

    @classmethod
    def constant(cls, grid: Grid, c: float) -> "GridFunction":
        return cls(grid, np.full(grid.shape, float(c)))

    @property
    def flat(self) -> np.ndarray:
        return self.values.ravel()

    def with_values(self, values, **meta) -> "GridFunction":
        return GridFunction(self.grid, values, meta)

    def _other(self, other):
        if isinstance(other, GridFunction):
            if other.grid != self.grid:
                raise InvalidArgument("grid functions live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return self.with_values(self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self.with_values(self.values - self._other(other))

    def __rsub__(self, other):
        return self.with_values(self._other(other) - self.values)

    def __mul__(self, other):
        return self.with_values(self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self.with_values(self.values / self._other(other))

    def __neg__(self):
        return self.with_values(-self.values)

    def __abs__(self):
        return self.with_values(np.abs(self.values))

    def __pow__(self, r):
        return self.with_values(self.values**r)

    def __repr__(self):
        return f"GridFunction(shape={self.grid.shape}, box={self.grid.box.lower}..{self.grid.box.upper})"


_KINDS = (
    "indicator",
    "power",
    "logabs",
    "coordinate",
    "gaussian",
    "smooth-random",
    "lipschitz-power",
    "constant",
)
_SINGULAR = ("power", "logabs")


@dataclass(frozen=True)
class FnSpec:
    """Analytic test function ``x -> base(dilation * (x - shift))``.

    ``kind`` selects the base function; ``params`` holds its parameters:

    ========================  ==============================================
    ``indicator``             ``lower``, ``upper`` (closed box)
    ``power``                 ``a``; ``|x|^a``, singular at 0
    ``logabs``                ``log|x|``, singular at 0
    ``coordinate``            ``axis``; ``x_axis``
    ``gaussian``              ``center``, ``width``; ``exp(-|x-c|^2 / (2 w^2))``
    ``smooth-random``         ``seed``, ``bandwidth``, ``center``, ``radius``
    ``lipschitz-power``       ``beta``; ``|x|^beta``
    ``constant``              ``value``
    ========================  ==============================================
    """

    kind: str
    params: dict = field(default_factory=dict)
    dilation: float = 1.0
    shift: tuple | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidArgument(f"unknown function kind {self.kind!r}")
        if not self.dilation > 0:
            raise InvalidArgument("dilation must be positive")

    # -- constructors -------------------------------------------------------
    @classmethod
    def indicator(cls, box: Box) -> "FnSpec":
        return cls("indicator", {"lower": list(box.lower), "upper": list(box.upper)})

    @classmethod
    def power(cls, a: float) -> "FnSpec":
        return cls("power", {"a": float(a)})

    @classmethod
    def logabs(cls) -> "FnSpec":
        return cls("logabs")

    @classmethod
    def coordinate(cls, axis: int = 0) -> "FnSpec":
        return cls("coordinate", {"axis": int(axis)})

    @classmethod
    def gaussian(cls, center, width: float) -> "FnSpec":
        return cls("gaussian", {"center": list(np.atleast_1d(center).astype(float)), "width": float(width)})

    @classmethod
    def smooth_random(cls, seed: int, bandwidth: float, center, radius: float) -> "FnSpec":
        return cls(
            "smooth-random",
            {
                "seed": int(seed),
                "bandwidth": float(bandwidth),
                "center": list(np.atleast_1d(center).astype(float)),
                "radius": float(radius),
            },
        )

    @classmethod
    def lipschitz_power(cls, beta: float) -> "FnSpec":
        return cls("lipschitz-power", {"beta": float(beta)})

    @classmethod
    def constant(cls, value: float) -> "FnSpec":
        return cls("constant", {"value": float(value)})

    def dilate(self, lam: float) -> "FnSpec":
        """FnSpec of ``x -> self(lam * x)``."""
        shift = None if self.shift is None else tuple(s / lam for s in self.shift)
        return FnSpec(self.kind, self.params, self.dilation * lam, shift)

    def translate(self, t) -> "FnSpec":
        """FnSpec of ``x -> self(x - t)``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        base = np.zeros_like(t) if self.shift is None else np.asarray(self.shift)
        return FnSpec(self.kind, self.params, self.dilation, tuple(base + t))

    # -- evaluation ---------------------------------------------------------
    @property
    def singular(self) -> bool:
        return self.kind in _SINGULAR

    def _local(self, x: np.ndarray) -> np.ndarray:
        if self.shift is not None:
            x = x - np.asarray(self.shift)
        return self.dilation * x

    def __call__(self, x) -> np.ndarray:
        """Evaluate at points ``x`` of shape ``(..., n)``."""
        x = self._local(np.asarray(x, dtype=float))
        p = self.params
        k = self.kind
        if k == "indicator":
            lo, hi = np.asarray(p["lower"]), np.asarray(p["upper"])
            return np.all((x >= lo) & (x <= hi), axis=-1).astype(float)
        if k == "constant":
            return np.full(x.shape[:-1], p["value"])
        if k == "coordinate":
            return x[..., p["axis"]].copy()
        r = np.sqrt(np.sum(x * x, axis=-1))
        if k == "power":
            return r ** p["a"]
        if k == "logabs":
            return np.log(r)
        if k == "lipschitz-power":
            return r ** p["beta"]
        if k == "gaussian":
            d = x - np.asarray(p["center"])
            return np.exp(-np.sum(d * d, axis=-1) / (2 * p["width"] ** 2))
        if k == "smooth-random":
            return _smooth_random(x, p)
        raise AssertionError(k)

    def support_radius(self) -> float:
        """Radius about the shifted origin containing the numerical support."""
        p = self.params
        if self.kind == "indicator":
            r = max(np.max(np.abs(p["lower"])), np.max(np.abs(p["upper"])))
            r = r * math.sqrt(len(p["lower"]))
        elif self.kind == "gaussian":
            r = np.linalg.norm(p["center"]) + 9 * p["width"]
        elif self.kind == "smooth-random":
            r = np.linalg.norm(p["center"]) + p["radius"]
        else:
            return math.inf
        return float(r) / self.dilation

    def to_dict(self) -> dict:
        d = {"kind": self.kind, **self.params}
        if self.dilation != 1.0:
            d["dilation"] = self.dilation
        if self.shift is not None:
            d["shift"] = list(self.shift)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "FnSpec":
        d = dict(d)
        kind = d.pop("kind")
        dilation = float(d.pop("dilation", 1.0))
        shift = d.pop("shift", None)
        if kind == "indicator" and "box" in d:
            box = d.pop("box")
            d["lower"], d["upper"] = list(box["lower"]), list(box["upper"])
        return cls(kind, d, dilation, None if shift is None else tuple(shift))


def _smooth_random(x: np.ndarray, p: dict) -> np.ndarray:
    # nonnegative random trigonometric polynomial squared, times a C-infinity bump
    n = x.shape[-1]
    rng = np.random.default_rng(p["seed"])
    terms = 6
    omega = rng.normal(0.0, 1.0 / p["bandwidth"], size=(terms, n))
    phase = rng.uniform(0.0, 2 * np.pi, size=terms)
    amp = rng.normal(0.0, 1.0, size=terms) / math.sqrt(terms)
    d = x - np.asarray(p["center"])
    trig = 0.6 + np.cos(d @ omega.T + phase) @ amp
    rho2 = np.sum(d * d, axis=-1) / p["radius"] ** 2
    inside = rho2 < 1.0
    bump = np.zeros_like(rho2)
    bump[inside] = np.exp(1.0 - 1.0 / (1.0 - rho2[inside]))
    return trig**2 * bump


def sample(spec: FnSpec, grid: Grid) -> GridFunction:
    """Evaluate ``spec`` at every cell centre of ``grid``."""
    pts = grid.points()
    if spec.singular:
        local = spec._local(pts)
        hit = np.all(local == 0.0, axis=-1)
        if np.any(hit):
            cell = tuple(int(i) for i in np.argwhere(hit)[0])
            raise SingularityError(
                f"{spec.kind} is singular at the centre of cell {cell}", cell=cell
            )
    with np.errstate(divide="ignore", invalid="ignore"):
        values = spec(pts)
    return GridFunction(grid, values, {"spec": spec.to_dict()})


def riemann_integral(f: GridFunction, region: Box | None = None) -> float:
    """Midpoint-rule integral of ``f`` over the cells whose centres lie in ``region``."""
    grid = f.grid
    if region is None:
        return float(np.sum(f.values)) * grid.cell_volume
    if region.ndim != grid.ndim or not grid.box.contains_box(region):
        raise InvalidArgument("integration region must lie inside the grid box")
    return float(np.sum(f.values[grid.index_range(region)])) * grid.cell_volume


def from_callable(func, grid: Grid) -> GridFunction:
    """Sample an arbitrary vectorised callable ``func(points)``."""
    return GridFunction(grid, func(grid.points()))


def as_grid_function(values: Sequence[float] | np.ndarray, grid: Grid) -> GridFunction:
    return GridFunction(grid, np.asarray(values, dtype=float))
