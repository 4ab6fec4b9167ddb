"""Finite families of grid-aligned cubes and rectangles, and block reductions over them.

A supremum "over all cubes" is replaced by a maximum over a finite,
deterministic family.  The maximum is a lower bound of the true supremum;
refining the family (more dyadic levels, more translates) can only raise it.

Families are descriptors.  :meth:`CubeFamily.resolve` binds one to a grid,
producing :class:`BlockLevel` objects: blocks of equal cell shape given by
their start indices.  All reductions below work level by level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import InvalidArgument
from ..lattice import Box, Grid

__all__ = [
    "BlockLevel",
    "CubeFamily",
    "RectangleFamily",
    "CubeSubfamily",
    "window_reduce",
    "block_sums",
    "block_max",
    "block_min",
    "block_windows",
    "scatter_max",
    "coverage",
]

# elements materialised at once by windowed gathers
_CHUNK = 4_000_000


@dataclass
class BlockLevel:
    """Blocks of ``shape`` cells whose first cell has index ``starts[k]``."""

    shape: tuple
    starts: np.ndarray  # (nblocks, ndim) int

    @property
    def count(self) -> int:
        return len(self.starts)

    @property
    def cells(self) -> int:
        return int(np.prod(self.shape))


def window_reduce(a: np.ndarray, size: int, axis: int, ufunc) -> np.ndarray:
    """``out[i] = ufunc.reduce(a[i:i+size])`` along ``axis`` by binary doubling.

    Cost is ``O(len * log size)``.  Only partial results of nonnegative
    quantities are ever added, so sums of nonnegative data do not suffer
    the cancellation of prefix-sum differences.
    """
    a = np.moveaxis(np.asarray(a), axis, 0)
    n = a.shape[0]
    if not 1 <= size <= n:
        raise InvalidArgument(f"window size {size} outside [1, {n}]")
    m = n - size + 1
    out = None
    offset = 0
    power, length, remaining = a, 1, size
    while remaining:
        if remaining & 1:
            piece = power[offset : offset + m]
            out = piece.copy() if out is None else ufunc(out, piece)
            offset += length
        remaining >>= 1
        if remaining:
            power = ufunc(power[:-length], power[length:])
            length *= 2
    return np.moveaxis(out, 0, axis)


def _separable(values: np.ndarray, shape, ufunc) -> np.ndarray:
    out = values
    for axis, s in enumerate(shape):
        out = window_reduce(out, s, axis, ufunc)
    return out


def block_sums(values: np.ndarray, level: BlockLevel) -> np.ndarray:
    """Sum of ``values`` over each block of ``level``."""
    full = _separable(values, level.shape, np.add)
    return full[tuple(level.starts.T)]


def block_max(values: np.ndarray, level: BlockLevel) -> np.ndarray:
    full = _separable(values, level.shape, np.maximum)
    return full[tuple(level.starts.T)]


def block_min(values: np.ndarray, level: BlockLevel) -> np.ndarray:
    full = _separable(values, level.shape, np.minimum)
    return full[tuple(level.starts.T)]


def block_windows(values: np.ndarray, level: BlockLevel, chunk: int = _CHUNK):
    """Yield ``(slice, windows)`` with ``windows`` of shape ``(k, cells)``."""
    view = sliding_window_view(values, level.shape)
    per = max(1, chunk // max(1, level.cells))
    for lo in range(0, level.count, per):
        idx = level.starts[lo : lo + per]
        w = view[tuple(idx.T)]
        yield slice(lo, lo + len(idx)), w.reshape(len(idx), -1)


def scatter_max(out: np.ndarray, block_values: np.ndarray, level: BlockLevel) -> None:
    """In place ``out[x] = max(out[x], v_Q)`` over every block ``Q`` containing ``x``."""
    grid_shape = out.shape
    a = np.full(tuple(n - s + 1 for n, s in zip(grid_shape, level.shape)), -np.inf)
    np.maximum.at(a, tuple(level.starts.T), block_values)
    for axis, s in enumerate(level.shape):
        pad = [(0, 0)] * a.ndim
        pad[axis] = (s - 1, s - 1)
        a = np.pad(a, pad, constant_values=-np.inf)
        a = window_reduce(a, s, axis, np.maximum)
    np.maximum(out, a, out=out)


def coverage(grid: Grid, family) -> np.ndarray:
    """Boolean mask of cells contained in at least one block of ``family``."""
    out = np.full(grid.shape, -np.inf)
    for level in family.resolve(grid):
        scatter_max(out, np.zeros(level.count), level)
    return out > -np.inf


def _axis_starts(lo: int, hi: int, side: int, stride: int) -> np.ndarray:
    # starts in [lo, hi - side] spaced by stride; the last admissible start is always included
    if hi - side < lo:
        return np.empty(0, dtype=int)
    s = list(range(lo, hi - side + 1, stride))
    if s[-1] != hi - side:
        s.append(hi - side)
    return np.asarray(s, dtype=int)


def _product(axes) -> np.ndarray:
    if any(len(a) == 0 for a in axes):
        return np.empty((0, len(axes)), dtype=int)
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _cells(length: float, h: float, what: str) -> int:
    k = length / h
    r = int(round(k))
    if abs(k - r) > 1e-9 * max(1.0, k):
        raise InvalidArgument(f"{what} ({length}) is not a whole number of cells ({h})")
    return r


@dataclass(frozen=True)
class CubeFamily:
    """Deterministic finite family of cubes.

    Use the constructors :meth:`dyadic`, :meth:`dense`, :meth:`explicit` and
    :meth:`union`.  Every cube is grid-aligned when resolved, so its
    Riemann-sum measure equals its geometric volume.
    """

    kind: str
    root: Box | None = None
    levels: tuple = (0, None)
    translates: int = 1
    max_side: float | None = None
    boxes: tuple = ()
    members: tuple = field(default=())

    # -- constructors -------------------------------------------------------
    @classmethod
    def dyadic(cls, root: Box | None = None, levels=(0, None), translates: int = 2) -> "CubeFamily":
        """Dyadic subcubes of ``root`` at levels ``levels[0]..levels[1]``.

        Level ``L`` cubes have side ``side(root) / 2**L``; each level is
        shifted by multiples of ``side / translates``.  ``levels[1] = None``
        descends to single cells.  ``root = None`` means the grid box.
        """
        if translates < 1:
            raise InvalidArgument("translates must be >= 1")
        if root is not None and not root.is_cube():
            raise InvalidArgument("dyadic root must be a cube")
        lo, hi = levels
        if lo < 0 or (hi is not None and hi < lo):
            raise InvalidArgument(f"invalid level range {levels}")
        return cls("dyadic", root=root, levels=(int(lo), hi if hi is None else int(hi)), translates=int(translates))

    @classmethod
    def dense(cls, max_side: float | None = None) -> "CubeFamily":
        """Every grid-aligned cube (all positions, all sides up to ``max_side``)."""
        return cls("dense", max_side=max_side)

    @classmethod
    def explicit(cls, boxes) -> "CubeFamily":
        boxes = tuple(boxes)
        if not boxes:
            raise InvalidArgument("cube family must not be empty")
        for b in boxes:
            if not b.is_cube(rtol=1e-9):
                raise InvalidArgument(f"{b} is not a cube")
        return cls("explicit", boxes=boxes)

    @classmethod
    def union(cls, *families: "CubeFamily") -> "CubeFamily":
        if not families:
            raise InvalidArgument("cube family must not be empty")
        return cls("union", members=tuple(families))

    # -- resolution ---------------------------------------------------------
    def resolve(self, grid: Grid) -> list:
        levels = self._resolve(grid)
        levels = [lv for lv in levels if lv.count]
        if not levels:
            raise InvalidArgument("cube family has no cube inside the grid box")
        return levels

    def _resolve(self, grid: Grid) -> list:
        if self.kind == "union":
            return [lv for m in self.members for lv in m._resolve(grid)]
        if self.kind == "explicit":
            return [_box_level(grid, b) for b in self.boxes]
        if self.kind == "dense":
            return self._dense(grid)
        return self._dyadic(grid)

    def _dense(self, grid: Grid) -> list:
        if not grid.is_isotropic():
            raise InvalidArgument("dense cube families need equal spacing on every axis")
        h = grid.spacing[0]
        top = min(grid.shape)
        if self.max_side is not None:
            top = min(top, int(math.floor(self.max_side / h + 1e-9)))
        out = []
        for s in range(1, top + 1):
            axes = [np.arange(0, n - s + 1) for n in grid.shape]
            out.append(BlockLevel((s,) * grid.ndim, _product(axes)))
        return out

    def _dyadic(self, grid: Grid) -> list:
        root = self.root or grid.box
        if not root.is_cube():
            raise InvalidArgument("dyadic family over a non-cubic grid box needs an explicit cubic root")
        if root.ndim != grid.ndim:
            raise InvalidArgument("root dimension does not match the grid")
        h = grid.spacing
        origin = [_cells(root.lower[i] - grid.box.lower[i], h[i], "root offset") for i in range(grid.ndim)]
        extent = [_cells(root.sides[i], h[i], "root side") for i in range(grid.ndim)]
        side0 = float(root.sides[0])
        lmin, lmax = self.levels
        out = []
        level = lmin
        while lmax is None or level <= lmax:
            side = side0 / 2**level
            cells = [side / hi for hi in h]
            if min(cells) < 1 - 1e-9:
                break
            level += 1
            rounded = [int(round(c)) for c in cells]
            if any(abs(c - r) > 1e-9 * c for c, r in zip(cells, rounded)):
                continue
            axes = []
            for i, s in enumerate(rounded):
                lo = max(origin[i], 0)
                hi = min(origin[i] + extent[i], grid.shape[i])
                axes.append(_axis_starts(lo, hi, s, max(1, s // self.translates)))
            out.append(BlockLevel(tuple(rounded), _product(axes)))
        return out

    def cubes(self, grid: Grid) -> list:
        """The resolved family as a list of :class:`Box` objects."""
        return [b for lv in self.resolve(grid) for b in level_boxes(grid, lv)]

    # -- serialisation ------------------------------------------------------
    def to_dict(self) -> dict:
        if self.kind == "dyadic":
            d = {"kind": "dyadic", "levels": list(self.levels), "translates": self.translates}
            if self.root is not None:
                d["root"] = self.root.to_dict()
            return d
        if self.kind == "dense":
            return {"kind": "dense", "max_side": self.max_side}
        if self.kind == "explicit":
            return {"kind": "explicit", "boxes": [b.to_dict() for b in self.boxes]}
        return {"kind": "union", "members": [m.to_dict() for m in self.members]}

    @classmethod
    def from_dict(cls, d: dict) -> "CubeFamily":
        kind = d.get("kind", "dyadic")
        if kind == "dyadic":
            root = d.get("root")
            levels = d.get("levels", [0, None])
            return cls.dyadic(
                None if root is None else Box(root["lower"], root["upper"]),
                tuple(levels),
                int(d.get("translates", 2)),
            )
        if kind == "dense":
            return cls.dense(d.get("max_side"))
        if kind == "explicit":
            return cls.explicit(Box(b["lower"], b["upper"]) for b in d["boxes"])
        if kind == "union":
            return cls.union(*(cls.from_dict(m) for m in d["members"]))
        raise InvalidArgument(f"unknown cube family kind {kind!r}")


def _box_level(grid: Grid, box: Box) -> BlockLevel:
    if box.ndim != grid.ndim:
        raise InvalidArgument("box dimension does not match the grid")
    idx = grid.index_range(box)
    shape = tuple(s.stop - s.start for s in idx)
    if any(k <= 0 for k in shape):
        return BlockLevel((1,) * grid.ndim, np.empty((0, grid.ndim), dtype=int))
    return BlockLevel(shape, np.asarray([[s.start for s in idx]], dtype=int))


def level_boxes(grid: Grid, level: BlockLevel) -> list:
    lower = np.asarray(grid.box.lower)
    h = np.asarray(grid.spacing)
    size = np.asarray(level.shape) * h
    return [Box(tuple(lower + st * h), tuple(lower + st * h + size)) for st in level.starts]


@dataclass(frozen=True)
class RectangleFamily:
    """Rectangles ``Q_1 x Q_2`` with ``Q_j`` from a cube family on an axis group.

    ``split`` is the number of leading axes forming the first factor
    ``R^{n_1}``; the remaining axes form ``R^{n_2}``.
    """

    first: CubeFamily
    second: CubeFamily
    split: int = 1

    def _factor_grids(self, grid: Grid):
        k = self.split
        if not 1 <= k < grid.ndim:
            raise InvalidArgument("rectangle split must leave both factors non-empty")
        b = grid.box
        g1 = Grid(Box(b.lower[:k], b.upper[:k]), grid.resolution[:k])
        g2 = Grid(Box(b.lower[k:], b.upper[k:]), grid.resolution[k:])
        return g1, g2

    def resolve(self, grid: Grid) -> list:
        g1, g2 = self._factor_grids(grid)
        out = []
        for l1 in self.first.resolve(g1):
            for l2 in self.second.resolve(g2):
                i1 = np.repeat(l1.starts, l2.count, axis=0)
                i2 = np.tile(l2.starts, (l1.count, 1))
                out.append(BlockLevel(l1.shape + l2.shape, np.hstack([i1, i2])))
        return out

    def cube_levels(self, grid: Grid) -> list:
        """The sub-family of rectangles that are cubes."""
        h = np.asarray(grid.spacing)
        out = []
        for lv in self.resolve(grid):
            sides = np.asarray(lv.shape) * h
            if np.all(np.abs(sides - sides[0]) <= 1e-12 * sides[0]):
                out.append(lv)
        return out

    def cube_subfamily(self) -> "CubeSubfamily":
        """The cubes among the rectangles, usable wherever a cube family is expected."""
        return CubeSubfamily(self)

    def rectangles(self, grid: Grid) -> list:
        return [b for lv in self.resolve(grid) for b in level_boxes(grid, lv)]

    def to_dict(self) -> dict:
        return {"first": self.first.to_dict(), "second": self.second.to_dict(), "split": self.split}

    @classmethod
    def from_dict(cls, d: dict) -> "RectangleFamily":
        return cls(CubeFamily.from_dict(d["first"]), CubeFamily.from_dict(d["second"]), int(d.get("split", 1)))


@dataclass(frozen=True)
class CubeSubfamily:
    """Rectangles of a :class:`RectangleFamily` whose sides are all equal."""

    parent: RectangleFamily

    def resolve(self, grid: Grid) -> list:
        levels = self.parent.cube_levels(grid)
        if not levels:
            raise InvalidArgument("rectangle family contains no cubes on this grid")
        return levels
