"""Deterministic corpora of compactly supported nonnegative test functions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgument
from ..lattice import Box, FnSpec, Grid, sample

__all__ = ["CorpusEntry", "Corpus", "make_corpus", "DEFAULT_KINDS"]

DEFAULT_KINDS = ("indicator", "gaussian", "smooth-random")
_GENERATED = frozenset(DEFAULT_KINDS)


@dataclass(frozen=True)
class CorpusEntry:
    """A base function centred at the origin, then dilated by ``dilation`` and moved to ``translation``.

    The entry represents ``x -> base(dilation * (x - translation))``.
    """

    base: FnSpec
    dilation: float = 1.0
    translation: tuple | None = None

    @property
    def function(self) -> FnSpec:
        return FnSpec(self.base.kind, self.base.params, self.dilation, self.translation)

    @property
    def support_radius(self) -> float:
        return self.base.support_radius() / self.dilation

    def to_dict(self) -> dict:
        return {
            "base": self.base.to_dict(),
            "dilation": self.dilation,
            "translation": None if self.translation is None else list(self.translation),
        }


@dataclass(frozen=True)
class Corpus:
    """An ordered, seeded collection of test functions supported in ``box``."""

    seed: int | None
    entries: tuple
    box: Box
    kinds: tuple = ()

    @property
    def size(self) -> int:
        return len(self.entries)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def functions(self) -> list:
        return [e.function for e in self.entries]

    def sample(self, grid: Grid) -> list:
        return [sample(fn, grid) for fn in self.functions()]

    def subset(self, indices) -> "Corpus":
        return Corpus(self.seed, tuple(self.entries[i] for i in indices), self.box, self.kinds)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "size": self.size,
            "kinds": list(self.kinds),
            "box": self.box.to_dict(),
            "entries": [e.to_dict() for e in self.entries],
        }

    @classmethod
    def from_functions(cls, functions, box: Box) -> "Corpus":
        """Wrap hand-picked :class:`FnSpec` objects (no seed)."""
        entries = tuple(CorpusEntry(fn) for fn in functions)
        if not entries:
            raise InvalidArgument("a corpus needs at least one function")
        return cls(None, entries, box, tuple(sorted({fn.kind for fn in functions})))


def _base(kind: str, radius: float, n: int, rng: np.random.Generator) -> FnSpec:
    zero = np.zeros(n)
    if kind == "indicator":
        half = rng.uniform(0.4, 1.0, size=n) * radius / math.sqrt(n)
        return FnSpec.indicator(Box(-half, half))
    if kind == "gaussian":
        return FnSpec.gaussian(zero, radius / 9.0)
    if kind == "smooth-random":
        seed = int(rng.integers(0, 2**31 - 1))
        return FnSpec.smooth_random(seed, radius / 3.0, zero, radius)
    raise InvalidArgument(f"corpus kind {kind!r} is not generated; choose from {sorted(_GENERATED)}")


def make_corpus(
    seed: int,
    size: int,
    kinds=DEFAULT_KINDS,
    n: int = 1,
    box: Box | None = None,
    radius=(0.1, 0.35),
    fill: float = 0.9,
) -> Corpus:
    """Generate ``size`` nonnegative test functions from ``seed``.

    Kinds cycle in the given order.  The final support radius is drawn
    log-uniformly from ``radius`` (as fractions of the smallest half-width of
    ``box``) and the entry is translated so that its support stays inside the
    central ``fill`` fraction of ``box``.
    """
    if int(size) != size or size < 1:
        raise InvalidArgument(f"corpus size must be a positive integer, got {size}")
    kinds = tuple(kinds)
    if not kinds:
        raise InvalidArgument("at least one corpus kind is required")
    for k in kinds:
        if k not in _GENERATED:
            raise InvalidArgument(f"corpus kind {k!r} is not generated; choose from {sorted(_GENERATED)}")
    box = box or Box.symmetric(n=n)
    if box.ndim != n:
        raise InvalidArgument("corpus box dimension does not match n")
    lo, hi = radius
    if not 0 < lo <= hi < fill:
        raise InvalidArgument("radius fractions must satisfy 0 < lo <= hi < fill")
    half_width = float(np.min(box.sides)) / 2
    center = box.center
    rng = np.random.default_rng(seed)
    entries = []
    for i in range(int(size)):
        rho = half_width * math.exp(rng.uniform(math.log(lo), math.log(hi)))
        lam = math.exp(rng.uniform(math.log(0.5), math.log(2.0)))
        base = _base(kinds[i % len(kinds)], rho * lam, n, rng)
        room = fill * half_width - rho
        t = center + rng.uniform(-room, room, size=n) / math.sqrt(n)
        entries.append(CorpusEntry(base, lam, tuple(float(v) for v in t)))
    return Corpus(int(seed), tuple(entries), box, kinds)
