"""Empirical operator-ratio estimation over a corpus and a resolution ladder."""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgument
from ..lattice import Box, FnSpec, GridFunction, make_grid, sample
from ..mixed_norms import ExponentVector, mixed_norm
from ..operators import (
    CubeFamily,
    abs_commutator,
    commutator_fractional,
    fractional_integral,
    fractional_maximal,
    maximal,
    sharp_maximal,
)
from .report import RatioRow, VerificationReport, is_refinement_stable, refinement_growth, STABLE_GROWTH

__all__ = ["OperatorSpec", "operator_ratio", "thread_count", "parallel_map", "grids_for", "THREADS_ENV"]

#: Environment variable holding the worker-thread count for corpus evaluation.
THREADS_ENV = "MIXFRAC_THREADS"

#: Norms below this are treated as zero denominators.
DEGENERATE = 1e-300

OPERATOR_KINDS = (
    "identity",
    "maximal",
    "sharp-maximal",
    "fractional-maximal",
    "fractional-integral",
    "commutator",
    "abs-commutator",
)


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        k = int(raw)
    except ValueError as exc:
        raise InvalidArgument(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
    return max(1, k)


def parallel_map(fn, items) -> list:
    """``[fn(x) for x in items]``, threaded when :data:`THREADS_ENV` > 1; order is preserved."""
    items = list(items)
    k = min(thread_count(), len(items))
    if k <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=k) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class OperatorSpec:
    """Serializable descriptor of an operator ``T`` acting on grid functions.

    ``b`` is the symbol of commutators; ``family`` the cube family of maximal
    operators; ``method`` selects ``"fft"`` or ``"direct"`` summation for
    fractional integrals and commutators.
    """

    kind: str
    alpha: float | None = None
    b: FnSpec | None = None
    family: CubeFamily | None = None
    method: str = "fft"

    def __post_init__(self):
        if self.kind not in OPERATOR_KINDS:
            raise InvalidArgument(f"unknown operator {self.kind!r}; choose from {list(OPERATOR_KINDS)}")
        if self.kind in ("fractional-maximal", "fractional-integral", "commutator", "abs-commutator") and self.alpha is None:
            raise InvalidArgument(f"operator {self.kind!r} needs alpha")
        if self.kind in ("commutator", "abs-commutator") and self.b is None:
            raise InvalidArgument(f"operator {self.kind!r} needs a symbol b")

    def _family(self) -> CubeFamily:
        return self.family or CubeFamily.dyadic()

    def apply(self, f: GridFunction) -> GridFunction:
        k = self.kind
        if k == "identity":
            return f
        if k == "maximal":
            return maximal(f, self._family())
        if k == "sharp-maximal":
            return sharp_maximal(f, self._family())
        if k == "fractional-maximal":
            return fractional_maximal(f, self.alpha, self._family())
        if k == "fractional-integral":
            return fractional_integral(f, self.alpha, method=self.method)
        b = sample(self.b, f.grid)
        if k == "commutator":
            return commutator_fractional(b, f, self.alpha, method=self.method)
        return abs_commutator(b, f, self.alpha)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "method": self.method}
        if self.alpha is not None:
            d["alpha"] = self.alpha
        if self.b is not None:
            d["b"] = self.b.to_dict()
        if self.family is not None:
            d["family"] = self.family.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "OperatorSpec":
        return cls(
            d["kind"],
            None if d.get("alpha") is None else float(d["alpha"]),
            None if d.get("b") is None else FnSpec.from_dict(d["b"]),
            None if d.get("family") is None else CubeFamily.from_dict(d["family"]),
            d.get("method", "fft"),
        )


def grids_for(box: Box, resolutions) -> list:
    return [make_grid(box, r) for r in resolutions]


def ratio_row(case, grid, descriptor, num, den) -> RatioRow:
    res = tuple(grid.resolution)
    if not (math.isfinite(den) and den > DEGENERATE):
        return RatioRow(case, res, descriptor, num, den, None, True, "degenerate denominator")
    if not math.isfinite(num):
        return RatioRow(case, res, descriptor, num, den, math.inf, False, "non-finite numerator")
    return RatioRow(case, res, descriptor, num, den, num / den)


def summarize_rows(report: VerificationReport, resolutions, tol: float = STABLE_GROWTH, prefix: str = "") -> None:
    """Attach per-resolution maxima, refinement trend, witness and the standard checks.

    ``resolutions`` are grid resolution tuples, matching the rows.
    """
    res = [tuple(int(v) for v in r) for r in resolutions]
    maxima = []
    for r in res:
        rows = [x for x in report.rows if tuple(x.resolution) == r and not x.skipped]
        maxima.append(max((x.ratio for x in rows), default=math.nan))
    growth = refinement_growth(res, maxima) if len(res) > 1 else []
    report.trend[prefix + "max_ratio"] = maxima
    report.trend[prefix + "resolutions"] = [list(r) for r in res]
    report.trend[prefix + "growth_per_doubling"] = growth
    finest = [x for x in report.rows if tuple(x.resolution) == res[-1] and not x.skipped]
    if finest:
        w = max(finest, key=lambda x: x.ratio)
        report.witness[prefix.rstrip("_") or "max_ratio"] = {
            "case": w.case,
            "resolution": list(w.resolution),
            "ratio": w.ratio,
            "descriptor": w.descriptor,
        }
    finite = bool(maxima) and all(math.isfinite(m) for m in maxima)
    report.add_check(prefix + "finite", finite, maxima[-1] if maxima else None)
    if len(res) > 1:
        report.add_check(
            prefix + "refinement_stable",
            is_refinement_stable(res, maxima, tol),
            max(growth) if growth else None,
            tol,
            "relative growth of the corpus maximum per resolution doubling",
        )


def operator_ratio(
    op: OperatorSpec,
    corpus,
    in_exp,
    out_exp,
    resolutions,
    box: Box | None = None,
    tol: float = STABLE_GROWTH,
) -> VerificationReport:
    """``||T f||_out / ||f||_in`` for every corpus entry at every resolution.

    Zero denominators are skipped and listed in the report.  At least two
    resolutions are required so that a refinement trend exists.
    """
    t0 = time.perf_counter()
    resolutions = list(resolutions)
    if len(resolutions) < 2:
        raise InvalidArgument("operator_ratio needs at least two resolutions")
    box = box or corpus.box
    p, q = ExponentVector(in_exp), ExponentVector(out_exp)
    if p.n != box.ndim or q.n != box.ndim:
        raise InvalidArgument("exponent dimensions must match the grid dimension")
    report = VerificationReport(
        "operator-ratio",
        {
            "operator": op.to_dict(),
            "in_exponents": list(p),
            "out_exponents": list(q),
            "resolutions": [list(np.atleast_1d(r).tolist()) for r in resolutions],
            "box": box.to_dict(),
            "corpus": corpus.to_dict(),
            "tolerance": tol,
        },
    )
    fns = corpus.functions()
    grids = grids_for(box, resolutions)
    for grid in grids:

        def one(i):
            f = sample(fns[i], grid)
            return mixed_norm(op.apply(f), q), mixed_norm(f, p)

        for i, (num, den) in enumerate(parallel_map(one, range(len(fns)))):
            report.rows.append(ratio_row(i, grid, fns[i].to_dict(), num, den))
    summarize_rows(report, [g.resolution for g in grids], tol)
    report.wall_time = time.perf_counter() - t0
    report.metadata["threads"] = thread_count()
    return report
