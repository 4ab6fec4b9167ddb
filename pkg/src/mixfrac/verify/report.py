"""Verification reports: JSON bodies, CSV ratio tables and refinement trends.

The report body is a deterministic function of the experiment inputs.
Wall-clock time, timestamps and thread counts live in a separate metadata
record so that reruns produce byte-identical bodies.
"""

from __future__ import annotations

import csv
import json
import math
import os
import platform
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

__all__ = [
    "SCHEMA_VERSION",
    "RatioRow",
    "Check",
    "VerificationReport",
    "refinement_growth",
    "is_refinement_stable",
    "STABLE_GROWTH",
]

SCHEMA_VERSION = "1.0"
#: Default tolerance on relative growth per resolution doubling.
STABLE_GROWTH = 0.10

CSV_FIELDS = ("case", "resolution", "descriptor", "numerator", "denominator", "ratio", "skipped", "reason")


def _clean(x):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


@dataclass
class RatioRow:
    case: int
    resolution: tuple
    descriptor: dict
    numerator: float
    denominator: float
    ratio: float | None
    skipped: bool = False
    reason: str = ""

    def to_dict(self) -> dict:
        return _clean(
            {
                "case": self.case,
                "resolution": list(self.resolution),
                "descriptor": self.descriptor,
                "numerator": self.numerator,
                "denominator": self.denominator,
                "ratio": self.ratio,
                "skipped": self.skipped,
                "reason": self.reason,
            }
        )


@dataclass
class Check:
    """One named pass/fail decision with the value and tolerance behind it."""

    name: str
    passed: bool
    value: object = None
    tolerance: object = None
    detail: str = ""

    def to_dict(self) -> dict:
        return _clean(
            {"name": self.name, "passed": bool(self.passed), "value": self.value, "tolerance": self.tolerance, "detail": self.detail}
        )


def refinement_growth(resolutions, values) -> list:
    """Relative growth per resolution doubling between consecutive runs.

    For runs at ``N1 < N2`` points per axis with values ``v1, v2`` this is
    ``(v2 / v1) ** (1 / log2(N2 / N1)) - 1``.
    """
    res = [float(np.atleast_1d(r)[0]) for r in resolutions]
    out = []
    for (n1, v1), (n2, v2) in zip(zip(res, values), zip(res[1:], values[1:])):
        if not (v1 > 0 and v2 > 0 and n2 > n1):
            out.append(math.inf if v2 > 0 else 0.0)
            continue
        out.append((v2 / v1) ** (1.0 / math.log2(n2 / n1)) - 1.0)
    return out


def is_refinement_stable(resolutions, values, tol: float = STABLE_GROWTH) -> bool:
    vals = list(values)
    if len(vals) < 2 or not all(math.isfinite(v) for v in vals):
        return False
    return all(g < tol for g in refinement_growth(resolutions, vals))


@dataclass
class VerificationReport:
    """Structured record of one experiment run."""

    experiment: str
    parameters: dict
    rows: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    witness: dict = field(default_factory=dict)
    trend: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)
    wall_time: float = 0.0
    metadata: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    @property
    def skipped(self) -> list:
        return [r for r in self.rows if r.skipped]

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def add_check(self, name, passed, value=None, tolerance=None, detail="") -> Check:
        c = Check(name, bool(passed), value, tolerance, detail)
        self.checks.append(c)
        return c

    def max_ratio(self, resolution=None) -> float:
        vals = [r.ratio for r in self.rows if not r.skipped and (resolution is None or tuple(r.resolution) == tuple(resolution))]
        return max(vals) if vals else math.nan

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        parts = [f"{c.name}={'ok' if c.passed else 'FAIL'}" for c in self.checks]
        return f"{self.experiment}: {status} ({', '.join(parts)})"

    def body(self) -> dict:
        return _clean(
            {
                "schema_version": SCHEMA_VERSION,
                "experiment": self.experiment,
                "parameters": self.parameters,
                "passed": self.passed,
                "checks": [c.to_dict() for c in self.checks],
                "witness": self.witness,
                "trend": self.trend,
                "extra": self.extra,
                "skipped": [r.case for r in self.rows if r.skipped],
                "rows": [r.to_dict() for r in self.rows],
            }
        )

    def meta(self) -> dict:
        return _clean(
            {
                "schema_version": SCHEMA_VERSION,
                "experiment": self.experiment,
                "wall_time_seconds": self.wall_time,
                "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
                "python": platform.python_version(),
                "numpy": np.__version__,
                **self.metadata,
            }
        )

    def to_json(self) -> str:
        return json.dumps(self.body(), indent=2, sort_keys=True) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_FIELDS)
            for r in self.rows:
                d = r.to_dict()
                w.writerow(
                    [
                        d["case"],
                        "x".join(str(v) for v in d["resolution"]),
                        json.dumps(d["descriptor"], sort_keys=True),
                        repr(d["numerator"]),
                        repr(d["denominator"]),
                        "" if d["ratio"] is None else repr(d["ratio"]),
                        int(d["skipped"]),
                        d["reason"],
                    ]
                )

    def write(self, out_dir, stem: str | None = None) -> dict:
        """Write ``<stem>.json``, ``<stem>.meta.json`` and ``<stem>.csv`` into ``out_dir``."""
        stem = stem or self.experiment
        paths = {
            "report": os.path.join(out_dir, f"{stem}.json"),
            "meta": os.path.join(out_dir, f"{stem}.meta.json"),
            "csv": os.path.join(out_dir, f"{stem}.csv"),
        }
        with open(paths["report"], "w") as fh:
            fh.write(self.to_json())
        with open(paths["meta"], "w") as fh:
            json.dump(self.meta(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        self.write_csv(paths["csv"])
        return paths
