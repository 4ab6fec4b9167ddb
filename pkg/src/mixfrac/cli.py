"""Command-line front end.

Usage::

    mixfrac norm     --config norm.json --out results/
    mixfrac op       --config op.json --resolution 256
    mixfrac weight   --config weight.json --out results/
    mixfrac seminorm --config b.json
    mixfrac verify   --experiment bmo-sufficiency --seed 42 --out results/

Exit status is 0 when every check passes, 1 when a check fails and 2 on a
configuration error, which is also written to stderr as a JSON object.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time

import numpy as np

from .errors import InvalidArgument
from .lattice import Box, FnSpec, GridFunction, make_grid, sample
from .mixed_norms import (
    ExponentVector,
    classical_norm,
    convexified_norm,
    exact_exponent,
    indicator_norm_formula,
    mixed_norm,
    weighted_norm,
)
from .operators import CubeFamily, RectangleFamily
from .seminorms import bmo_norm, lipschitz_norm_oscillation, lipschitz_norm_pointwise
from .verify.harness import OperatorSpec, thread_count
from .verify.registry import EXPERIMENTS, run_experiment
from .verify.report import VerificationReport
from .weights import (
    Weight,
    a1_constant,
    ap_constant,
    ap_star_constant,
    ap_table,
    embedding_weight,
    power_weight,
    product_weight,
)

__all__ = ["main", "build_parser", "ConfigError", "EXIT_PASS", "EXIT_FAIL", "EXIT_CONFIG"]

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
COMMANDS = ("norm", "op", "weight", "seminorm", "verify")

#: Relative agreement required between a sampled indicator norm and its closed form.
CLOSED_FORM_RTOL = 1e-3
DEFAULT_RESOLUTION = 256
DEFAULT_HALF_WIDTH = 8.0


class ConfigError(InvalidArgument):
    """The run configuration is malformed or incomplete."""


# -- config helpers ---------------------------------------------------------
def _csv_ints(text: str) -> list:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc
    if not vals or any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError(f"resolutions must be positive integers, got {text!r}")
    return vals


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def _box(cfg: dict, n: int) -> Box:
    if "box" in cfg:
        b = cfg["box"]
        return Box(b["lower"], b["upper"])
    return Box.symmetric(float(cfg.get("half_width", DEFAULT_HALF_WIDTH)), n)


def _resolution(cfg: dict):
    r = cfg.get("resolution", DEFAULT_RESOLUTION)
    if isinstance(r, list):
        r = r[0] if len(r) == 1 else tuple(r)
    return r


def _family(cfg: dict) -> CubeFamily:
    return CubeFamily.from_dict(cfg.get("family", {"kind": "dyadic"}))


def _function(cfg: dict, key: str = "function") -> FnSpec:
    if key not in cfg:
        raise ConfigError(f"config needs a {key!r} descriptor")
    return FnSpec.from_dict(cfg[key])


def _dimension(cfg: dict, fallback: int = 1) -> int:
    if "box" in cfg:
        return len(cfg["box"]["lower"])
    if "p" in cfg and isinstance(cfg["p"], list):
        return len(cfg["p"])
    return int(cfg.get("n", fallback))


def _weight_from(d: dict, grid) -> Weight:
    kind = d.get("kind", "unit")
    if kind == "unit":
        return Weight(GridFunction(grid, np.ones(grid.shape)), {"kind": "unit"})
    if kind == "power":
        return power_weight(grid, float(exact_exponent(d["a"])))
    if kind == "embedding":
        cube = d.get("cube")
        return embedding_weight(
            grid,
            float(exact_exponent(d["epsilon"])),
            CubeFamily.from_dict(d.get("family", {"kind": "dyadic"})),
            None if cube is None else Box(cube["lower"], cube["upper"]),
        )
    if kind == "function":
        return Weight(sample(FnSpec.from_dict(d["function"]), grid), {"kind": "function", **d})
    raise ConfigError(f"unknown weight kind {kind!r}")


# -- subcommands ------------------------------------------------------------
def _run_norm(cfg: dict) -> VerificationReport:
    f_spec = _function(cfg)
    kind = cfg.setdefault("kind", "mixed")
    n = _dimension(cfg)
    box = _box(cfg, n)
    cfg.setdefault("resolution", DEFAULT_RESOLUTION)
    grid = make_grid(box, _resolution(cfg))
    f = sample(f_spec, grid)
    report = VerificationReport("norm", {"config": cfg})
    if kind == "mixed":
        p = ExponentVector(cfg["p"])
        value = mixed_norm(f, p)
    elif kind == "classical":
        p = float(exact_exponent(cfg["p"]))
        value = classical_norm(f, p)
    elif kind == "weighted":
        p = float(exact_exponent(cfg["p"]))
        value = weighted_norm(f, p, _weight_from(cfg.get("weight", {}), grid).w)
    elif kind == "convexified":
        value = convexified_norm(f, ExponentVector(cfg["p"]), float(exact_exponent(cfg["r"])))
    else:
        raise ConfigError(f"unknown norm kind {kind!r}")
    report.extra["value"] = value
    report.add_check("finite", math.isfinite(value), value)
    if f_spec.kind == "indicator" and kind == "mixed" and f_spec.shift is None and f_spec.dilation == 1.0:
        cube = Box(f_spec.params["lower"], f_spec.params["upper"])
        if cube.is_cube():
            closed = indicator_norm_formula(cube, p)
            err = abs(value - closed) / closed
            report.extra["closed_form"] = closed
            report.add_check("closed_form", err <= CLOSED_FORM_RTOL, err, CLOSED_FORM_RTOL, "relative error")
    return report


def _run_op(cfg: dict) -> tuple:
    if "operator" not in cfg:
        raise ConfigError("config needs an 'operator' descriptor")
    op = OperatorSpec.from_dict(cfg["operator"])
    f_spec = _function(cfg)
    n = _dimension(cfg)
    cfg.setdefault("resolution", DEFAULT_RESOLUTION)
    grid = make_grid(_box(cfg, n), _resolution(cfg))
    out = op.apply(sample(f_spec, grid))
    report = VerificationReport("op", {"config": cfg})
    finite = bool(np.all(np.isfinite(out.values)))
    report.extra["max"] = float(np.max(np.abs(out.values)))
    if "q" in cfg:
        report.extra["norm"] = mixed_norm(out, ExponentVector(cfg["q"]))
    report.add_check("finite", finite, report.extra["max"])
    pts = grid.points().reshape(-1, grid.ndim)
    header = [f"x{i + 1}" for i in range(grid.ndim)] + ["value"]
    rows = [[*map(repr, map(float, x)), repr(float(v))] for x, v in zip(pts, out.values.ravel())]
    return report, ("values", header, rows)


def _run_weight(cfg: dict) -> tuple:
    n = _dimension(cfg)
    cfg.setdefault("resolution", DEFAULT_RESOLUTION)
    grid = make_grid(_box(cfg, n), _resolution(cfg))
    w_cfg = cfg.get("weight", {"kind": "unit"})
    if w_cfg.get("kind") == "product":
        if n != 2:
            raise ConfigError("product weights are built on two-dimensional boxes")
        g1 = make_grid(Box(grid.box.lower[:1], grid.box.upper[:1]), grid.resolution[0])
        g2 = make_grid(Box(grid.box.lower[1:], grid.box.upper[1:]), grid.resolution[1])
        w = product_weight(_weight_from(w_cfg["first"], g1), _weight_from(w_cfg["second"], g2))
    else:
        w = _weight_from(w_cfg, grid)
    p = float(exact_exponent(cfg.setdefault("p", 2)))
    family = _family(cfg)
    report = VerificationReport("weight", {"config": cfg})
    const = a1_constant(w, family) if p == 1 else ap_constant(w, p, family)
    report.extra["constant"] = const
    report.extra["provenance"] = w.provenance
    if "rectangles" in cfg:
        star = ap_star_constant(w, p, RectangleFamily.from_dict(cfg["rectangles"]))
        report.extra["star_constant"] = star
    report.add_check("finite", math.isfinite(const), const)
    header = [f"lower{i + 1}" for i in range(n)] + [f"upper{i + 1}" for i in range(n)] + ["constant"]
    rows = [[*map(repr, b.lower), *map(repr, b.upper), repr(v)] for b, v in ap_table(w, p, family)]
    return report, ("cubes", header, rows)


def _run_seminorm(cfg: dict) -> VerificationReport:
    b_spec = _function(cfg)
    kind = cfg.setdefault("kind", "bmo")
    n = _dimension(cfg)
    cfg.setdefault("resolution", DEFAULT_RESOLUTION)
    b = sample(b_spec, make_grid(_box(cfg, n), _resolution(cfg)))
    report = VerificationReport("seminorm", {"config": cfg})
    if kind == "bmo":
        value = bmo_norm(b, _family(cfg))
    elif kind == "lipschitz":
        value = lipschitz_norm_pointwise(b, float(exact_exponent(cfg["beta"])))
    elif kind == "lipschitz-oscillation":
        value = lipschitz_norm_oscillation(
            b, float(exact_exponent(cfg["beta"])), float(exact_exponent(cfg.get("q", 1))), _family(cfg)
        )
    else:
        raise ConfigError(f"unknown seminorm kind {kind!r}")
    report.extra["value"] = value
    report.add_check("finite", math.isfinite(value), value)
    return report


def _run_verify(cfg: dict, experiment: str | None) -> VerificationReport:
    name = experiment or cfg.get("experiment")
    if name is None:
        raise ConfigError(f"verify needs an experiment id; choose from {sorted(EXPERIMENTS)}")
    if name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}")
    params = {k: v for k, v in cfg.items() if k not in ("command", "experiment", "out")}
    report, _ = run_experiment(name, params)
    return report


# -- output -----------------------------------------------------------------
def _write_table(path: str, header: list, rows: list) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _one_line(report: VerificationReport) -> str:
    line = report.summary()
    if "value" in report.extra:
        line += f" value={report.extra['value']:.6g}"
    if "closed_form" in report.extra:
        line += f" closed_form={report.extra['closed_form']:.6g}"
    if "constant" in report.extra:
        line += f" constant={report.extra['constant']:.6g}"
    return line


def _error(kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": {"type": kind, "message": message}}, sort_keys=True, ensure_ascii=False) + "\n")
    return EXIT_CONFIG


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mixfrac", description="Mixed-norm fractional operator laboratory.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON run configuration")
        sp.add_argument("--out", help="existing directory for report files")
        sp.add_argument("--seed", type=int, help="corpus seed")
        sp.add_argument("--resolution", type=_csv_ints, help="comma-separated grid resolutions")
        sp.add_argument("--quiet", action="store_true", help="suppress the summary line")
        if name == "verify":
            sp.add_argument("--experiment", help=f"one of {', '.join(sorted(EXPERIMENTS))}")
    return parser


def _apply_flags(cfg: dict, args) -> dict:
    cfg = dict(cfg)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.resolution is not None:
        if args.command == "verify":
            key = "resolutions" if len(args.resolution) > 1 else "resolution"
            cfg[key] = args.resolution if key == "resolutions" else args.resolution[0]
        else:
            cfg["resolution"] = args.resolution if len(args.resolution) > 1 else args.resolution[0]
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_PASS
    t0 = time.perf_counter()
    try:
        if args.out is not None and not os.path.isdir(args.out):
            raise ConfigError(f"output directory does not exist: {args.out}")
        cfg = _apply_flags(_load_config(args.config), args)
        if cfg.get("command", args.command) != args.command:
            raise ConfigError(f"config is for {cfg['command']!r}, not {args.command!r}")
        cfg["command"] = args.command
        table = None
        if args.command == "norm":
            report = _run_norm(cfg)
        elif args.command == "op":
            report, table = _run_op(cfg)
        elif args.command == "weight":
            report, table = _run_weight(cfg)
        elif args.command == "seminorm":
            report = _run_seminorm(cfg)
        else:
            report = _run_verify(cfg, getattr(args, "experiment", None))
    except (InvalidArgument, KeyError, TypeError) as exc:
        msg = str(exc) if not isinstance(exc, KeyError) else f"missing config key {exc}"
        return _error(type(exc).__name__, msg)
    report.wall_time = time.perf_counter() - t0
    report.metadata.setdefault("threads", thread_count())
    if args.out is not None:
        stem = args.command if args.command != "verify" else report.experiment
        report.write(args.out, stem)
        if table is not None:
            kind, header, rows = table
            _write_table(os.path.join(args.out, f"{stem}.{kind}.csv"), header, rows)
    if not args.quiet:
        print(_one_line(report))
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
