"""Named experiments with default parameters, built from plain JSON-style configs."""

from __future__ import annotations

import copy

from ..errors import InvalidArgument
from ..lattice import Box, FnSpec
from ..operators import CubeFamily, KernelQuadrature
from .corpus import DEFAULT_KINDS, make_corpus
from .experiments import (
    experiment_ball_axioms,
    experiment_bmo_necessity_probe,
    experiment_bmo_sufficiency,
    experiment_fractional_integral,
    experiment_lipschitz,
    experiment_pointwise_dominations,
    experiment_rubio_de_francia,
    experiment_sharp_maximal,
)
from .exponents import ExponentPair

__all__ = ["EXPERIMENTS", "DEFAULTS", "resolve_config", "run_experiment"]

_CORPUS = {"size": 20, "kinds": list(DEFAULT_KINDS), "half_width": 8.0, "radius": [0.1, 0.35]}

DEFAULTS = {
    "sharp-maximal": {
        "p": [2, 3],
        "resolutions": None,
        "family": {"kind": "dyadic", "translates": 2},
        "corpus": _CORPUS,
    },
    "fractional-integral": {
        "p": [2, 2],
        "q": [4, 4],
        "resolutions": [32, 64, 128],
        "corpus": _CORPUS,
    },
    "bmo-sufficiency": {
        "p": [2, 2],
        "q": [4, 4],
        "b": {"kind": "logabs"},
        "r": 1.5,
        "resolutions": [128, 256, 512],
        "family": {"kind": "dyadic", "translates": 2},
        "near": 4,
        "corpus": {**_CORPUS, "size": 10},
        "dilations": [0.25, 0.5, 1, 2, 4],
        "dilation_corpus": {"seed": 7, "size": 6, "kinds": list(DEFAULT_KINDS), "half_width": 1.5, "radius": [0.3, 0.5]},
        "dilation_resolution": 1024,
        "dilation_half_width": 6.0,
        "dilation_tolerance": 0.2,
    },
    "bmo-necessity": {
        "p": ["8/3", "8/3"],
        "q": [4, 4],
        "b": {"kind": "coordinate", "axis": 0},
        "expected": None,
        "dilations": [1, 2, 4, 8],
        "resolution": 1024,
        "half_width": 12.0,
        "near": 4,
        "corpus": {"seed": 11, "size": 4, "kinds": list(DEFAULT_KINDS), "half_width": 0.5, "radius": [0.3, 0.5]},
        "tolerance": 0.15,
    },
    "lipschitz": {
        "p": [2],
        "q": [4],
        "beta": "1/8",
        "alpha": None,
        "b": None,
        "resolutions": [2048, 4096, 8192],
        "domination_resolution": 1024,
        "family": {"kind": "dyadic", "translates": 2},
        "corpus": {**_CORPUS, "size": 10, "half_width": 4.0},
    },
    "pointwise-dominations": {
        "n": 1,
        "alpha": 0.5,
        "b": {"kind": "logabs"},
        "resolutions": None,
        "family": {"kind": "dyadic", "translates": 2},
        "radii": [0.1, 1.0, 10.0],
        "corpus": {**_CORPUS, "size": 6, "half_width": 4.0},
    },
    "ball-axioms": {
        "norm": {"kind": "mixed", "p": [2, 4]},
        "samples": 200,
        "resolution": 32,
    },
    "rubio-de-francia": {
        "p": ["3/2"],
        "K": 6,
        "resolution": 256,
        "family": {"kind": "dyadic", "translates": 2},
        "corpus": {**_CORPUS, "size": 10, "half_width": 4.0},
    },
}


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k not in ("b", "norm", "family"):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def resolve_config(name: str, config: dict | None = None) -> dict:
    """Defaults for ``name`` overridden by ``config``; ``seed`` defaults to 0."""
    if name not in DEFAULTS:
        raise InvalidArgument(f"unknown experiment {name!r}; choose from {sorted(DEFAULTS)}")
    cfg = _merge(DEFAULTS[name], config or {})
    cfg.setdefault("seed", 0)
    cfg["experiment"] = name
    return cfg


def _corpus(cfg: dict, n: int, seed: int):
    """Corpus from a descriptor; a ``seed`` inside the descriptor overrides the run seed."""
    c = cfg
    return make_corpus(
        int(c.get("seed", seed)), int(c["size"]), tuple(c["kinds"]), n, Box.symmetric(float(c["half_width"]), n), tuple(c["radius"])
    )


def _family(d: dict | None):
    return CubeFamily.from_dict(d) if d else None


def _ladder(cfg_value, n: int) -> list:
    if cfg_value:
        return list(cfg_value)
    return [64, 128, 256] if n == 1 else [32, 64, 128]


def _run_sharp(cfg):
    n = len(cfg["p"])
    corpus = _corpus(cfg["corpus"], n, cfg["seed"])
    return experiment_sharp_maximal(cfg["p"], corpus, _family(cfg["family"]), _ladder(cfg["resolutions"], n))


def _run_fractional(cfg):
    pair = ExponentPair(cfg["p"], cfg["q"])
    corpus = _corpus(cfg["corpus"], pair.n, cfg["seed"])
    return experiment_fractional_integral(pair, corpus, cfg["resolutions"])


def _run_bmo(cfg):
    pair = ExponentPair(cfg["p"], cfg["q"])
    n = pair.n
    return experiment_bmo_sufficiency(
        pair,
        FnSpec.from_dict(cfg["b"]),
        _corpus(cfg["corpus"], n, cfg["seed"]),
        cfg["resolutions"],
        float(cfg["r"]),
        cfg["dilations"],
        _family(cfg["family"]),
        dilation_corpus=_corpus(cfg["dilation_corpus"], n, cfg["seed"]),
        dilation_resolution=cfg["dilation_resolution"],
        dilation_box=Box.symmetric(float(cfg["dilation_half_width"]), n),
        quad=KernelQuadrature(near=int(cfg["near"])),
        dilation_tol=float(cfg["dilation_tolerance"]),
    )


def _run_necessity(cfg):
    pair = ExponentPair(cfg["p"], cfg["q"])
    b = FnSpec.from_dict(cfg["b"])
    expected = cfg["expected"]
    if expected is None:
        expected = 1.0 if b.kind == "coordinate" else 0.0
    return experiment_bmo_necessity_probe(
        pair,
        b,
        _corpus(cfg["corpus"], pair.n, cfg["seed"]),
        cfg["dilations"],
        cfg["resolution"],
        Box.symmetric(float(cfg["half_width"]), pair.n),
        float(expected),
        float(cfg["tolerance"]),
        KernelQuadrature(near=int(cfg["near"])),
    )


def _run_lipschitz(cfg):
    pair = ExponentPair(cfg["p"], cfg["q"], cfg["beta"], cfg["alpha"])
    b = FnSpec.from_dict(cfg["b"]) if cfg["b"] else None
    return experiment_lipschitz(
        pair,
        b,
        _corpus(cfg["corpus"], pair.n, cfg["seed"]),
        cfg["resolutions"],
        _family(cfg["family"]),
        domination_resolution=cfg["domination_resolution"],
    )


def _run_pointwise(cfg):
    n = int(cfg["n"])
    return experiment_pointwise_dominations(
        _corpus(cfg["corpus"], n, cfg["seed"]),
        float(cfg["alpha"]),
        FnSpec.from_dict(cfg["b"]),
        _family(cfg["family"]),
        cfg["resolutions"] or ([256, 512] if n == 1 else [32, 64]),
        radii=cfg["radii"],
    )


def _run_axioms(cfg):
    return experiment_ball_axioms(cfg["norm"], int(cfg["samples"]), int(cfg["seed"]), cfg["resolution"])


def _run_rubio(cfg):
    n = len(cfg["p"])
    return experiment_rubio_de_francia(
        cfg["p"], _corpus(cfg["corpus"], n, cfg["seed"]), int(cfg["K"]), _family(cfg["family"]), cfg["resolution"]
    )


EXPERIMENTS = {
    "sharp-maximal": _run_sharp,
    "fractional-integral": _run_fractional,
    "bmo-sufficiency": _run_bmo,
    "bmo-necessity": _run_necessity,
    "lipschitz": _run_lipschitz,
    "pointwise-dominations": _run_pointwise,
    "ball-axioms": _run_axioms,
    "rubio-de-francia": _run_rubio,
}


def run_experiment(name: str, config: dict | None = None):
    """Run a named experiment; returns ``(report, resolved_config)``.

    The resolved config is embedded in the report parameters.
    """
    cfg = resolve_config(name, config)
    report = EXPERIMENTS[name](cfg)
    report.parameters["config"] = cfg
    return report, cfg
