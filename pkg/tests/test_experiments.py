"""Experiments at reduced scale; full-scale runs live in test_acceptance.py."""

import pytest

from mixfrac import Box, FnSpec, InvalidArgument
from mixfrac.verify import (
    Corpus,
    ExponentPair,
    experiment_ball_axioms,
    experiment_bmo_necessity_probe,
    experiment_bmo_sufficiency,
    experiment_fractional_integral,
    experiment_lipschitz,
    experiment_pointwise_dominations,
    experiment_rubio_de_francia,
    experiment_sharp_maximal,
    make_corpus,
)
from mixfrac.verify.registry import DEFAULTS, EXPERIMENTS, resolve_config, run_experiment


def small_corpus(n=1, size=4, seed=0, half_width=4.0):
    return make_corpus(seed, size, n=n, box=Box.symmetric(half_width, n))


class TestSharpMaximal:
    def test_indicators_pass(self):
        corpus = make_corpus(0, 6, kinds=["indicator"], box=Box.symmetric(8.0))
        r = experiment_sharp_maximal([2], corpus, resolutions=(64, 128, 256))
        assert r.passed
        assert r.check("pointwise_sharp_le_2M").value == 0

    def test_constant_entry_skipped(self):
        corpus = Corpus.from_functions([FnSpec.constant(1.0), FnSpec.gaussian([0.0], 0.5)], Box.symmetric(4.0))
        r = experiment_sharp_maximal([3], corpus, resolutions=(32, 64))
        assert {row.case for row in r.skipped} == {0}
        assert r.check("finite").passed


class TestFractionalIntegral:
    def test_admissible(self):
        r = experiment_fractional_integral(ExponentPair([2], ["8/3"]), small_corpus(), resolutions=(64, 128, 256))
        assert r.passed

    def test_gate(self):
        with pytest.raises(InvalidArgument):
            experiment_fractional_integral(ExponentPair([2, 2], [2, 2]), small_corpus(2))


class TestBMOSufficiency:
    def test_constant_symbol(self):
        pair = ExponentPair([2], [4])
        r = experiment_bmo_sufficiency(
            pair, FnSpec.constant(2.0), small_corpus(), resolutions=(64, 128), dilations=(0.5, 1, 2)
        )
        assert all(row.ratio <= 1e-12 for row in r.rows if not row.skipped)

    def test_reports_dilation_series(self):
        pair = ExponentPair([2], [4])
        r = experiment_bmo_sufficiency(pair, FnSpec.logabs(), small_corpus(), resolutions=(64, 128))
        assert r.check("dilation_invariance") is not None
        assert r.check("lemma_constant_finite").passed


class TestNecessityProbe:
    def test_needs_three_dilations(self):
        with pytest.raises(InvalidArgument):
            experiment_bmo_necessity_probe(ExponentPair([2], [4]), FnSpec.coordinate(0), small_corpus(), dilations=(1,))

    def test_reports_slopes(self):
        corpus = make_corpus(11, 2, n=2, box=Box.symmetric(0.5, 2), radius=(0.3, 0.5))
        r = experiment_bmo_necessity_probe(
            ExponentPair(["8/3", "8/3"], [4, 4]), FnSpec.coordinate(0), corpus, (1, 2, 4), 64, Box.symmetric(12.0, 2)
        )
        assert r.check("growth_exponent") is not None
        assert len(r.rows) == 2 * 3


class TestLipschitz:
    def test_relation_gate(self):
        with pytest.raises(InvalidArgument):
            experiment_lipschitz(ExponentPair([2], [4], "1/2", "1/4"), None, small_corpus())

    def test_constant_symbol(self):
        pair = ExponentPair([2], [4], "1/8")
        r = experiment_lipschitz(
            pair, FnSpec.constant(1.0), small_corpus(), resolutions=(128, 256), domination_resolution=128
        )
        assert all(row.ratio <= 1e-12 for row in r.rows if not row.skipped)


class TestPointwise:
    def test_one_dimensional(self):
        r = experiment_pointwise_dominations(small_corpus(), resolutions=(128, 256))
        assert r.passed, r.summary()


class TestBallAxioms:
    @pytest.mark.parametrize(
        "norm",
        [
            {"kind": "classical", "p": 2, "n": 1},
            {"kind": "mixed", "p": [2, 4]},
            {"kind": "weighted", "p": 3, "weight": {"kind": "power", "a": 0.5}, "n": 1},
        ],
    )
    def test_kinds(self, norm):
        assert experiment_ball_axioms(norm, samples=50).passed


class TestRubio:
    def test_passes(self):
        r = experiment_rubio_de_francia(["3/2"], small_corpus(size=4), K=4, resolution=128)
        assert r.passed, r.summary()


class TestRegistry:
    def test_every_experiment_has_defaults(self):
        assert set(DEFAULTS) == set(EXPERIMENTS)

    def test_override_merges(self):
        cfg = resolve_config("bmo-sufficiency", {"corpus": {"size": 3}, "seed": 9})
        assert cfg["corpus"]["size"] == 3
        assert cfg["corpus"]["half_width"] == DEFAULTS["bmo-sufficiency"]["corpus"]["half_width"]
        assert cfg["seed"] == 9 and cfg["experiment"] == "bmo-sufficiency"

    def test_unknown(self):
        with pytest.raises(InvalidArgument):
            resolve_config("nope")

    def test_config_embedded(self):
        report, cfg = run_experiment("ball-axioms", {"samples": 20})
        assert report.parameters["config"] == cfg
