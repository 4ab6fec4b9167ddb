import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mixfrac import Box, FnSpec, InvalidArgument, make_grid, sample
from mixfrac.verify import (
    Check,
    ExponentPair,
    OperatorSpec,
    RatioRow,
    SCHEMA_VERSION,
    THREADS_ENV,
    VerificationReport,
    exponent_relation,
    is_refinement_stable,
    make_corpus,
    nogayama_relation_check,
    operator_ratio,
    parallel_map,
    refinement_growth,
    thread_count,
)

rational_exponents = st.fractions(Fraction(11, 10), Fraction(8)).filter(lambda v: v > 1)


class TestExponentRelation:
    def test_square_pair(self):
        r = exponent_relation([2, 2], [4, 4])
        assert r.alpha_exact == Fraction(1, 2)
        assert r.admissible and r.tag == "admissible"

    def test_equal_pair_inadmissible(self):
        r = exponent_relation([2, 3], [2, 3])
        assert r.alpha == 0.0
        assert not r.admissible and r.tag == "inadmissible"

    def test_mixed_pair(self):
        r = exponent_relation([2, 4], ["8/3", 8])
        assert r.alpha_exact == Fraction(1, 4)
        assert r.admissible

    def test_boundary_tag(self):
        r = exponent_relation([2, 4], [2, 8])
        assert r.admissible and r.boundary_admissible
        assert r.tag == "boundary-admissible"

    def test_descending_rejected(self):
        assert not exponent_relation([4, 4], [2, 2]).admissible

    def test_lipschitz_gate(self):
        bad = ExponentPair([2], [4], beta="1/2", stated_alpha="1/4")
        assert not bad.admissible
        with pytest.raises(InvalidArgument, match="inadmissible"):
            bad.require_admissible()
        good = ExponentPair([2], [4], beta="1/8", stated_alpha="1/8")
        assert good.admissible and good.alpha == 0.125

    @given(st.lists(rational_exponents, min_size=1, max_size=3), st.data())
    def test_alpha_is_exact_difference(self, p, data):
        q = [data.draw(st.fractions(v, Fraction(20)).filter(lambda x: x >= v)) for v in p]
        r = exponent_relation([str(v) for v in p], [str(v) for v in q])
        assert r.alpha_exact == sum(1 / v for v in p) - sum(1 / v for v in q)

    def test_pair_roundtrip(self):
        pair = ExponentPair(["8/3", 4], [4, 8], beta="1/8")
        again = ExponentPair.from_dict(json.loads(json.dumps(pair.to_dict())))
        assert again.p.exact == pair.p.exact and again.beta == pair.beta


class TestNogayama:
    def test_holds(self):
        c = nogayama_relation_check([2, 4], [4, 8])
        assert c.holds and c.companion["holds"]

    def test_weaker_condition(self):
        c = nogayama_relation_check([2, 4], ["8/3", 8])
        assert not c.holds
        assert exponent_relation([2, 4], ["8/3", 8]).admissible

    def test_equal_trivially(self):
        c = nogayama_relation_check([3, 5], [3, 5])
        assert c.holds and not c.companion["applies"]

    @given(st.lists(rational_exponents, min_size=1, max_size=3), st.fractions(Fraction(1, 10), Fraction(9, 10)))
    def test_companion(self, p, t):
        # q_j = p_j / t gives the proportional family; alpha > 0 forces strict inequalities
        q = [v / t for v in p]
        c = nogayama_relation_check([str(v) for v in p], [str(v) for v in q])
        assert c.holds
        assert c.companion["applies"] and c.companion["holds"]


class TestCorpus:
    def test_deterministic(self):
        assert make_corpus(5, 12, n=2).to_dict() == make_corpus(5, 12, n=2).to_dict()

    def test_seed_changes_corpus(self):
        assert make_corpus(5, 6).to_dict() != make_corpus(6, 6).to_dict()

    def test_size_zero(self):
        with pytest.raises(InvalidArgument):
            make_corpus(0, 0)

    @pytest.mark.parametrize("n", [1, 2])
    def test_supported_inside_box(self, n):
        box = Box.symmetric(4.0, n)
        corpus = make_corpus(3, 12, n=n, box=box)
        kinds = {e.base.kind for e in corpus}
        assert kinds == {"indicator", "gaussian", "smooth-random"}
        grid = make_grid(box, 64 if n == 1 else 32)
        for f in corpus.sample(grid):
            v = f.values
            edge = np.concatenate([np.take(v, [0, -1], axis=i).ravel() for i in range(n)])
            assert np.max(edge) <= 1e-6 * max(np.max(v), 1e-300)
            assert np.max(v) > 0


class TestRefinement:
    def test_growth_per_doubling(self):
        assert refinement_growth([64, 128, 256], [1.0, 1.05, 1.1025]) == pytest.approx([0.05, 0.05])
        assert refinement_growth([64, 256], [1.0, 1.21]) == pytest.approx([0.1])

    def test_stable(self):
        assert is_refinement_stable([32, 64], [1.0, 1.09])
        assert not is_refinement_stable([32, 64], [1.0, 1.11])
        assert not is_refinement_stable([32], [1.0])
        assert not is_refinement_stable([32, 64], [1.0, math.inf])


class TestReport:
    def make(self):
        r = VerificationReport("demo", {"p": ["8/3"]})
        r.rows.append(RatioRow(0, (64,), {"kind": "gaussian"}, 2.0, 1.0, 2.0))
        r.rows.append(RatioRow(1, (64,), {"kind": "constant"}, 0.0, 0.0, None, True, "degenerate"))
        r.add_check("finite", True, 2.0)
        return r

    def test_body_schema(self):
        body = json.loads(self.make().to_json())
        assert body["schema_version"] == SCHEMA_VERSION == "1.0"
        assert body["skipped"] == [1]
        assert "wall_time_seconds" not in body

    def test_pass_and_fail(self):
        r = self.make()
        assert r.passed
        r.add_check("bound", False, 3.0, 2.0)
        assert not r.passed
        assert "bound=FAIL" in r.summary()

    def test_write(self, tmp_path):
        paths = self.make().write(tmp_path, "demo")
        assert json.loads(open(paths["meta"]).read())["experiment"] == "demo"
        lines = open(paths["csv"]).read().splitlines()
        assert len(lines) == 3

    def test_non_finite_values_serialise(self):
        r = VerificationReport("x", {"v": math.inf})
        r.add_check("c", False, math.nan)
        json.loads(r.to_json())


class TestHarness:
    def test_threads_env(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV, "3")
        assert thread_count() == 3
        assert parallel_map(lambda x: x * x, range(10)) == [x * x for x in range(10)]
        monkeypatch.setenv(THREADS_ENV, "many")
        with pytest.raises(InvalidArgument):
            thread_count()

    def test_identity_ratio_one(self):
        corpus = make_corpus(1, 6, n=1, box=Box.symmetric(4.0))
        r = operator_ratio(OperatorSpec("identity"), corpus, [3], [3], [64, 128])
        assert r.max_ratio() == pytest.approx(1.0, abs=1e-12)
        assert r.passed

    def test_threaded_rows_identical(self, monkeypatch):
        corpus = make_corpus(2, 6, n=1, box=Box.symmetric(4.0))
        op = OperatorSpec("fractional-integral", alpha=0.25)
        serial = operator_ratio(op, corpus, [2], ["8/3"], [64, 128]).to_json()
        monkeypatch.setenv(THREADS_ENV, "4")
        assert operator_ratio(op, corpus, [2], ["8/3"], [64, 128]).to_json() == serial

    def test_constant_symbol_commutator_zero(self):
        corpus = make_corpus(4, 4, n=1, box=Box.symmetric(4.0))
        op = OperatorSpec("commutator", alpha=0.25, b=FnSpec.constant(3.0))
        r = operator_ratio(op, corpus, [2], ["8/3"], [64, 128])
        assert all(row.ratio <= 1e-12 for row in r.rows)

    def test_degenerate_rows_skipped(self):
        from mixfrac.verify import Corpus

        corpus = Corpus.from_functions([FnSpec.constant(0.0), FnSpec.gaussian([0.0], 0.3)], Box.symmetric(2.0))
        r = operator_ratio(OperatorSpec("maximal"), corpus, [2], [2], [32, 64])
        assert [row.case for row in r.skipped] == [0, 0]
        assert json.loads(r.to_json())["skipped"] == [0, 0]

    def test_needs_two_resolutions(self):
        corpus = make_corpus(1, 2)
        with pytest.raises(InvalidArgument):
            operator_ratio(OperatorSpec("identity"), corpus, [2], [2], [64])

    def test_spec_validation(self):
        with pytest.raises(InvalidArgument):
            OperatorSpec("riesz-transform")
        with pytest.raises(InvalidArgument):
            OperatorSpec("commutator", alpha=0.5)
        spec = OperatorSpec("commutator", alpha=0.5, b=FnSpec.logabs())
        assert OperatorSpec.from_dict(spec.to_dict()) == spec
