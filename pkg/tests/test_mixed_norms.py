from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mixfrac import Box, FnSpec, GridFunction, InvalidArgument, make_grid, sample
from mixfrac.mixed_norms import (
    ExponentVector,
    classical_norm,
    convexified_norm,
    dual_exponents,
    exact_exponent,
    holder_gap,
    indicator_norm_formula,
    local_integral_constant,
    mixed_norm,
    weighted_norm,
)

from conftest import smooth_random

exponents = st.floats(1.1, 8.0)


class TestExponentVector:
    def test_rational_strings_are_exact(self):
        p = ExponentVector(["8/3", 8])
        assert p.exact == (Fraction(8, 3), Fraction(8))
        assert p[0] == pytest.approx(8 / 3)

    @pytest.mark.parametrize("bad", [[1, 2], [2, float("inf")], [0.5], []])
    def test_rejects_out_of_range(self, bad):
        with pytest.raises(InvalidArgument, match="exponents must satisfy 1 < p_i < ∞|non-empty"):
            ExponentVector(bad)

    def test_unparseable(self):
        with pytest.raises(InvalidArgument):
            exact_exponent("eight thirds")

    def test_dual(self):
        assert list(dual_exponents([2, 2])) == [2, 2]
        assert dual_exponents([4, "4/3"]).exact == (Fraction(4, 3), Fraction(4))
        np.testing.assert_allclose(dual_exponents([3, 5]), [1.5, 1.25])

    def test_scaled(self):
        assert ExponentVector([2, 4]).scaled(3).exact == (6, 12)


class TestMixedNorm:
    def test_constant_on_unit_square(self):
        g = make_grid(Box((0, 0), (1, 1)), 16)
        assert mixed_norm(GridFunction.constant(g, 3.0), [2, 5]) == pytest.approx(3.0, rel=1e-14)

    def test_rectangle_iterated(self):
        # inner (int_0^2 dx)^{1/2} = sqrt 2, outer (int_0^1 4 dy)^{1/4} = sqrt 2
        g = make_grid(Box((0, 0), (2, 1)), (64, 32))
        f = GridFunction.constant(g, 1.0)
        assert mixed_norm(f, [2, 4]) == pytest.approx(np.sqrt(2), rel=1e-14)

    def test_axis_order_matters(self):
        g = make_grid(Box((0, 0), (2, 1)), (64, 32))
        f = GridFunction.constant(g, 1.0)
        # swapped exponents: (int_0^2 dx)^{1/4}, then (int_0^1 . dy)^{1/2}
        assert mixed_norm(f, [4, 2]) == pytest.approx(2**0.25, rel=1e-14)

    def test_dimension_mismatch(self):
        g = make_grid(Box((0, 0), (1, 1)), 4)
        with pytest.raises(InvalidArgument):
            mixed_norm(GridFunction.constant(g, 1.0), [2])

    @given(exponents, st.integers(0, 10_000))
    def test_equal_exponents_reduce_to_classical(self, p, seed):
        g = make_grid(Box.symmetric(1.0, 2), 24)
        f = smooth_random(g, seed, 0.8)
        assert mixed_norm(f, [p, p]) == pytest.approx(classical_norm(f, p), rel=1e-12)

    @given(exponents, exponents, st.floats(0.1, 10.0))
    def test_homogeneous(self, p1, p2, c):
        g = make_grid(Box.symmetric(1.0, 2), 16)
        f = smooth_random(g, 3, 0.8)
        assert mixed_norm(f * c, [p1, p2]) == pytest.approx(c * mixed_norm(f, [p1, p2]), rel=1e-12)

    @given(exponents, exponents, st.integers(0, 1000), st.integers(0, 1000))
    def test_triangle_inequality(self, p1, p2, s1, s2):
        g = make_grid(Box.symmetric(1.0, 2), 16)
        f, h = smooth_random(g, s1, 0.8), smooth_random(g, s2, 0.6) * -1.0
        lhs = mixed_norm(f + h, [p1, p2])
        assert lhs <= mixed_norm(f, [p1, p2]) + mixed_norm(h, [p1, p2]) + 1e-12


class TestClassicalAndWeighted:
    def test_indicator(self):
        g = make_grid(Box(-1, 2), 30)
        assert classical_norm(sample(FnSpec.indicator(Box(0, 1)), g), 2) == pytest.approx(1.0, rel=1e-12)

    def test_constant(self):
        g = make_grid(Box(0, 1), 10)
        assert classical_norm(GridFunction.constant(g, 2.0), 3) == pytest.approx(2.0, rel=1e-14)

    def test_sqrt_oracle(self):
        g = make_grid(Box(0, 1), 1024)
        assert classical_norm(sample(FnSpec.power(0.5), g), 2) == pytest.approx(np.sqrt(0.5), abs=1e-3)

    def test_unit_weight(self):
        g = make_grid(Box(-1, 1), 64)
        f = smooth_random(g, 5, 0.9)
        assert weighted_norm(f, 2.5, GridFunction.constant(g, 1.0)) == classical_norm(f, 2.5)

    def test_constant_weight(self):
        g = make_grid(Box(0, 1), 32)
        f = GridFunction.constant(g, 1.0)
        assert weighted_norm(f, 2, GridFunction.constant(g, 2.0)) == pytest.approx(np.sqrt(2), rel=1e-14)

    def test_power_weight_oracle(self):
        g = make_grid(Box(0, 1), 1024)
        f = GridFunction.constant(g, 1.0)
        assert weighted_norm(f, 1, sample(FnSpec.power(0.5), g)) == pytest.approx(2 / 3, abs=1e-3)

    def test_nonpositive_weight(self):
        g = make_grid(Box(0, 1), 4)
        with pytest.raises(InvalidArgument):
            weighted_norm(GridFunction.constant(g, 1.0), 2, GridFunction(g, [1, 0, 1, 1]))


class TestHolder:
    def test_indicator_equality(self):
        g = make_grid(Box((0, 0), (1, 1)), 16)
        one = GridFunction.constant(g, 1.0)
        assert holder_gap(one, one, [2, 2]) == pytest.approx(0.0, abs=1e-14)
        assert holder_gap(one, one, [3, "3/2"]) == pytest.approx(0.0, abs=1e-14)

    @given(st.integers(0, 10_000), st.integers(0, 10_000), st.sampled_from([(2, 2), (2, 4), (3, 1.5)]))
    def test_gap_nonnegative(self, s1, s2, p):
        g = make_grid(Box.symmetric(1.0, 2), 16)
        assert holder_gap(smooth_random(g, s1, 0.9), smooth_random(g, s2, 0.7), p) >= -1e-12


class TestIndicatorFormula:
    def test_unit_cube(self):
        assert indicator_norm_formula(Box((0, 0), (1, 1)), [2, 7]) == 1.0

    def test_side_four(self):
        assert indicator_norm_formula(Box.cube((0, 0), 4), [2, 4]) == pytest.approx(2**1.5, rel=1e-15)

    def test_sampled_agrees(self):
        g = make_grid(Box.symmetric(4.0, 2), 256)
        q = Box.cube((0, 0), 4)
        assert mixed_norm(sample(FnSpec.indicator(q), g), [2, 4]) == pytest.approx(2**1.5, rel=1e-3)

    def test_needs_cube(self):
        with pytest.raises(InvalidArgument):
            indicator_norm_formula(Box((0, 0), (2, 1)), [2, 2])

    def test_local_constant_uses_duals(self):
        q = Box.cube((0, 0), 2)
        assert local_integral_constant(q, [2, 2]) == pytest.approx(2.0)


class TestConvexified:
    def test_identity_at_r1(self):
        g = make_grid(Box.symmetric(1.0, 2), 16)
        f = smooth_random(g, 2, 0.8)
        assert convexified_norm(f, [2, 3], 1) == pytest.approx(mixed_norm(f, [2, 3]), rel=1e-14)

    def test_indicator_invariant(self):
        g = make_grid(Box((0, 0), (1, 1)), 8)
        assert convexified_norm(GridFunction.constant(g, 1.0), [2, 2], 2) == pytest.approx(1.0)

    def test_rescaled_exponents(self):
        g = make_grid(Box.symmetric(1.0, 2), 32)
        f = smooth_random(g, 9, 0.8)
        assert convexified_norm(f, [2, 4], 3) == pytest.approx(mixed_norm(f, [6, 12]), rel=1e-10)
