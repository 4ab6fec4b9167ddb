import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mixfrac import Box, FnSpec, GridFunction, InvalidArgument, make_grid, sample
from mixfrac.operators import (
    CubeFamily,
    KernelQuadrature,
    abs_commutator,
    commutator_fractional,
    fractional_integral,
    fractional_integral_at,
    fractional_maximal,
    fractional_maximal_commutator,
    heat_kernel_constant,
    heat_kernel_fractional,
    maximal,
    offset_cell_integral,
    riesz_constant,
    sharp_maximal,
)
from mixfrac.operators.fractional import near_field_table
from mixfrac.verify import ROUNDING_SLACK, cube_ball_constant

from conftest import smooth_random


def indicator_1d(box, res, lo=0.0, hi=1.0):
    return sample(FnSpec.indicator(Box(lo, hi)), make_grid(box, res))


class TestCubeFamilies:
    def test_dyadic_levels(self):
        g = make_grid(Box(0, 1), 8)
        sides = [lv.shape[0] for lv in CubeFamily.dyadic(translates=1).resolve(g)]
        assert sides == [8, 4, 2, 1]

    def test_dense_counts(self):
        g = make_grid(Box(0, 1), 5)
        counts = [lv.count for lv in CubeFamily.dense().resolve(g)]
        assert counts == [5, 4, 3, 2, 1]

    def test_explicit_must_be_cubes(self):
        with pytest.raises(InvalidArgument):
            CubeFamily.explicit([Box((0, 0), (2, 1))])

    def test_roundtrip(self):
        fam = CubeFamily.union(CubeFamily.dyadic(levels=(1, 3)), CubeFamily.dense(0.5))
        assert CubeFamily.from_dict(fam.to_dict()) == fam

    def test_family_outside_grid(self):
        g = make_grid(Box(0, 1), 8)
        with pytest.raises(InvalidArgument):
            maximal(GridFunction.constant(g, 1.0), CubeFamily.explicit([Box(5, 6)]))


class TestMaximal:
    @given(st.floats(0, 10))
    def test_constant(self, c):
        g = make_grid(Box.symmetric(1.0, 2), 8)
        m = maximal(GridFunction.constant(g, c), CubeFamily.dyadic())
        np.testing.assert_allclose(m.values, c, rtol=1e-13, atol=1e-300)

    def test_indicator_at_two(self):
        # sup over intervals containing 2 of |I cap [0,1]| / |I| is 1/2, reached by [0, 2]
        for res in (64, 256, 1024):
            f = indicator_1d(Box(-1, 3), res)
            m = maximal(f, CubeFamily.dense())
            c = f.grid.centers(0)
            left = np.searchsorted(c, 2.0) - 1
            assert m.values[left] == pytest.approx(0.5, abs=1e-12)
            assert m.values[left + 1] <= 0.5
            assert m.values[left + 1] == pytest.approx(0.5, abs=2.0 / res)

    def test_dominates_at_finest_level(self):
        g = make_grid(Box.symmetric(1.0, 2), 16)
        f = smooth_random(g, 4, 0.9)
        assert np.all(maximal(f, CubeFamily.dyadic()).values >= np.abs(f.values) * (1 - 1e-12))

    def test_family_monotone(self):
        g = make_grid(Box(-1, 1), 32)
        f = smooth_random(g, 8, 0.9)
        small = maximal(f, CubeFamily.dyadic(translates=1)).values
        big = maximal(f, CubeFamily.dense()).values
        assert np.all(big >= small - 1e-15)


class TestSharpMaximal:
    def test_constant_vanishes(self):
        g = make_grid(Box(0, 1), 16)
        assert np.all(sharp_maximal(GridFunction.constant(g, 3.0), CubeFamily.dense()).values == 0.0)

    def test_step_symmetric_interval(self):
        g = make_grid(Box(-1, 1), 64)
        f = sample(FnSpec.indicator(Box(0, 10)), g)
        fam = CubeFamily.dyadic(Box(-1, 1), levels=(0, 0))
        np.testing.assert_allclose(sharp_maximal(f, fam).values, 0.5)

    @given(st.integers(0, 10_000))
    def test_sharp_le_twice_maximal(self, seed):
        g = make_grid(Box.symmetric(1.0, 2), 16)
        f = smooth_random(g, seed, 0.9) - 0.3
        fam = CubeFamily.dyadic()
        assert np.all(sharp_maximal(f, fam).values <= 2 * maximal(f, fam).values)


class TestFractionalMaximal:
    def test_small_alpha_limit(self):
        g = make_grid(Box.symmetric(2.0, 2), 16)
        f = smooth_random(g, 6, 1.5)
        fam = CubeFamily.dyadic()
        np.testing.assert_allclose(fractional_maximal(f, 1e-9, fam).values, maximal(f, fam).values, rtol=1e-6)

    def test_unit_cube(self):
        g = make_grid(Box((0, 0), (2, 2)), 8)
        f = sample(FnSpec.indicator(Box((0, 0), (1, 1))), g)
        fam = CubeFamily.explicit([Box((0, 0), (1, 1))])
        m = fractional_maximal(f, 0.7, fam)
        assert np.all(m.values[:4, :4] >= 1 - 1e-12)

    def test_alpha_range(self):
        g = make_grid(Box(0, 1), 8)
        with pytest.raises(InvalidArgument):
            fractional_maximal(GridFunction.constant(g, 1.0), 1.0, CubeFamily.dyadic())

    @pytest.mark.parametrize("n,alpha", [(1, 0.5), (2, 0.5), (2, 1.5)])
    def test_cube_ball_domination(self, n, alpha):
        g = make_grid(Box.symmetric(2.0, n), 256 if n == 1 else 32)
        f = smooth_random(g, 11, 1.2)
        lhs = fractional_maximal(f, alpha, CubeFamily.dyadic()).values
        rhs = cube_ball_constant(n, alpha) * fractional_integral(abs(f), alpha).values
        assert np.all(lhs <= rhs * (1 + ROUNDING_SLACK))


class TestFractionalIntegral:
    def test_zero(self):
        g = make_grid(Box(0, 1), 32)
        assert np.all(fractional_integral(GridFunction.constant(g, 0.0), 0.5).values == 0)

    def test_indicator_at_origin(self):
        # int_0^1 y^{-1/2} dy = 2
        f = indicator_1d(Box(-1, 3), 1024)
        assert fractional_integral_at(f, 0.5, [[0.0]])[0] == pytest.approx(2.0, abs=2e-2)

    def test_indicator_at_two(self):
        # int_0^1 (2 - y)^{-1/2} dy = 2 (sqrt 2 - 1)
        f = indicator_1d(Box(-1, 3), 1024)
        assert fractional_integral_at(f, 0.5, [[2.0]])[0] == pytest.approx(2 * (math.sqrt(2) - 1), abs=1e-3)

    def test_at_points_matches_grid_at_centres(self):
        f = indicator_1d(Box(-1, 3), 128)
        pts = f.grid.points().reshape(-1, 1)[::17]
        full = fractional_integral(f, 0.5).values.ravel()[::17]
        np.testing.assert_allclose(fractional_integral_at(f, 0.5, pts), full, rtol=1e-12)

    @pytest.mark.parametrize("near", [0, 3])
    def test_fft_matches_direct(self, near):
        g = make_grid(Box.symmetric(1.0, 2), 24)
        f = smooth_random(g, 2, 0.8)
        q = KernelQuadrature(near=near)
        a = fractional_integral(f, 0.5, q, "direct").values
        b = fractional_integral(f, 0.5, q, "fft").values
        np.testing.assert_allclose(a, b, rtol=1e-10, atol=1e-12)

    @given(st.floats(0.1, 0.9), st.floats(0.1, 5.0))
    def test_linear(self, alpha, c):
        g = make_grid(Box(-1, 1), 32)
        f = smooth_random(g, 1, 0.9)
        np.testing.assert_allclose(
            fractional_integral(f * c, alpha).values, c * fractional_integral(f, alpha).values, rtol=1e-12
        )

    def test_cell_centre_mode_drops_diagonal(self):
        g = make_grid(Box(0, 1), 1)
        f = GridFunction.constant(g, 1.0)
        assert fractional_integral(f, 0.5, KernelQuadrature("cell-center")).values[0] == 0.0
        # int_{-1/2}^{1/2} |y|^{-1/2} dy = 2 sqrt 2
        assert fractional_integral(f, 0.5).values[0] == pytest.approx(2 * math.sqrt(2), rel=1e-12)


class TestKernelTables:
    def test_offset_cell_1d(self):
        # int_0^1 |0.25 - y|^{-1/2} dy = 2 (sqrt 0.25 + sqrt 0.75)
        v = offset_cell_integral([0.0], [1.0], [0.25], -0.5)
        assert v == pytest.approx(2 * (0.5 + math.sqrt(0.75)), rel=1e-12)
        assert offset_cell_integral([0.0], [1.0], [0.0], -0.5) == pytest.approx(2.0, rel=1e-12)

    def test_offset_cell_2d_dblquad(self):
        from scipy.integrate import dblquad

        x0, y0 = 0.1, 0.3
        ref = 0.0
        # split at the singular point so each piece has it at a corner
        for (xa, xb) in ((0.0, x0), (x0, 0.5)):
            for (ya, yb) in ((0.0, y0), (y0, 1.0)):
                v, _ = dblquad(lambda y, x: ((x - x0) ** 2 + (y - y0) ** 2) ** -0.75, xa, xb, ya, yb, epsrel=1e-10)
                ref += v
        got = offset_cell_integral([0.0, 0.0], [0.5, 1.0], [x0, y0], -1.5)
        assert got == pytest.approx(ref, rel=1e-6)

    def test_near_table_matches_dblquad(self):
        from scipy.integrate import dblquad

        h = 0.1
        t = near_field_table((h, h), -1.5, 2)
        ref, _ = dblquad(lambda y, x: (x * x + y * y) ** -0.75, 0.5 * h, 1.5 * h, -0.5 * h, 0.5 * h, epsrel=1e-12)
        assert t[3, 2] == pytest.approx(ref / h**2, rel=1e-9)

    def test_near_table_symmetric(self):
        t = near_field_table((0.1, 0.1), -1.5, 2)
        assert t.shape == (5, 5)
        np.testing.assert_allclose(t, t.T, rtol=1e-12)
        np.testing.assert_allclose(t, t[::-1, ::-1], rtol=1e-12)


class TestCommutators:
    def setup_method(self):
        self.g = make_grid(Box.symmetric(1.0, 2), 16)
        self.f = smooth_random(self.g, 3, 0.8)

    def test_constant_symbol(self):
        b = GridFunction.constant(self.g, 2.5)
        assert np.max(np.abs(commutator_fractional(b, self.f, 0.5).values)) <= 1e-12
        assert np.all(abs_commutator(b, self.f, 0.5).values == 0)
        fam = CubeFamily.dyadic()
        assert np.all(fractional_maximal_commutator(b, self.f, 0.5, fam).values == 0)

    def test_algebraic_identity(self):
        b = sample(FnSpec.coordinate(0), self.g)
        lhs = commutator_fractional(b, self.f, 0.5).values
        rhs = b.values * fractional_integral(self.f, 0.5).values - fractional_integral(b * self.f, 0.5).values
        np.testing.assert_allclose(lhs, rhs, atol=1e-10)

    def test_fft_path(self):
        b = sample(FnSpec.coordinate(1), self.g)
        a = commutator_fractional(b, self.f, 0.5).values
        c = commutator_fractional(b, self.f, 0.5, method="fft").values
        np.testing.assert_allclose(a, c, atol=1e-10)

    @given(st.integers(0, 10_000), st.floats(0.2, 1.8))
    def test_abs_dominates(self, seed, alpha):
        b = sample(FnSpec.logabs(), self.g)
        f = smooth_random(self.g, seed, 0.8) - 0.2
        assert np.all(np.abs(commutator_fractional(b, f, alpha).values) <= abs_commutator(b, f, alpha).values)

    def test_maximal_commutator_vs_abs(self):
        b = sample(FnSpec.logabs(), self.g)
        m = fractional_maximal_commutator(b, self.f, 0.5, CubeFamily.dyadic()).values
        i = abs_commutator(b, self.f, 0.5).values
        assert np.all(m <= cube_ball_constant(2, 0.5) * i * (1 + 0.05))

    def test_disjoint_supports(self):
        g = make_grid(Box((0, 0), (4, 4)), 16)
        b = sample(FnSpec.indicator(Box((0, 0), (1, 1))), g)
        f = sample(FnSpec.indicator(Box((2, 2), (3, 3))), g)
        m = fractional_maximal_commutator(b, f, 0.5, CubeFamily.dyadic()).values
        outside = (b.values == 0) & (f.values == 0)
        assert np.all(m[outside] == 0)


class TestHeatKernel:
    @pytest.mark.parametrize("r", [0.1, 1.0, 10.0])
    def test_one_dimensional_constant(self, r):
        assert heat_kernel_fractional(r, 0.5, 1) * math.sqrt(r) == pytest.approx((2 * math.pi) ** -0.5, abs=1e-4)

    @pytest.mark.parametrize("n,alpha", [(1, 0.25), (1, 0.75), (2, 0.5), (2, 1.5), (3, 1.0)])
    def test_quadrature_matches_closed_form(self, n, alpha):
        assert heat_kernel_constant(alpha, n) == pytest.approx(riesz_constant(alpha, n), rel=1e-9)

    def test_slope(self):
        r = np.geomspace(0.1, 10, 9)
        slope = np.polyfit(np.log(r), np.log(heat_kernel_fractional(r, 0.5, 1)), 1)[0]
        assert slope == pytest.approx(0.5 - 1, abs=1e-3)

    @given(st.floats(0.05, 0.95), st.floats(1e-3, 1e3))
    def test_positive(self, alpha, r):
        assert heat_kernel_fractional(r, alpha, 1) > 0

    def test_invalid(self):
        with pytest.raises(InvalidArgument):
            heat_kernel_fractional(0.0, 0.5, 1)
        with pytest.raises(InvalidArgument):
            heat_kernel_constant(1.0, 1)
