import numpy as np
import pytest
from hypothesis import given, strategies as st

from mixfrac import Box, FnSpec, GridFunction, InvalidArgument, InvalidWeight, make_grid, sample
from mixfrac.operators import CubeFamily, RectangleFamily
from mixfrac.weights import (
    Weight,
    a1_constant,
    ap_constant,
    ap_star_constant,
    ap_table,
    embedding_weight,
    power_weight,
    product_weight,
    rubio_de_francia,
    rubio_de_francia_iterates,
)

from conftest import smooth_random

FAMILIES = [CubeFamily.dyadic(translates=1), CubeFamily.dyadic(), CubeFamily.dense()]


def unit(grid):
    return Weight(GridFunction.constant(grid, 1.0))


class TestWeight:
    def test_strictly_positive(self):
        g = make_grid(Box(0, 1), 4)
        with pytest.raises(InvalidWeight):
            Weight(GridFunction(g, [1, 0, 1, 1]))

    def test_scaled(self):
        w = unit(make_grid(Box(0, 1), 4)).scaled(3.0)
        assert np.all(w.values == 3.0)
        with pytest.raises(InvalidArgument):
            w.scaled(-1.0)


class TestApConstant:
    @pytest.mark.parametrize("family", FAMILIES)
    @pytest.mark.parametrize("p", [1.5, 2, 4])
    def test_unit_weight_is_one(self, family, p):
        g = make_grid(Box(-1, 1), 32)
        assert ap_constant(unit(g), p, family) == 1.0
        assert a1_constant(unit(g), family) == 1.0

    @given(st.floats(0.01, 100.0))
    def test_scale_invariant(self, c):
        g = make_grid(Box(-1, 1), 32)
        w = power_weight(g, 0.5)
        assert ap_constant(w.scaled(c), 2, CubeFamily.dyadic()) == pytest.approx(
            ap_constant(w, 2, CubeFamily.dyadic()), rel=1e-12
        )
        assert a1_constant(unit(g).scaled(c), CubeFamily.dyadic()) == pytest.approx(1.0, rel=1e-14)

    def test_power_weight_symmetric_interval(self):
        # avg of |x|^{1/2} is (2/3) r^{1/2}, avg of |x|^{-1/2} is 2 r^{-1/2}
        g = make_grid(Box(-1, 1), 512)
        assert ap_constant(power_weight(g, 0.5), 2, CubeFamily.dense()) >= 4 / 3 - 1e-3

    def test_symmetric_interval_converges(self):
        # the midpoint rule underestimates the singular dual average by O(h^{1/2})
        fam = CubeFamily.dyadic(Box(-1, 1), levels=(0, 0))
        vals = [ap_constant(power_weight(make_grid(Box(-1, 1), r), 0.5), 2, fam) for r in (512, 2048, 8192)]
        assert vals[0] < vals[1] < vals[2] < 4 / 3
        assert 4 / 3 - vals[2] < 0.5 * (4 / 3 - vals[0])

    @pytest.mark.parametrize("family", FAMILIES)
    @given(a=st.floats(-0.9, 0.9))
    def test_nesting_in_p(self, family, a):
        g = make_grid(Box(0.0, 2.0), 64)
        w = power_weight(g, a)
        values = [ap_constant(w, p, family) for p in (1.5, 2, 3, 6)]
        assert all(hi <= lo + 1e-12 for lo, hi in zip(values, values[1:]))
        assert values[0] <= a1_constant(w, family) + 1e-12

    def test_p_one_rejected(self):
        g = make_grid(Box(0, 1), 8)
        with pytest.raises(InvalidArgument):
            ap_constant(unit(g), 1, CubeFamily.dyadic())

    def test_table_maximum(self):
        g = make_grid(Box(0, 1), 32)
        w = power_weight(g, 0.5)
        rows = ap_table(w, 2, CubeFamily.dyadic())
        assert max(v for _, v in rows) == pytest.approx(ap_constant(w, 2, CubeFamily.dyadic()), rel=1e-14)
        assert all(isinstance(b, Box) for b, _ in rows)


class TestProductWeights:
    def setup_method(self):
        self.g1 = make_grid(Box(0.0, 2.0), 32)
        self.g2 = make_grid(Box(0.0, 2.0), 32)
        self.mu = power_weight(self.g1, 0.5)
        self.nu = power_weight(self.g2, -0.3)
        self.w = product_weight(self.mu, self.nu)
        self.rect = RectangleFamily(CubeFamily.dyadic(), CubeFamily.dyadic())

    def test_factorization(self):
        for p in (1.5, 2, 3):
            star = ap_star_constant(self.w, p, self.rect)
            bound = ap_constant(self.mu, p, CubeFamily.dyadic()) * ap_constant(self.nu, p, CubeFamily.dyadic())
            assert star <= bound + 1e-12

    def test_cubes_below_rectangles(self):
        cubes = self.rect.cube_subfamily()
        for p in (1.5, 2, 3):
            assert ap_constant(self.w, p, cubes) <= ap_star_constant(self.w, p, self.rect) + 1e-12

    def test_unit_star(self):
        g = make_grid(Box((0, 0), (1, 1)), 16)
        assert ap_star_constant(unit(g), 2, self.rect) == 1.0

    def test_grid_is_product(self):
        assert self.w.grid.shape == (32, 32)
        assert self.w.values[3, 5] == pytest.approx(self.mu.values[3] * self.nu.values[5])


class TestEmbeddingWeight:
    def test_one_on_cube(self):
        g = make_grid(Box.symmetric(4.0), 256)
        w = embedding_weight(g, 0.5, CubeFamily.dyadic())
        inside = np.abs(g.centers(0)) < 0.5
        np.testing.assert_allclose(w.values[inside], 1.0)

    def test_centred_cube_at_two(self):
        # M chi_{[-1/2,1/2]}(2) = 1 / 2.5, attained by [-1/2, 2]
        g = make_grid(Box.symmetric(4.0), 1024)
        w = embedding_weight(g, 0.5, CubeFamily.dense())
        k = np.searchsorted(g.centers(0), 2.0) - 1
        assert w.values[k] == pytest.approx(0.4**0.5, abs=2e-2)

    def test_unit_interval_at_two(self):
        g = make_grid(Box.symmetric(4.0), 1024)
        w = embedding_weight(g, 0.5, CubeFamily.dense(), cube=Box(0.0, 1.0))
        k = np.searchsorted(g.centers(0), 2.0) - 1
        assert w.values[k] == pytest.approx(0.5**0.5, abs=2e-2)

    def test_a1_stable_under_refinement(self):
        vals = []
        for res in (256, 512, 1024):
            g = make_grid(Box.symmetric(4.0), res)
            vals.append(a1_constant(embedding_weight(g, 0.5, CubeFamily.dense()), CubeFamily.dense()))
        assert np.isfinite(vals).all()
        assert max(vals) / min(vals) - 1 < 0.05

    def test_positive_floor(self):
        g = make_grid(Box.symmetric(4.0, 2), 32)
        w = embedding_weight(g, 0.3, CubeFamily.explicit([Box.cube((0, 0), 1.0)]))
        assert np.all(w.values > 0)

    def test_epsilon_range(self):
        g = make_grid(Box.symmetric(4.0), 32)
        with pytest.raises(InvalidArgument):
            embedding_weight(g, 1.0, CubeFamily.dyadic())


class TestRubioDeFrancia:
    def test_series_value(self):
        g = make_grid(Box.symmetric(4.0), 256)
        h = sample(FnSpec.indicator(Box(0.0, 1.0)), g)
        r = rubio_de_francia(h, 2.0, 2, CubeFamily.dense())
        k = np.searchsorted(g.centers(0), 0.5)
        assert r.values[k] == pytest.approx(1 + 1 / 4 + 1 / 16, rel=1e-12)

    @given(st.integers(0, 5), st.integers(0, 1000))
    def test_majorizes(self, K, seed):
        g = make_grid(Box.symmetric(2.0), 64)
        h = smooth_random(g, seed, 1.5) - 0.4
        assert np.all(np.abs(h.values) <= rubio_de_francia(h, 1.5, K, CubeFamily.dyadic()).values)

    def test_maximal_bound(self):
        from mixfrac.operators import maximal

        g = make_grid(Box.symmetric(2.0), 128)
        fam = CubeFamily.dyadic()
        h = smooth_random(g, 3, 1.5)
        A, K = 3.0, 4
        lhs = maximal(rubio_de_francia(h, A, K, fam), fam).values
        rhs = 2 * A * rubio_de_francia(h, A, K + 1, fam).values
        assert np.all(lhs <= rhs * (1 + 1e-12))

    def test_iterates(self):
        g = make_grid(Box(0, 1), 16)
        it = rubio_de_francia_iterates(GridFunction.constant(g, -2.0), 3, CubeFamily.dyadic())
        assert len(it) == 4
        np.testing.assert_allclose(it[-1].values, 2.0)

    def test_invalid(self):
        g = make_grid(Box(0, 1), 16)
        h = GridFunction.constant(g, 1.0)
        with pytest.raises(InvalidArgument):
            rubio_de_francia(h, 0.0, 2, CubeFamily.dyadic())
        with pytest.raises(InvalidArgument):
            rubio_de_francia_iterates(h, -1, CubeFamily.dyadic())
