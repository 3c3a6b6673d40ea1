import math

import numpy as np
import pytest

from cvwitness.numerics import Grid1D, SampledDensity1D
from cvwitness.marginals import DiscreteDistribution, discretize, variance
from cvwitness.entropies import (
    lalpha_norm,
    renyi_continuous,
    renyi_discrete,
    shannon_continuous,
    tsallis_discrete,
)

from conftest import gauss_density, quadratic_gauss_density, renyi_gauss, shannon_gauss


@pytest.fixture(scope="module")
def grid():
    return Grid1D.symmetric(12.0, 2401)


def uniform_density(lo, hi, n=1001):
    g = Grid1D(lo, hi, n)
    return SampledDensity1D.from_values(g, np.ones(n))


class TestLalphaNorm:
    def test_uniform_alpha_two(self):
        d = uniform_density(0.0, 2.0)
        assert lalpha_norm(d, 2.0) == pytest.approx(math.sqrt(0.5), abs=1e-9)

    def test_alpha_one_is_mass(self, grid):
        assert lalpha_norm(gauss_density(grid), 1.0) == pytest.approx(1.0, abs=1e-9)

    def test_alpha_inf_is_peak(self, grid):
        assert lalpha_norm(gauss_density(grid), math.inf) == pytest.approx(
            1.0 / math.sqrt(2 * math.pi), abs=1e-9)

    def test_rejects_bad_order(self, grid):
        with pytest.raises(ValueError):
            lalpha_norm(gauss_density(grid), -1.0)


def wide_gauss(var: float):
    half = 15.0 * max(1.0, math.sqrt(var))
    return gauss_density(Grid1D.symmetric(half, 6001), var=var)


class TestShannonContinuous:
    def test_gaussian_closed_form(self):
        d = wide_gauss(4.0)
        assert shannon_continuous(d) == pytest.approx(shannon_gauss(4.0), abs=1e-6)
        assert shannon_gauss(4.0) == pytest.approx(2.11209, abs=1e-5)

    def test_uniform_zero(self):
        assert shannon_continuous(uniform_density(0.0, 1.0)) == pytest.approx(0.0, abs=1e-12)

    def test_translation_invariance(self):
        g1 = Grid1D.symmetric(10.0, 2001)
        g2 = Grid1D(-5.0, 15.0, 2001)
        assert shannon_continuous(gauss_density(g2, mean=5.0)) == pytest.approx(
            shannon_continuous(gauss_density(g1, mean=0.0)), abs=1e-6)


class TestRenyiContinuous:
    def test_gaussian_alpha_two(self, grid):
        d = gauss_density(grid, var=1.0)
        assert renyi_continuous(d, 2.0) == pytest.approx(math.log(2 * math.sqrt(math.pi)),
                                                         abs=1e-8)
        assert math.log(2 * math.sqrt(math.pi)) == pytest.approx(1.26551, abs=1e-5)

    def test_gaussian_alpha_one_routes_to_shannon(self, grid):
        d = gauss_density(grid, var=1.0)
        assert renyi_continuous(d, 1.0) == pytest.approx(
            0.5 * math.log(2 * math.pi * math.e), abs=1e-8)

    @pytest.mark.parametrize("alpha", [0.6, 2.0, 5.0])
    @pytest.mark.parametrize("var", [0.5, 1.0, 4.0])
    def test_gaussian_family_closed_form(self, alpha, var):
        d = wide_gauss(var)
        assert renyi_continuous(d, alpha) == pytest.approx(
            renyi_gauss(var, alpha), abs=1e-6)

    def test_uniform_all_orders(self):
        d = uniform_density(0.0, 2.5)
        for alpha in (0.5, 1.0, 2.0, math.inf):
            assert renyi_continuous(d, alpha) == pytest.approx(math.log(2.5), abs=1e-9)

    def test_min_entropy(self, grid):
        d = gauss_density(grid, var=1.0)
        assert renyi_continuous(d, math.inf) == pytest.approx(
            0.5 * math.log(2 * math.pi), abs=1e-9)

    def test_monotone_in_alpha(self, grid):
        d = quadratic_gauss_density(grid, sigma=1.0)
        alphas = [0.55, 0.8, 1.0, 1.5, 2.0, 4.0, 10.0, math.inf]
        values = [renyi_continuous(d, a) for a in alphas]
        assert all(a >= b - 1e-10 for a, b in zip(values, values[1:]))

    def test_limit_alpha_to_one(self, grid):
        d = quadratic_gauss_density(grid, sigma=1.0)
        h = shannon_continuous(d)
        for alpha in (1 - 1e-4, 1 + 1e-4):
            assert abs(renyi_continuous(d, alpha) - h) < 1e-3

    def test_truncation_warning_on_fattened_tails(self):
        # a power-law density looks decayed at the edge, but d^0.6 does not
        g = Grid1D.symmetric(60.0, 6001)
        x = g.points()
        d = SampledDensity1D.from_values(g, 1.0 / (1.0 + x * x) ** 2)
        with pytest.warns(UserWarning):
            renyi_continuous(d, 0.6)

    def test_no_warning_for_compact_support(self):
        import warnings as _w
        d = uniform_density(0.0, 2.0)
        with _w.catch_warnings():
            _w.simplefilter("error")
            renyi_continuous(d, 0.6)


class TestDiscrete:
    def test_uniform_four_bins(self):
        dist = DiscreteDistribution(1.0, 0.0, np.full(4, 0.25))
        for alpha in (0.5, 1.0, 2.0, math.inf):
            assert renyi_discrete(dist, alpha) == pytest.approx(math.log(4), abs=1e-12)

    def test_point_mass(self):
        dist = DiscreteDistribution(1.0, 0.0, np.array([1.0]))
        for alpha in (0.5, 1.0, 2.0):
            assert renyi_discrete(dist, alpha) == pytest.approx(0.0, abs=1e-12)

    def test_two_outcomes_alpha_two(self):
        dist = DiscreteDistribution(1.0, 0.0, np.array([0.5, 0.5]))
        assert renyi_discrete(dist, 2.0) == pytest.approx(math.log(2), abs=1e-12)

    def test_tsallis_two_outcomes(self):
        dist = DiscreteDistribution(1.0, 0.0, np.array([0.5, 0.5]))
        assert tsallis_discrete(dist, 2.0) == pytest.approx(0.5, abs=1e-12)

    def test_tsallis_uniform_closed_form(self):
        n, alpha = 7, 3.0
        dist = DiscreteDistribution(1.0, 0.0, np.full(n, 1.0 / n))
        expected = (n ** (1 - alpha) - 1) / (1 - alpha)
        assert tsallis_discrete(dist, alpha) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("alpha", [0.6, 2.0, 3.5])
    def test_tsallis_renyi_identity(self, alpha):
        # H_alpha = ln(1 + (1 - alpha) T_alpha) / (1 - alpha)
        rng = np.random.default_rng(7)
        p = rng.random(20)
        dist = DiscreteDistribution.from_weights(1.0, 0.0, p)
        t = tsallis_discrete(dist, alpha)
        h = math.log(1 + (1 - alpha) * t) / (1 - alpha)
        assert h == pytest.approx(renyi_discrete(dist, alpha), abs=1e-10)

    def test_renyi_discrete_monotone(self):
        rng = np.random.default_rng(3)
        dist = DiscreteDistribution.from_weights(1.0, 0.0, rng.random(15))
        alphas = [0.5, 0.9, 1.0, 1.4, 2.0, 6.0, math.inf]
        values = [renyi_discrete(dist, a) for a in alphas]
        assert all(a >= b - 1e-12 for a, b in zip(values, values[1:]))

    def test_tsallis_rejects_inf(self):
        dist = DiscreteDistribution(1.0, 0.0, np.array([0.5, 0.5]))
        with pytest.raises(ValueError):
            tsallis_discrete(dist, math.inf)


class TestBridge:
    @pytest.mark.parametrize("alpha", [0.6, 1.0, 2.0])
    def test_halving_width_shrinks_gap(self, alpha):
        g = Grid1D.symmetric(12.0, 4801)
        d = gauss_density(g, var=1.0)
        cont = renyi_continuous(d, alpha)
        gaps = []
        for width in (0.4, 0.2, 0.1):
            disc = renyi_discrete(discretize(d, width), alpha)
            gaps.append(abs(disc + math.log(width) - cont))
        assert gaps[1] < 0.5 * gaps[0] + 1e-12
        assert gaps[2] < 0.5 * gaps[1] + 1e-12


class TestSaturationChain:
    def test_entropy_below_variance_bound(self):
        # ln(2 pi e std(R) std(S)) bounds the entropy sum from above
        from cvwitness.marginals import marginal_set_of_pure_state
        from cvwitness.states import HermiteGaussParams, build_hermite_gauss
        grid = Grid1D.self_dual(729)
        ms = marginal_set_of_pure_state(
            build_hermite_gauss(HermiteGaussParams(1.0, 0.7), grid))
        for d_r, d_s in ((ms.r_plus, ms.s_minus), (ms.r_minus, ms.s_plus)):
            h = shannon_continuous(d_r) + shannon_continuous(d_s)
            bound = math.log(2 * math.pi * math.e
                             * math.sqrt(variance(d_r) * variance(d_s)))
            assert h <= bound + 1e-4
