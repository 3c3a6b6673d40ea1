import math

import numpy as np
import pytest

from cvwitness.numerics import Grid1D, SampledDensity1D
from cvwitness.marginals import (
    MarginalSet,
    cat_marginal_set,
    discretize,
    gaussian_product_marginal_set,
    marginal_set_of_pure_state,
)
from cvwitness.states import (
    CatParams,
    GaussianProductParams,
    HermiteGaussParams,
    NoonParams,
    build_gaussian_product,
    build_hermite_gauss,
    build_noon,
    default_grid,
)
from cvwitness.witnesses import (
    EULER_GAMMA,
    ConjugateExponents,
    EvalConfig,
    StrongRenyiExponents,
    conjugate_beta,
    covariance_for,
    evaluate_all,
    hermite_gauss_thresholds,
    marginal_set_for,
    mgvt,
    renyi_strong,
    renyi_weak,
    renyi_weak_discrete,
    shannon_strong,
    shannon_weak,
    simon_ppt,
    symplectic_eigenvalues,
    tsallis_witness,
    young_coefficient,
)
from cvwitness.marginals import CovarianceMatrix4

from conftest import gauss_density


GRID = Grid1D.self_dual(729)


@pytest.fixture(scope="module")
def vacuum_ms():
    return marginal_set_of_pure_state(
        build_gaussian_product(GaussianProductParams.vacuum(), GRID))


def hg_ms(ratio):
    return marginal_set_of_pure_state(
        build_hermite_gauss(HermiteGaussParams(1.0, ratio), GRID))


def gaussian_marginal_pair(grid, var_r, var_s):
    """Synthetic (R, S) marginal-set stand-in with chosen global variances."""
    wide_r = gauss_density(grid, var=var_s)
    wide_s = gauss_density(grid, var=var_r)
    return MarginalSet(
        r1=gauss_density(grid, var=0.5), r2=gauss_density(grid, var=0.5),
        s1=gauss_density(grid, var=0.5), s2=gauss_density(grid, var=0.5),
        r_plus=wide_r, r_minus=gauss_density(grid, var=var_r),
        s_plus=gauss_density(grid, var=var_s), s_minus=wide_s)


class TestYoungCoefficient:
    def test_both_one(self):
        assert young_coefficient(1.0, 1.0) == pytest.approx(1.0, abs=1e-12)

    def test_both_two(self):
        # C_2 = 1 and the combined exponent is inf with C_inf = 1
        assert young_coefficient(2.0, 2.0) == pytest.approx(1.0, abs=1e-12)

    def test_two_thirds_pair(self):
        # closed form: C_{2/3}^2 / C_{1/2} = 8 / (3 sqrt(3))
        expected = 8.0 / (3.0 * math.sqrt(3.0))
        assert young_coefficient(2 / 3, 2 / 3) == pytest.approx(expected, rel=1e-10)

    def test_bounds_on_exponent_grids(self):
        above = np.linspace(1.0, 5.0, 9)
        for a1 in above:
            for a2 in above:
                if 1 / a1 + 1 / a2 < 1.0:  # outside the Young domain
                    continue
                assert young_coefficient(a1, a2) <= 1.0 + 1e-12
        below = np.linspace(0.55, 1.0, 9)
        for b1 in below:
            for b2 in below:
                assert young_coefficient(b1, b2) >= 1.0 - 1e-12


class TestConjugateBeta:
    def test_self_conjugate_one(self):
        assert conjugate_beta(1.0) == pytest.approx(1.0)

    def test_two_maps_to_two_thirds(self):
        assert conjugate_beta(2.0) == pytest.approx(2.0 / 3.0, rel=1e-14)

    def test_infinity_maps_to_half(self):
        assert conjugate_beta(math.inf) == 0.5
        assert conjugate_beta(0.5) == math.inf

    def test_rejects_below_half(self):
        with pytest.raises(ValueError):
            conjugate_beta(0.49)

    def test_pair_validation(self):
        with pytest.raises(ValueError):
            ConjugateExponents(2.0, 0.5)
        ConjugateExponents(2.0, 2.0 / 3.0)


class TestStrongExponents:
    def test_from_alphas_two_two(self):
        e = StrongRenyiExponents.from_alphas(2.0, 2.0)
        assert e.alpha == math.inf
        assert e.beta == pytest.approx(0.5)
        assert e.beta1 == pytest.approx(2 / 3)
        assert e.is_conjugate_backed()
        assert not e.switched

    def test_forbidden_region_rejected(self):
        with pytest.raises(ValueError):
            StrongRenyiExponents.from_alphas(4.0, 4.0)

    def test_relation_violation_rejected(self):
        with pytest.raises(ValueError):
            StrongRenyiExponents(2.0, 2.0, 2 / 3, 2 / 3, 3.0, 0.5)

    def test_ordering_violation_rejected(self):
        with pytest.raises(ValueError):
            StrongRenyiExponents(2.0, 0.8, conjugate_beta(2.0), conjugate_beta(0.8),
                                 math.inf, 0.5)


class TestThresholds:
    def test_alpha_one_euler_limit(self):
        lower, upper = hermite_gauss_thresholds(1.0)
        assert lower == pytest.approx(math.exp(1 - EULER_GAMMA) / 2, rel=1e-12)
        assert lower == pytest.approx(0.76310, abs=1e-4)
        assert upper == pytest.approx(1.31045, abs=1e-4)

    def test_alpha_half(self):
        lower, upper = hermite_gauss_thresholds(0.5)
        assert lower == pytest.approx(math.pi / 4, rel=1e-12)
        assert upper == pytest.approx(4 / math.pi, rel=1e-12)

    def test_alpha_two(self):
        lower, upper = hermite_gauss_thresholds(2.0)
        assert lower == pytest.approx(0.75, rel=1e-12)
        assert upper == pytest.approx(4.0 / 3.0, rel=1e-12)

    def test_rejects_below_half(self):
        with pytest.raises(ValueError):
            hermite_gauss_thresholds(0.4)


class TestShannonWeak:
    def test_vacuum_saturates(self, vacuum_ms):
        for v in shannon_weak(vacuum_ms):
            assert abs(v.margin) < 1e-4
            assert not v.detected

    def test_narrow_ratio_detected(self):
        verdicts = shannon_weak(hg_ms(0.5))
        assert any(v.detected for v in verdicts)

    def test_ratio_13_not_detected(self):
        # 1.3 sits inside the undetected band (upper limit ~1.31045)
        verdicts = shannon_weak(hg_ms(1.3))
        assert not any(v.detected for v in verdicts)


class TestShannonStrong:
    def test_vacuum_margin_zero_not_detected(self, vacuum_ms):
        for v in shannon_strong(vacuum_ms, state_is_pure=True):
            assert v.margin == pytest.approx(0.0, abs=1e-4)
            assert not v.detected

    def test_noon_one_detected(self):
        ms = marginal_set_of_pure_state(build_noon(NoonParams(1), GRID))
        assert any(v.detected for v in shannon_strong(ms, state_is_pure=True))

    def test_squeezed_product_not_detected(self):
        ms = marginal_set_of_pure_state(build_gaussian_product(
            GaussianProductParams.squeezed(0.4, -0.25), GRID))
        for v in shannon_strong(ms, state_is_pure=True):
            assert not v.detected
            assert v.margin > -1e-4

    def test_rejects_mixed(self, vacuum_ms):
        with pytest.raises(ValueError):
            shannon_strong(vacuum_ms, state_is_pure=False)

    def test_rhs_dominates_weak_bound_on_pure_states(self, vacuum_ms):
        # the subsystem-entropy bound sits at or above ln(2 pi e), so the
        # strong criterion implies the weak one wherever it applies
        floor = math.log(2 * math.pi * math.e)
        sets = [vacuum_ms,
                marginal_set_of_pure_state(build_gaussian_product(
                    GaussianProductParams.squeezed(0.4, -0.25), GRID)),
                hg_ms(0.7)]
        sets += [marginal_set_of_pure_state(build_noon(NoonParams(n), GRID))
                 for n in (1, 3)]
        for ms in sets:
            rhs = shannon_strong(ms, state_is_pure=True)[0].rhs
            assert rhs >= floor - 1e-4


class TestRenyiWeak:
    @pytest.mark.parametrize("alpha", [0.6, 2.0, 4.0])
    def test_vacuum_saturates_all_combinations(self, vacuum_ms, alpha):
        verdicts = renyi_weak(vacuum_ms, alpha)
        assert len(verdicts) == 4
        for v in verdicts:
            assert abs(v.margin) < 1e-4

    def test_ratio_13_detected_near_half(self):
        assert any(v.detected for v in renyi_weak(hg_ms(1.3), 0.51))

    def test_noon_undetected_for_alpha_family(self):
        ms = marginal_set_of_pure_state(build_noon(NoonParams(2), GRID))
        for alpha in (0.55, 0.75, 1.0, 1.5, 2.0, 4.0):
            assert not any(v.detected for v in renyi_weak(ms, alpha))

    def test_rejects_below_half(self, vacuum_ms):
        with pytest.raises(ValueError):
            renyi_weak(vacuum_ms, 0.45)

    def test_limit_matches_shannon(self):
        ms = hg_ms(0.8)
        shannon = {v.pairing: v.margin for v in shannon_weak(ms)}
        for eps in (-1e-4, 1e-4):
            for v in renyi_weak(ms, 1.0 + eps):
                assert v.margin == pytest.approx(shannon[v.pairing], abs=1e-3)

    def test_ppt_pairing_symmetry(self):
        # a state even in each coordinate has P(q1, q2) = P(q1, -q2), so the
        # two pairings carry identical margins
        ms = marginal_set_of_pure_state(build_gaussian_product(
            GaussianProductParams.squeezed(0.3, -0.1), GRID))
        verdicts = renyi_weak(ms, 2.0)
        by_assignment = {}
        for v in verdicts:
            by_assignment.setdefault(v.exponents["alpha_on"], []).append(v.margin)
        for margins in by_assignment.values():
            assert margins[0] == pytest.approx(margins[1], abs=1e-10)


class TestRenyiStrong:
    def test_noon_detection(self):
        e = StrongRenyiExponents.from_alphas(2.0, 2.0)
        ms = marginal_set_of_pure_state(build_noon(NoonParams(2), GRID))
        verdicts = renyi_strong(ms, e, state_is_pure=True)
        assert any(v.detected for v in verdicts)

    def test_vacuum_not_detected(self, vacuum_ms):
        e = StrongRenyiExponents.from_alphas(2.0, 2.0)
        for v in renyi_strong(vacuum_ms, e, state_is_pure=True):
            assert not v.detected
            assert v.margin > -1e-6

    def test_limit_recovers_shannon_strong(self):
        # the inequality scales by (alpha - 1)/alpha near 1: compare the
        # normalized margin against the Shannon entropy-power margin
        ms = marginal_set_of_pure_state(build_noon(NoonParams(1), GRID))
        eps = 1e-4
        e = StrongRenyiExponents.from_alphas(1.0 + eps, 1.0 + eps)
        strong = {v.pairing: v for v in renyi_strong(ms, e, state_is_pure=True)}
        shannon = {v.pairing: v for v in shannon_strong(ms, state_is_pure=True)}
        for pairing, v in strong.items():
            normalized = v.metadata["normalized_margin"]
            assert normalized == pytest.approx(shannon[pairing].margin, abs=1e-3)
            assert v.detected == shannon[pairing].detected

    def test_rejects_mixed(self, vacuum_ms):
        with pytest.raises(ValueError):
            renyi_strong(vacuum_ms, StrongRenyiExponents.from_alphas(2.0, 2.0),
                         state_is_pure=False)


class TestDiscreteCriteria:
    def test_vacuum_margin_matches_continuous(self):
        # vacuum global marginals are exactly N(0, 1); at width 0.05 the
        # discrete margin sits within 1e-3 of the (zero) continuous margin
        grid = Grid1D.symmetric(12.0, 4801)
        unit = gauss_density(grid, var=1.0)
        v = renyi_weak_discrete(discretize(unit, 0.05), discretize(unit, 0.05), 1.0)
        assert abs(v.margin) < 1e-3
        assert not v.detected

    def test_hermite_gauss_half_detected(self):
        # analytic global marginals of the ratio-1/2 state on a fine grid
        grid = Grid1D.symmetric(14.0, 5601)
        x = grid.points()
        sp, sm = 1.0, 0.5
        r_minus = SampledDensity1D.from_values(
            grid, np.exp(-x * x / (2 * sm**2)))
        s_plus = SampledDensity1D.from_values(
            grid, x * x * np.exp(-x * x * sp**2 / 2))
        v = renyi_weak_discrete(discretize(r_minus, 0.05),
                                discretize(s_plus, 0.05), 1.0, "R-S+")
        assert v.detected

    def test_single_bin_never_detected_when_bound_non_positive(self):
        # beyond width product 2 pi e the alpha = 1 bound is non-positive,
        # so even the zero-information single-bin pair cannot trip it
        from cvwitness.marginals import DiscreteDistribution
        width = 4.2  # width product 17.64 > 2 pi e
        one = DiscreteDistribution(width, 0.0, np.array([1.0]))
        v = renyi_weak_discrete(one, one, 1.0)
        assert v.lhs == pytest.approx(0.0)
        assert v.rhs <= 0.0
        assert v.metadata.get("uninformative") is True
        assert not v.detected

    def test_tsallis_vacuum_not_detected(self, vacuum_ms):
        for width in (0.1, 0.5):
            d_r = discretize(vacuum_ms.r_plus, width)
            d_s = discretize(vacuum_ms.s_minus, width)
            v = tsallis_witness(d_r, d_s, 2.0, 2 / 3, "R+S-")
            assert not v.detected

    def test_tsallis_alpha_below_one_sound(self, vacuum_ms):
        d_r = discretize(vacuum_ms.r_plus, 0.1)
        d_s = discretize(vacuum_ms.s_minus, 0.1)
        v = tsallis_witness(d_r, d_s, 0.6, 3.0, "R+S-")
        assert not v.detected
        assert v.margin > 0

    def test_tsallis_rejects_alpha_one(self, vacuum_ms):
        d = discretize(vacuum_ms.r_plus, 0.1)
        with pytest.raises(ValueError):
            tsallis_witness(d, d, 1.0, 1.0)

    def test_tsallis_case_boundary_continuity(self):
        # the two bound expressions agree where the regime switches
        for alpha in (1.5, 2.0, 3.0):
            beta = conjugate_beta(alpha)
            a, b = max(alpha, beta), min(alpha, beta)
            crossover = (2 * math.pi / b) * (a / b) ** (1 / (2 * (a - 1)))
            rhs_small = ((b / a) ** (1 / (2 * a))
                         * (b * crossover / (2 * math.pi)) ** ((a - 1) / a) - 1) / (1 - a)
            rhs_large = ((a / b) ** (1 / (2 * a))
                         * (b * crossover / (2 * math.pi)) ** ((1 - a) / a) - 1) / (a - 1)
            assert rhs_small == pytest.approx(rhs_large, abs=1e-10)

    def test_tsallis_crossover_metadata(self, vacuum_ms):
        d_r = discretize(vacuum_ms.r_plus, 0.1)
        d_s = discretize(vacuum_ms.s_minus, 0.1)
        v = tsallis_witness(d_r, d_s, 2.0, 2 / 3, "R+S-")
        assert v.metadata["case"] == "small-resolution"


class TestMgvt:
    def test_vacuum_product_one(self, vacuum_ms):
        for v in mgvt(vacuum_ms):
            assert v.lhs == pytest.approx(1.0, abs=1e-4)
            assert not v.detected

    @pytest.mark.parametrize("n", [1, 2, 4])
    def test_noon_never_detected(self, n):
        ms = marginal_set_of_pure_state(build_noon(NoonParams(n), GRID))
        for v in mgvt(ms):
            assert not v.detected

    def test_two_mode_squeezed_detected(self):
        grid = Grid1D.symmetric(10.0, 2001)
        ms = gaussian_marginal_pair(grid, var_r=math.exp(-2), var_s=math.exp(-2))
        verdicts = mgvt(ms)
        detected = [v for v in verdicts if v.pairing == "R-S+"]
        assert detected[0].lhs == pytest.approx(math.exp(-4), rel=1e-4)
        assert detected[0].detected


class TestSimon:
    def test_vacuum_boundary(self):
        cm = CovarianceMatrix4(0.5 * np.eye(4))
        v = simon_ppt(cm)
        assert v.lhs == pytest.approx(0.5, abs=1e-12)
        assert not v.detected

    def test_hermite_gauss_ratio_two_detected(self):
        cm = covariance_for(HermiteGaussParams(1.0, 2.0), EvalConfig(grid_points=729))
        assert simon_ppt(cm).detected

    def test_hermite_gauss_ratio_12_not_detected(self):
        cm = covariance_for(HermiteGaussParams(1.0, 1.2), EvalConfig(grid_points=729))
        assert not simon_ppt(cm).detected

    def test_unphysical_rejected(self):
        with pytest.raises(ValueError):
            simon_ppt(CovarianceMatrix4(0.1 * np.eye(4)))

    def test_symplectic_eigenvalues_vacuum(self):
        nus = symplectic_eigenvalues(CovarianceMatrix4(0.5 * np.eye(4)))
        assert np.allclose(nus, [0.5, 0.5])


class TestTranslationInvariance:
    def test_flags_unchanged_by_rigid_shift(self):
        grid = Grid1D.symmetric(10.0, 2001)
        ms = gaussian_marginal_pair(grid, var_r=0.4, var_s=0.9)
        shift = 2.5
        shifted_grid = Grid1D(grid.min + shift, grid.max + shift, grid.n_points)

        def shifted(d):
            return SampledDensity1D(shifted_grid, d.values, d.renormalization)

        ms_shifted = MarginalSet(*[shifted(getattr(ms, k)) for k in (
            "r1", "r2", "s1", "s2", "r_plus", "r_minus", "s_plus", "s_minus")])
        for original, moved in ((shannon_weak(ms), shannon_weak(ms_shifted)),
                                (mgvt(ms), mgvt(ms_shifted)),
                                (renyi_weak(ms, 2.0), renyi_weak(ms_shifted, 2.0))):
            for v0, v1 in zip(original, moved):
                assert v0.margin == pytest.approx(v1.margin, abs=1e-9)
                assert v0.detected == v1.detected


class TestEvaluateAll:
    def test_vacuum_zero_detections(self):
        report = evaluate_all(GaussianProductParams.vacuum(),
                              EvalConfig(grid_points=729, resolutions=((0.2, 0.2),)))
        assert report.detections() == []
        assert report.failures == []

    def test_narrow_hermite_gauss_detections(self):
        report = evaluate_all(HermiteGaussParams(1.0, 0.5),
                              EvalConfig(grid_points=729))
        detected_criteria = {v.criterion for v in report.detections()}
        assert {"shannon-weak", "renyi-weak", "mgvt", "simon-ppt"} <= detected_criteria

    def test_cat_strong_criteria_rejected_as_failures(self):
        report = evaluate_all(
            CatParams(1.0, 0.2),
            EvalConfig(criteria=("shannon-strong", "renyi-weak"),
                       alphas=(1.0,), direct_spacing=0.02))
        assert any(c == "shannon-strong" for c, _ in report.failures)
        assert any(v.criterion == "renyi-weak" for v in report.verdicts)

    def test_verdict_order_deterministic(self):
        cfg = EvalConfig(grid_points=729, alphas=(2.0, 0.6))
        a = evaluate_all(GaussianProductParams.vacuum(), cfg)
        b = evaluate_all(GaussianProductParams.vacuum(), cfg)
        assert [v.sort_key() for v in a.verdicts] == [v.sort_key() for v in b.verdicts]
