"""
Tests du service statistique
"""

import math

import numpy as np
import pytest
from scipy import stats as sps

from app.core.exceptions import InvalidArgumentError, InvalidParameterError
from app.services.analytic import uniform_cdf
from app.services.stats import (
    empirical_cdf,
    fit,
    fit_beta,
    fit_gamma,
    fit_gaussian,
    fitted_cdf,
    histogram,
    kolmogorov_sf,
    ks_critical_value,
    ks_statistic,
    lag1_autocorrelation,
    linear_regression,
    log_median_decay,
    mean_log_modulus_curve,
    sample_from_fit,
)


class TestHistogram:
    def test_uniform_bins(self, gen):
        hist = histogram(gen.random(1_000_000), binning=20, value_range=(0.0, 1.0))
        assert hist.mass == pytest.approx(1.0, abs=1e-12)
        assert np.all((hist.densities > 0.98) & (hist.densities < 1.02))

    def test_default_rule(self, gen):
        hist = histogram(gen.standard_normal(5000))
        assert hist.count == 5000
        assert hist.mass == pytest.approx(1.0, abs=1e-12)

    def test_explicit_edges_drop_outside(self):
        hist = histogram([0.1, 0.2, 0.6, 3.0], binning=[0.0, 0.5, 1.0])
        assert hist.count == 3
        np.testing.assert_allclose(hist.densities, [4 / 3, 2 / 3])

    @pytest.mark.parametrize("binning", [None, 15, [0.0, 0.5, 1.0, 2.0]])
    def test_order_of_samples_is_irrelevant(self, gen, binning):
        samples = gen.gamma(2.0, 0.5, size=3000)
        shuffled = gen.permutation(samples)
        first = histogram(samples, binning=binning)
        second = histogram(shuffled, binning=binning)
        np.testing.assert_array_equal(first.edges, second.edges)
        np.testing.assert_array_equal(first.densities, second.densities)
        assert first.count == second.count

    def test_rejects_single_sample(self):
        with pytest.raises(InvalidArgumentError):
            histogram([0.5])

    def test_rejects_unordered_edges(self):
        with pytest.raises(InvalidArgumentError):
            histogram([0.1, 0.2], binning=[0.0, 0.5, 0.4])

    def test_nothing_in_range(self):
        with pytest.raises(InvalidArgumentError):
            histogram([2.0, 3.0], binning=[0.0, 1.0])


class TestKolmogorovSmirnov:
    def test_single_sample(self):
        assert ks_statistic([0.5], uniform_cdf).statistic == pytest.approx(0.5)

    def test_matches_scipy(self, gen):
        samples = gen.beta(2.0, 2.0, 500)
        ours = ks_statistic(samples, uniform_cdf)
        reference = sps.kstest(samples, "uniform")
        assert ours.statistic == pytest.approx(reference.statistic, abs=1e-14)
        assert ours.statistic > 0.1
        assert ours.p_value < 1e-3

    def test_uniform_samples_pass(self, gen):
        result = ks_statistic(gen.random(20_000), uniform_cdf)
        assert result.statistic < ks_critical_value(20_000, confidence=0.999)

    def test_rejects_decreasing_cdf(self):
        with pytest.raises(InvalidArgumentError):
            ks_statistic([0.1, 0.5, 0.9], lambda x: 1.0 - x)

    def test_kolmogorov_sf_matches_scipy(self):
        for x in (0.3, 0.8, 1.17, 1.19, 1.5, 2.5):
            assert kolmogorov_sf(x) == pytest.approx(sps.kstwobign.sf(x), abs=1e-10)
        assert kolmogorov_sf(0.0) == 1.0

    def test_critical_value(self):
        assert ks_critical_value(10_000) == pytest.approx(1.628 / 100.0, rel=5e-3)

    def test_critical_value_domain(self):
        with pytest.raises(InvalidParameterError):
            ks_critical_value(10, confidence=1.0)

    def test_empirical_cdf(self):
        x, f = empirical_cdf([0.3, 0.1, 0.2])
        np.testing.assert_array_equal(x, [0.1, 0.2, 0.3])
        np.testing.assert_allclose(f, [1 / 3, 2 / 3, 1.0])


class TestFits:
    def test_gamma_recovers_parameters(self, gen):
        samples = gen.gamma(2.0, 1.0 / 3.0, 100_000)
        result = fit_gamma(samples, excluded=4)
        assert 1.95 <= result.param("alpha") <= 2.05
        assert 2.92 <= result.param("beta") <= 3.08
        assert result.method == "mle"
        assert not result.fallback
        assert result.sample_count == 100_000
        assert result.excluded_count == 4
        assert result.ks_statistic < 0.01

    def test_gamma_log_likelihood_matches_scipy(self, gen):
        samples = gen.gamma(1.5, 2.0, 2000)
        result = fit_gamma(samples)
        expected = np.sum(sps.gamma(result.param("alpha"), scale=1 / result.param("beta")).logpdf(samples))
        assert result.log_likelihood == pytest.approx(expected, rel=1e-10)

    def test_gamma_rejects_non_positive(self):
        with pytest.raises(InvalidArgumentError):
            fit_gamma(np.r_[np.linspace(0.1, 1.0, 20), -0.5])

    def test_constant_samples(self):
        with pytest.raises(InvalidArgumentError):
            fit_gamma(np.full(50, 2.0))

    def test_too_few_samples(self):
        with pytest.raises(InvalidArgumentError):
            fit_gaussian([1.0, 2.0, 3.0])

    def test_beta_recovers_parameters(self, gen):
        result = fit_beta(gen.beta(2.0, 5.0, 50_000))
        assert result.param("alpha") == pytest.approx(2.0, rel=0.05)
        assert result.param("beta") == pytest.approx(5.0, rel=0.05)

    def test_beta_symmetric_data(self, gen):
        half = gen.beta(3.0, 3.0, 5000)
        result = fit_beta(np.concatenate((half, 1.0 - half)))
        assert result.param("alpha") == pytest.approx(result.param("beta"), abs=1e-6)

    def test_beta_rejects_boundary_values(self):
        with pytest.raises(InvalidArgumentError):
            fit_beta(np.r_[np.linspace(0.1, 0.9, 20), 1.0])

    def test_gaussian(self, gen):
        samples = gen.normal(0.25, 0.1, 10_000)
        result = fit_gaussian(samples)
        assert result.param("mean") == pytest.approx(np.mean(samples))
        assert result.param("variance") == pytest.approx(np.var(samples, ddof=1))

    def test_fit_by_family(self, gen):
        assert fit("gamma", gen.gamma(2.0, 1.0, 500)).family == "gamma"
        with pytest.raises(InvalidArgumentError):
            fit("lognormal", gen.random(500))

    def test_unknown_parameter_name(self, gen):
        with pytest.raises(KeyError):
            fit_gaussian(gen.random(100)).param("alpha")

    def test_refit_is_self_consistent(self, make_gen):
        original = fit_gamma(make_gen(1).gamma(9.0, 1 / 6.0, 20_000))
        resampled = sample_from_fit(original, 20_000, make_gen(2))
        refit = fit_gamma(resampled)
        assert refit.param("alpha") == pytest.approx(original.param("alpha"), rel=0.05)
        assert refit.param("beta") == pytest.approx(original.param("beta"), rel=0.05)

    def test_fitted_cdf(self, gen):
        result = fit_beta(gen.beta(2.0, 2.0, 5000))
        cdf = fitted_cdf(result)
        assert cdf(0.5) == pytest.approx(0.5, abs=0.02)


class TestCurves:
    def test_constant_modulus(self):
        points = mean_log_modulus_curve({1: np.full(10, math.exp(-3.0))})
        assert points[0].value == pytest.approx(3.0)
        assert points[0].samples == 10
        assert points[0].excluded == 0

    def test_mean_is_taken_before_log(self):
        points = mean_log_modulus_curve({2: [0.1, 0.3]})
        assert points[0].value == pytest.approx(-math.log(0.2))

    def test_degenerate_values_excluded(self):
        points = mean_log_modulus_curve({1: [0.5, 0.0, np.nan], 2: [0.0, 0.0]})
        assert len(points) == 1
        assert points[0].excluded == 2

    def test_empty_slice(self):
        with pytest.raises(InvalidArgumentError):
            mean_log_modulus_curve({1: []})

    def test_linear_regression(self):
        result = linear_regression([1, 2, 3, 4], [3.0, 5.0, 7.0, 9.0])
        assert result.slope == pytest.approx(2.0)
        assert result.intercept == pytest.approx(1.0)
        assert result.r_squared == pytest.approx(1.0)

    def test_regression_rejects_constant_x(self):
        with pytest.raises(InvalidArgumentError):
            linear_regression([1, 1, 1], [1.0, 2.0, 3.0])

    def test_log_median_decay(self):
        per_t = {t: np.exp(-0.5 * t) * np.array([0.5, 1.0, 2.0]) for t in (1, 2, 4, 8)}
        series, regression = log_median_decay(per_t)
        assert [t for t, _ in series] == [1, 2, 4, 8]
        assert regression.slope == pytest.approx(-0.5)

    def test_lag1_autocorrelation(self, gen):
        assert abs(lag1_autocorrelation(gen.random(20_000))) < 0.03
        assert lag1_autocorrelation(np.arange(100.0)) > 0.9
