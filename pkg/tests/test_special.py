"""
Tests des fonctions spéciales
"""

import math

import mpmath
import numpy as np
import pytest
from scipy import special as sp

from app.core.exceptions import InvalidParameterError
from app.utils.special import digamma, lgamma, log_beta, reg_inc_beta, reg_inc_gamma, trigamma


class TestGammaFamily:
    def test_lgamma_integer(self):
        assert lgamma(5.0) == pytest.approx(math.log(24.0), rel=1e-14)

    def test_lgamma_matches_scipy(self):
        x = np.array([1e-3, 0.1, 0.5, 1.0, 2.5, 17.0, 250.0])
        np.testing.assert_allclose(lgamma(x), sp.gammaln(x), rtol=1e-13, atol=1e-14)

    def test_log_beta(self):
        assert log_beta(2.0, 3.0) == pytest.approx(math.log(1.0 / 12.0), rel=1e-13)

    def test_digamma_one(self):
        assert digamma(1.0) == pytest.approx(-0.5772156649015329, rel=1e-12)

    def test_trigamma_one(self):
        assert trigamma(1.0) == pytest.approx(math.pi**2 / 6.0, rel=1e-12)

    def test_digamma_trigamma_match_scipy(self):
        x = np.array([0.01, 0.3, 1.7, 9.9, 10.1, 500.0])
        np.testing.assert_allclose(digamma(x), sp.digamma(x), rtol=1e-12, atol=1e-13)
        np.testing.assert_allclose(trigamma(x), sp.polygamma(1, x), rtol=1e-12)

    def test_scalar_in_float_out(self):
        assert isinstance(lgamma(3.0), float)
        assert isinstance(reg_inc_beta(0.3, 2.0, 2.0), float)

    @pytest.mark.parametrize("func", [lgamma, digamma, trigamma])
    def test_non_positive_argument(self, func):
        with pytest.raises(InvalidParameterError):
            func(0.0)


class TestIncompleteGamma:
    @pytest.mark.parametrize("a", [0.3, 1.0, 2.0, 7.5, 120.0])
    def test_matches_scipy(self, a):
        x = np.array([0.0, 1e-4, 0.5, 1.0, a, 2 * a + 3.0, 400.0])
        np.testing.assert_allclose(reg_inc_gamma(x, a), sp.gammainc(a, x), rtol=1e-10, atol=1e-13)

    def test_exponential_case(self):
        assert reg_inc_gamma(2.0, 1.0) == pytest.approx(1.0 - math.exp(-2.0), rel=1e-13)

    def test_domain(self):
        with pytest.raises(InvalidParameterError):
            reg_inc_gamma(1.0, 0.0)
        with pytest.raises(InvalidParameterError):
            reg_inc_gamma(-1.0, 2.0)


class TestIncompleteBeta:
    @pytest.mark.parametrize("p", [0.5, 1.0, 3.0, 40.0])
    def test_symmetric_midpoint(self, p):
        assert reg_inc_beta(0.5, p, p) == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("p,q", [(0.2, 0.7), (1.0, 1.0), (2.0, 5.0), (10.0, 90.0), (200.0, 3.0)])
    def test_matches_scipy(self, p, q):
        x = np.linspace(0.0, 1.0, 41)
        np.testing.assert_allclose(reg_inc_beta(x, p, q), sp.betainc(p, q, x), rtol=1e-10, atol=1e-13)

    def test_endpoints(self):
        assert reg_inc_beta(0.0, 2.0, 3.0) == 0.0
        assert reg_inc_beta(1.0, 2.0, 3.0) == 1.0

    def test_uniform_is_identity(self):
        x = np.array([0.1, 0.25, 0.9])
        np.testing.assert_allclose(reg_inc_beta(x, 1.0, 1.0), x, rtol=1e-12)

    def test_domain(self):
        with pytest.raises(InvalidParameterError):
            reg_inc_beta(0.5, 0.0, 1.0)
        with pytest.raises(InvalidParameterError):
            reg_inc_beta(1.5, 1.0, 1.0)


class TestHighPrecisionOracle:
    """Comparaison à mpmath (50 chiffres) pour des paramètres élevés"""

    @pytest.mark.parametrize("x,p,q", [(0.37, 50.0, 70.0), (0.02, 0.3, 12.0), (0.999, 4.0, 0.6)])
    def test_incomplete_beta(self, x, p, q):
        with mpmath.workdps(50):
            expected = float(mpmath.betainc(p, q, 0, x, regularized=True))
        assert reg_inc_beta(x, p, q) == pytest.approx(expected, rel=1e-9)

    @pytest.mark.parametrize("x,a", [(120.0, 100.0), (0.5, 0.05), (30.0, 31.0)])
    def test_incomplete_gamma(self, x, a):
        with mpmath.workdps(50):
            expected = float(mpmath.gammainc(a, 0, x, regularized=True))
        assert reg_inc_gamma(x, a) == pytest.approx(expected, rel=1e-9)
