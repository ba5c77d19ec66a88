import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from sharpsmooth.errors import DomainError
from sharpsmooth.specfun import (BesselProduct, LegendreDim, QuadratureSpec, bessel_j,
                                 bessel_square_power_integral, digamma, gamma_ratio, gauss_legendre,
                                 harmonic_dimension, integrate_semiinfinite, legendre_poly, log_gamma,
                                 log_gamma_ratio, sphere_area, wynn_epsilon)


@given(st.floats(0.05, 300.0), st.floats(0.05, 300.0))
@settings(max_examples=200, deadline=None)
def test_log_gamma_ratio_matches_mpmath(a, b):
    expected = float(mp.loggamma(a) - mp.loggamma(b))
    assert log_gamma_ratio(a, b) == pytest.approx(expected, rel=1e-12, abs=1e-12)


def test_log_gamma_ratio_large_arguments_keep_digits():
    # oracle: mpmath at 40 digits
    assert log_gamma_ratio(123.4, 125.9) == pytest.approx(-12.053690798309619397, rel=1e-14)
    a = 1e6 + 0.25
    with mp.workdps(40):
        expected = float(mp.loggamma(mp.mpf(a)) - mp.loggamma(mp.mpf(a) + mp.mpf("1.5")))
    assert log_gamma_ratio(a, a + 1.5) == pytest.approx(expected, rel=1e-13)


def test_log_gamma_ratio_is_vectorised():
    a = np.array([1.0, 2.5, 40.0])
    out = log_gamma_ratio(a, a + 1)
    assert out == pytest.approx(-np.log(a), rel=1e-13)


def test_gamma_ratio_and_log_gamma():
    assert gamma_ratio(0.5, 1.5) == pytest.approx(2.0, rel=1e-14)
    assert log_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-14)


def test_digamma_values():
    assert digamma(1.0) == pytest.approx(-0.5772156649015329, rel=1e-14)
    assert digamma(3.7) == pytest.approx(1.1671535393615113859, rel=1e-13)


@given(st.floats(0.1, 50.0))
@settings(max_examples=100, deadline=None)
def test_digamma_recurrence(x):
    assert digamma(x + 1) == pytest.approx(digamma(x) + 1 / x, rel=1e-11, abs=1e-11)


def test_sphere_area():
    assert sphere_area(1) == pytest.approx(2 * math.pi)
    assert sphere_area(2) == pytest.approx(4 * math.pi)
    assert sphere_area(3) == pytest.approx(2 * math.pi**2)


@pytest.mark.parametrize("k", range(6))
def test_harmonic_dimension(k):
    assert harmonic_dimension(k, 3) == 2 * k + 1
    assert harmonic_dimension(k, 4) == (k + 1) ** 2
    assert harmonic_dimension(k, 2) == (1 if k == 0 else 2)


@pytest.mark.parametrize("d", [2, 3, 4, 7])
@pytest.mark.parametrize("k", [0, 1, 2, 5])
def test_legendre_poly_normalised_at_one(d, k):
    assert legendre_poly(LegendreDim(k, d), 1.0) == pytest.approx(1.0, rel=1e-13)


def test_legendre_poly_classical_cases():
    s = np.linspace(-1, 1, 11)
    assert legendre_poly(LegendreDim(4, 3), s) == pytest.approx(special.eval_legendre(4, s), abs=1e-14)
    assert legendre_poly(LegendreDim(3, 2), s) == pytest.approx(np.cos(3 * np.arccos(s)), abs=1e-14)


def test_legendre_poly_rejects_bad_input():
    with pytest.raises(DomainError):
        LegendreDim(-1, 3)


def test_bessel_j_matches_scipy():
    x = np.linspace(0.1, 50, 40)
    assert bessel_j(2.5, x) == pytest.approx(special.jv(2.5, x), abs=1e-14)


def test_bessel_square_power_integral_oracle():
    # int_0^inf J_{5/2}(r)^2 r^{-3/2} dr, Weber-Schafheitlin closed form at 30 digits
    assert bessel_square_power_integral(2.5, 2.5) == pytest.approx(0.0976951659822954609, rel=1e-8)


def test_bessel_product_splits_consistently():
    prod = BesselProduct(1.0, 2.0, lambda x: np.exp(-x))
    x = np.linspace(0.5, 60, 30)
    assert prod(x) == pytest.approx(special.jv(1, x) * special.jv(2, x) * np.exp(-x), abs=1e-12)


def test_integrate_semiinfinite_oscillatory():
    # int_0^inf sin(x)/x dx = pi/2
    f = lambda x: np.sinc(np.asarray(x) / np.pi)  # noqa: E731
    assert integrate_semiinfinite(f) == pytest.approx(math.pi / 2, rel=1e-7)


def test_wynn_epsilon_accelerates_alternating_series():
    partial = np.cumsum([(-1) ** n / (n + 1) for n in range(20)])
    assert wynn_epsilon(partial) == pytest.approx(math.log(2), rel=1e-9)


@pytest.mark.parametrize("n", [4, 10])
def test_gauss_legendre_exact_for_polynomials(n):
    x, w = gauss_legendre(0.0, 2.0, n)
    assert np.sum(w * x ** (2 * n - 1)) == pytest.approx(2.0 ** (2 * n) / (2 * n), rel=1e-13)


def test_quadrature_spec_from_env(monkeypatch):
    monkeypatch.setenv("SHARPSMOOTH_QUAD_REL_TOL", "1e-10")
    monkeypatch.setenv("SHARPSMOOTH_QUAD_MAX_SUBDIVISIONS", "50")
    spec = QuadratureSpec.from_env()
    assert spec.rel_tol == 1e-10
    assert spec.max_subdivisions == 50


def test_quadrature_spec_validation():
    with pytest.raises(DomainError):
        QuadratureSpec(rel_tol=-1.0)


def test_log_gamma_ratio_exact_shift_at_large_arguments():
    # a = k + 0.4 is not representable; the exact difference restores full accuracy
    k = 96791
    with mp.workdps(40):
        expected = float(mp.loggamma(k + mp.mpf(2 - 1.2) / 2) - mp.loggamma(k + mp.mpf(2 + 1.2) / 2 - 1))
    got = log_gamma_ratio(k + 0.4, k + 0.6, 1.0 - 1.2)
    assert got == pytest.approx(expected, abs=2e-14)
