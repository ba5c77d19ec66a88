import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sharpsmooth.errors import DomainError
from sharpsmooth.problem import AngularSymbol, Dispersion, GeneralWeightProblem, Problem, RadialWeight, Smoother
from sharpsmooth.verify import (Component, GridProfile, IndicatorProfile, SpectralDatum,
                                VerificationReport, bessel_weight_closed_form, bessel_weight_integral,
                                funk_hecke_check, funk_hecke_reduction, lambda_grid, orthogonality_check,
                                random_geometry, simulate_direct_time, simulate_norm_ratio,
                                sphere_quadrature, verify_lambda, zonal_gram)


def test_report_rel_error():
    assert VerificationReport("x", 1.1, 1.0, 0.2).passed
    assert VerificationReport("x", 1e-9, 0.0, 1e-8).rel_error == 1e-9
    assert not VerificationReport("x", 1.0, None, 1.0).passed


def test_lambda_grid_size():
    grid = lambda_grid()
    assert len(grid) >= 40 and all(1 < tau < d for d, tau, _ in grid)


@pytest.mark.parametrize("d,tau,k", [(2, 1.5, 0), (3, 2.5, 5), (6, 2.0, 2)])
def test_verify_lambda_cases(d, tau, k):
    assert verify_lambda(d, tau, k).rel_error <= 1e-10


@given(st.floats(0.6, 6.0), st.floats(1.1, 2.9))
@settings(max_examples=25, deadline=None)
def test_bessel_weight_integral_scaling(nu_, tau):
    # substitution x = r rho gives a factor rho^(tau - 2)
    rho = 2.0
    assert bessel_weight_integral(nu_, tau, rho) == pytest.approx(
        bessel_weight_closed_form(nu_, tau, 1.0) * rho ** (tau - 2), rel=1e-7)


def test_simulate_theta_one_d3():
    rep = simulate_norm_ratio(Problem.standard(3, 2.0, "one"))
    assert rep.computed == pytest.approx(2 * math.pi, rel=1e-8)


def test_simulate_non_canonical_smoother():
    p = Problem(4, 2.0, AngularSymbol.sobolev(2.0), Dispersion.schrodinger(), Smoother.power(0.3))
    rep = simulate_norm_ratio(p, SpectralDatum(1))
    assert rep.diagnostics["reference_kind"] == "beta_k * <zeta>" and rep.passed


def test_simulate_indicator_weight():
    gp = GeneralWeightProblem(3, RadialWeight.indicator(2.0), AngularSymbol.one())
    rep = simulate_norm_ratio(gp, SpectralDatum(1, IndicatorProfile(0.5, 1.5)))
    assert rep.diagnostics["reference_kind"] == "indicator closed form"
    assert rep.rel_error <= 1e-6


def test_grid_profile_datum():
    prof = GridProfile((0.5, 1.0, 1.5), (0.0, 1.0, 0.0))
    rep = simulate_norm_ratio(Problem.standard(4, 2.0), SpectralDatum(2, prof))
    assert rep.computed == pytest.approx(math.pi, rel=1e-6)


def test_profile_validation():
    with pytest.raises(DomainError):
        IndicatorProfile(2.0, 1.0)
    with pytest.raises(DomainError):
        SpectralDatum(-1)
    with pytest.raises(DomainError):
        GridProfile((1.0, 0.5), (0.0, 1.0))


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_sphere_quadrature_area_and_moments(d):
    nodes, w = sphere_quadrature(d, 20)
    area = 2 * math.pi ** (d / 2) / math.gamma(d / 2)
    assert np.sum(w) == pytest.approx(area, rel=1e-12)
    assert np.allclose(np.linalg.norm(nodes, axis=1), 1.0)
    assert np.sum(w * nodes[:, 0] ** 2) == pytest.approx(area / d, rel=1e-12)


@pytest.mark.parametrize("d", [2, 3, 5])
@pytest.mark.parametrize("k", [0, 2, 3])
def test_funk_hecke_other_dimensions(d, k):
    rng = np.random.default_rng(7)
    radius, x, o = random_geometry(d, rng)
    assert funk_hecke_check(d, k, radius, x, o).passed


def test_funk_hecke_reduction_k0_d3():
    # int_{S^2} e^{-i R w.x} dw = 4 pi sin(R)/R
    assert funk_hecke_reduction(3, 0, 2.0, 1.0).real == pytest.approx(4 * math.pi * math.sin(2) / 2, rel=1e-12)


def test_funk_hecke_bad_vectors():
    with pytest.raises(DomainError):
        funk_hecke_check(3, 1, 1.0, [1, 0], [0, 0, 1])


@pytest.mark.parametrize("d", [2, 3, 4, 6])
def test_zonal_gram_identity(d):
    assert np.allclose(zonal_gram(d, [0, 1, 2, 3]), np.eye(4), atol=1e-12)


def test_orthogonality_l2_two_degrees():
    p = Problem.standard(3, 2.0)
    comps = [Component(SpectralDatum(0), 1.0), Component(SpectralDatum(1), math.sqrt(3))]
    rep = orthogonality_check(p, comps, n_nodes=24)
    assert rep.passed and rep.diagnostics["cross_terms_skipped"] == 1


def test_orthogonality_rejects_duplicates_and_bad_norm():
    p = Problem.standard(3, 2.0)
    with pytest.raises(DomainError):
        orthogonality_check(p, [Component(SpectralDatum(0)), Component(SpectralDatum(0))])
    with pytest.raises(DomainError):
        orthogonality_check(p, [Component(SpectralDatum(0))], norm="h1")


def test_orthogonality_rejects_overlapping_kinds():
    p = Problem(3, 2.0, AngularSymbol.sobolev(2.0), Dispersion.half_wave(1))
    comps = [Component(SpectralDatum(0), 1.0, Dispersion.half_wave(1)),
             Component(SpectralDatum(0), 1.0, Dispersion.klein_gordon(1))]
    with pytest.raises(DomainError):
        orthogonality_check(p, comps, n_nodes=8)


def test_direct_time_rejects_non_schrodinger():
    p = Problem(4, 2.0, AngularSymbol.sobolev(2.0), Dispersion.half_wave(1))
    with pytest.raises(DomainError):
        simulate_direct_time(p)
