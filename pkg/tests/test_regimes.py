import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sharpsmooth.beta_core import beta_k, beta_tail_limit, beta_values, scan_extrema
from sharpsmooth.errors import DomainError
from sharpsmooth.problem import Problem
from sharpsmooth.regimes import (IndexSet, RegimeLabel, classify, eta, h_derivative_coeffs, h_ratio,
                                 induction_margin, k_star, k_upper_bound_d5, solve_k_of_tau,
                                 solve_tau_star, solve_tau_upper_star, tau_b0_root)

# mpmath findroot at 40 digits on the defining equations
TAU_STAR = {5: 4.572820390250812978665, 6: 5.874717336629049756631}
TAU_UPPER = {5: 4.610695983957836682774, 6: 5.913121552790093206234}


@pytest.mark.parametrize("d", [5, 6])
def test_thresholds_match_oracle(d):
    assert solve_tau_star(d).value == pytest.approx(TAU_STAR[d], rel=1e-14)
    assert solve_tau_upper_star(d).value == pytest.approx(TAU_UPPER[d], rel=1e-14)


@pytest.mark.parametrize("d", range(5, 21))
def test_threshold_complements_consistent(d):
    lo, hi = solve_tau_star(d), solve_tau_upper_star(d)
    assert 0 < hi.complement <= lo.complement
    assert d - lo.complement == pytest.approx(lo.value, abs=4 * math.ulp(d))


def test_thresholds_reject_small_d():
    with pytest.raises(DomainError):
        solve_tau_star(4)
    with pytest.raises(DomainError):
        solve_tau_upper_star(3)


@given(st.integers(2, 12), st.floats(0.02, 0.98), st.integers(0, 300))
@settings(max_examples=200, deadline=None)
def test_h_ratio_equals_consecutive_quotient(d, frac, k):
    tau = 1 + frac * (d - 1)
    p = Problem.standard(d, tau)
    vals = beta_values(p, np.array([k, k + 1]))
    assert h_ratio(d, tau, k) == pytest.approx(vals[1] / vals[0], rel=1e-11)


@given(st.integers(3, 12), st.floats(0.02, 0.98), st.floats(0.1, 50.0))
@settings(max_examples=150, deadline=None)
def test_derivative_factorisation(d, frac, k):
    tau = 1 + frac * (d - 1)
    for kind in ("sobolev", "homogeneous"):
        coeffs = h_derivative_coeffs(d, tau, kind)
        step = 1e-5 * max(k, 1.0)
        numeric = (h_ratio(d, tau, k + step, kind) - h_ratio(d, tau, k - step, kind)) / (2 * step)
        # central differences carry ~1e-11 rounding noise since h is O(1)
        assert abs(coeffs.dh_dk(k) - numeric) <= 1e-5 * abs(numeric) + 1e-9
        assert coeffs.B1 == pytest.approx((d - 1) * coeffs.B2)


def test_homogeneous_h_at_zero_undefined():
    with pytest.raises(DomainError):
        h_ratio(5, 2.0, 0, "homogeneous")


@pytest.mark.parametrize("d", [5, 6, 9])
def test_k_of_tau_residual_and_range(d):
    lo = solve_tau_star(d)
    for comp in np.geomspace(lo.complement * 0.9, lo.complement * 1e-3, 5):
        sol = solve_k_of_tau(d, d - comp, comp)
        assert abs(sol.residual) <= 1e-10
        if d >= 6:
            assert 0 < sol.value < 1


def test_k_of_tau_below_threshold_errors():
    with pytest.raises(DomainError):
        solve_k_of_tau(5, 4.0)


@pytest.mark.parametrize("tau", [4.6, 4.8, 4.95, 4.999])
def test_d5_upper_bound(tau):
    assert solve_k_of_tau(5, tau).value <= k_upper_bound_d5(tau)


def test_k_star_integer_root_at_tau_star():
    ks = k_star(6, solve_tau_star(6).value, solve_tau_star(6).complement)
    assert ks.integer_root and ks.value == 0


def test_b0_root_and_eta():
    for d in (5, 6, 10):
        assert d - tau_b0_root(d) == pytest.approx(eta(d), rel=1e-10)
        assert h_derivative_coeffs(d, tau_b0_root(d)).B0 == pytest.approx(0.0, abs=1e-8 * d**4)


@pytest.mark.parametrize("d", [6, 7, 10, 20])
def test_induction_margin_positive(d):
    assert induction_margin(d) > 0


def test_index_set():
    s = IndexSet.of([2, 1])
    assert 1 in s and 3 not in s and str(s) == "{1, 2}"
    assert s.to_json() == [1, 2]
    assert IndexSet.all().to_json() == "N0" and 10**9 in IndexSet.all()
    assert not IndexSet() and str(IndexSet()) == "empty"
    assert IndexSet.all().restrict(3) == (0, 1, 2, 3)


def test_classify_examples():
    r = classify(6, 5.5)
    assert r.regime_label is RegimeLabel.BELOW_TAU_STAR
    assert r.kmin_set.to_json() == [0] and r.kmax_set.to_json() == []
    r = classify(6, 5.95)
    assert r.kmin_set.to_json() == [1] and r.kmax_set.to_json() == [0]
    r = classify(4, 2.0)
    assert r.regime_label is RegimeLabel.D4_CRITICAL and r.b == r.B == math.pi


def test_classify_homogeneous_degenerate():
    r = classify(5, 2.0, "homogeneous")
    assert r.b == 0.0 and r.B == pytest.approx(beta_tail_limit(Problem.standard(5, 2.0, "homogeneous")))
    assert "degenerate: zero constant" in r.flags and not r.kmax_set


def test_classify_theta_one():
    r = classify(3, 2.0, "one")
    assert r.B == pytest.approx(2 * math.pi) and r.b == 0.0
    assert r.kmax_set.to_json() == [0] and not r.kmin_set


def test_classify_rejects_custom():
    with pytest.raises(DomainError):
        classify(4, 2.0, "custom")


@given(st.integers(2, 9), st.floats(0.02, 0.98))
@settings(max_examples=40, deadline=None)
def test_classify_matches_scan(d, frac):
    tau = 1 + frac * (d - 1)
    r = classify(d, tau)
    scan = scan_extrema(Problem.standard(d, tau), scan_cap=2000)
    assert r.certified
    assert r.b == pytest.approx(scan.inf, rel=1e-9)
    assert r.B == pytest.approx(scan.sup, rel=1e-9)
    assert r.kmin_set.restrict(scan.scan_cap) == scan.argmin
    assert r.kmax_set.restrict(scan.scan_cap) == scan.argmax


@given(st.integers(5, 12), st.floats(0.0, 1.0))
@settings(max_examples=40, deadline=None)
def test_b_at_most_B(d, frac):
    tau = 1.01 + frac * (d - 1.02)
    r = classify(d, tau)
    assert 0 < r.b <= r.B
    assert beta_k(Problem.standard(d, tau), 0) <= r.B * (1 + 1e-12)
