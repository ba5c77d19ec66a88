"""
Closed-form spectral constants.

For a problem (d, tau, theta) the restriction of the estimate to the degree-k
harmonic subspace has the exact constant

    beta_k = pi 2^(2 - tau) Gamma(tau - 1) / Gamma(tau/2)^2
             * Gamma(k + (d - tau)/2) / Gamma(k + (d + tau)/2 - 1)
             * |theta(k (k + d - 2))|^2

and the optimal two-sided constants are inf_k beta_k and sup_k beta_k.
Everything is evaluated in log space through :func:`log_gamma_ratio`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .problem import Problem, ThetaKind, validate_dimension_tau
from .specfun import log_gamma_ratio

ATTAIN_RTOL = 1e-12
DEFAULT_SCAN_CAP = 10**5
TAIL_SETTLE_RTOL = 1e-9
# rounding noise of beta_k relative to its size (sums of logs up to ~100 in magnitude)
MONOTONE_NOISE_RTOL = 1e-13


def mu(k: int, d: int) -> int:
    """Eigenvalue k(k + d - 2) of the spherical Laplacian on S^{d-1}."""
    if k < 0 or d < 2:
        raise DomainError(f"need k >= 0 and d >= 2, got k={k}, d={d}")
    return k * (k + d - 2)


def nu(k: int, d: int) -> float:
    """Bessel order d/2 + k - 1 attached to degree k."""
    if k < 0 or d < 2:
        raise DomainError(f"need k >= 0 and d >= 2, got k={k}, d={d}")
    return d / 2.0 + k - 1.0


def log_prefactor(tau: float) -> float:
    """log of pi 2^(2 - tau) Gamma(tau - 1) / Gamma(tau/2)^2."""
    return (math.log(math.pi) + (2.0 - tau) * math.log(2.0)
            + math.lgamma(tau - 1.0) - 2.0 * math.lgamma(tau / 2.0))


def log_gamma_factor(d: int, tau: float, k, complement: float | None = None):
    """log Gamma(k + (d - tau)/2) - log Gamma(k + (d + tau)/2 - 1), elementwise in k.

    ``complement`` overrides d - tau when tau is within rounding of d.
    """
    k = np.asarray(k, dtype=float)
    comp = d - tau if complement is None else complement
    # the arguments differ by exactly 1 - tau; passing it keeps full precision at large k
    delta = 1.0 - tau if complement is None else complement + 1.0 - d
    return log_gamma_ratio(k + 0.5 * comp, k + 0.5 * (d + tau) - 1.0, delta)


def lambda_k(d: int, tau: float, k: int) -> float:
    """Eigenvalue of S_1^* S_1 on the degree-k subspace.

    (2 pi)^(d+1) 2^(1 - tau) Gamma(tau - 1) Gamma(k + (d - tau)/2)
    / (Gamma(tau/2)^2 Gamma(k + (d + tau)/2 - 1))
    """
    validate_dimension_tau(d, tau)
    if k < 0:
        raise DomainError("k must be nonnegative")
    log_val = ((d + 1) * math.log(2.0 * math.pi) + (1.0 - tau) * math.log(2.0)
               + math.lgamma(tau - 1.0) - 2.0 * math.lgamma(tau / 2.0)
               + log_gamma_factor(d, tau, k))
    return math.exp(log_val)


def beta_values(problem: Problem, ks) -> np.ndarray:
    """beta_k for an array of degrees (vectorised)."""
    ks = np.asarray(ks)
    if np.any(ks < 0):
        raise DomainError("degrees must be nonnegative")
    d, tau = problem.d, problem.tau
    mus = ks * (ks + d - 2.0)
    log_theta2 = problem.theta.log_abs_square(mus)
    with np.errstate(invalid="ignore"):
        log_b = log_prefactor(tau) + log_gamma_factor(d, tau, ks, problem.tau_complement) + log_theta2
    return np.exp(log_b)


def beta_k(problem: Problem, k: int) -> float:
    """Sharp constant on the degree-k harmonic subspace."""
    if k < 0 or int(k) != k:
        raise DomainError(f"degree must be a nonnegative integer, got {k}")
    return float(beta_values(problem, np.array([int(k)]))[0])


def beta_tail_limit(problem: Problem) -> float | None:
    """lim_k beta_k, or None for a custom symbol."""
    kind = problem.theta.kind
    if kind in (ThetaKind.SOBOLEV, ThetaKind.HOMOGENEOUS):
        # the Gamma ratio decays like k^(1 - tau), exactly cancelling |theta(mu_k)|^2
        return math.exp(log_prefactor(problem.tau))
    if kind is ThetaKind.ONE:
        return 0.0
    return None


def beta_zero(d: int, tau: float) -> float:
    """beta_0 written out explicitly (theta(0) = 1)."""
    return (math.pi * 2.0 ** (2.0 - tau) * math.gamma(tau - 1.0) * math.gamma((d - tau) / 2.0)
            / (math.gamma(tau / 2.0) ** 2 * math.gamma((d + tau) / 2.0 - 1.0)))


def beta_one(d: int, tau: float) -> float:
    """beta_1 written out explicitly for theta(rho) = (1 + rho)^((tau - 1)/4)."""
    return (math.pi * 2.0 ** (2.0 - tau) * d ** ((tau - 1.0) / 2.0) * math.gamma(tau - 1.0)
            * math.gamma(1.0 + (d - tau) / 2.0)
            / (math.gamma(tau / 2.0) ** 2 * math.gamma((d + tau) / 2.0)))


class BetaSequence:
    """Lazily materialised k -> beta_k with the tail limit attached."""

    def __init__(self, problem: Problem, scan_cap: int = DEFAULT_SCAN_CAP):
        self.problem = problem
        self.scan_cap = int(scan_cap)
        self.tail_limit = beta_tail_limit(problem)
        self.values: dict[int, float] = {}

    def __getitem__(self, k: int) -> float:
        if k not in self.values:
            self.values[k] = beta_k(self.problem, k)
        return self.values[k]

    def materialize(self, upto: int | None = None) -> np.ndarray:
        upto = self.scan_cap if upto is None else upto
        ks = np.arange(upto + 1)
        vals = beta_values(self.problem, ks)
        self.values.update(zip(ks.tolist(), vals.tolist()))
        return vals


@dataclass
class ScanResult:
    """Extrema of beta_k over k = 0..cap merged with the tail limit."""

    inf: float
    argmin: tuple[int, ...]
    sup: float
    argmax: tuple[int, ...]
    inf_is_tail: bool
    sup_is_tail: bool
    tail_limit: float | None
    scan_cap: int
    tail_gap: float | None = None
    warning: str | None = None
    certified: bool = True
    notes: list[str] = field(default_factory=list)

    @property
    def tail_used(self) -> bool:
        return self.inf_is_tail or self.sup_is_tail


def _attaining(values: np.ndarray, target: float) -> tuple[int, ...]:
    tol = ATTAIN_RTOL * abs(target)
    return tuple(np.flatnonzero(np.abs(values - target) <= tol).tolist())


def _approach_start(values: np.ndarray, limit: float, noise: float) -> int:
    """First index of the final run along which |beta_k - limit| never grows (up to noise)."""
    dist = np.abs(values - limit)
    grows = np.flatnonzero(dist[1:] > dist[:-1] + noise)
    return int(grows[-1]) + 1 if grows.size else 0


def default_scan_cap(problem: Problem, scan_cap: int = DEFAULT_SCAN_CAP) -> int:
    """Enlarge ``scan_cap`` past the last possible turning point of beta_k."""
    if problem.theta.kind is ThetaKind.SOBOLEV and problem.d >= 5:
        from .regimes import k_stationary

        k_turn = k_stationary(problem.d, problem.tau, ThetaKind.SOBOLEV)
        if k_turn is not None and math.isfinite(k_turn):
            scan_cap = max(scan_cap, int(4 * k_turn) + 16)
    return scan_cap


def scan_extrema(problem: Problem, scan_cap: int = DEFAULT_SCAN_CAP) -> ScanResult:
    """Brute-force inf/sup of beta_k, k <= scan_cap, together with the tail limit.

    The scanned values end in a run moving monotonically towards the limit.
    Degrees on that run approach the limit without reaching it, so an
    extremum equal to the limit (to relative 1e-12) is attained only by
    degrees before the run; if there are none the index set is empty.  A
    run lying on the limit to rounding counts as attaining throughout.  A
    warning is raised when the run is shorter than 64 degrees and still
    far from the limit, since the merge with the tail is then unjustified.
    """
    if scan_cap < 1:
        raise DomainError("scan_cap must be at least 1")
    scan_cap = default_scan_cap(problem, scan_cap)
    vals = beta_values(problem, np.arange(scan_cap + 1))
    limit = beta_tail_limit(problem)
    finite_min, finite_max = float(vals.min()), float(vals.max())

    if limit is None:
        inf, sup = finite_min, finite_max
        argmin, argmax = _attaining(vals, inf), _attaining(vals, sup)
        return ScanResult(inf, argmin, sup, argmax, False, False, None, scan_cap, None, None, False,
                          ["custom symbol: extrema over the finite scan only"])

    noise = MONOTONE_NOISE_RTOL * max(abs(limit), finite_max)
    start = _approach_start(vals, limit, noise)
    gap = abs(vals[-1] - limit) / max(abs(limit), finite_max)
    warning = None
    if scan_cap + 1 - start < 64 and gap > TAIL_SETTLE_RTOL:
        warning = "tail not monotone towards its limit at the scan cap"

    # degrees on the final approach run only tend to the limit and earlier ones can tie with
    # it, unless the run sits on the limit to rounding (beta_k constant)
    flat_run = bool(np.all(np.abs(vals[start:] - limit) <= noise))
    early = vals if flat_run else vals[:start]
    tol = ATTAIN_RTOL * abs(limit)
    if finite_min < limit - tol:
        inf, argmin, inf_is_tail = finite_min, _attaining(vals, finite_min), False
    else:
        inf = limit
        argmin = tuple(np.flatnonzero(np.abs(early - limit) <= tol).tolist())
        inf_is_tail = not argmin
    if finite_max > limit + tol:
        sup, argmax, sup_is_tail = finite_max, _attaining(vals, finite_max), False
    else:
        sup = limit
        argmax = tuple(np.flatnonzero(np.abs(early - limit) <= tol).tolist())
        sup_is_tail = not argmax
    certified, notes = True, []
    return ScanResult(inf, argmin, sup, argmax, inf_is_tail, sup_is_tail, limit, scan_cap,
                      gap, warning, certified, notes)
