"""
Monotonicity analysis of beta_k and the classification of the optimal constants.

The successive ratio h(k, tau) = beta_{k+1} / beta_k has a k-derivative of the
form -A (B0 + B1 k + B2 k^2) with A > 0, so the shape of (beta_k) is decided
by the sign of a quadratic in k.  For d >= 5 this leads to the thresholds
tau_* (where beta_1 overtakes beta_0) and tau^* (where beta_0 meets the tail
limit) and to the crossing point k(tau) of h(., tau) = 1.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable

import numpy as np
from scipy import special

from .beta_core import beta_k, beta_tail_limit
from .errors import BracketError, DomainError, NonConvergenceError
from .problem import Problem, ThetaKind, validate_dimension_tau

TIE_TOL = 1e-11
INTEGER_ROOT_TOL = 1e-9


def _kind(theta_kind) -> ThetaKind:
    kind = ThetaKind(theta_kind)
    if kind not in (ThetaKind.SOBOLEV, ThetaKind.HOMOGENEOUS, ThetaKind.ONE):
        raise DomainError(f"no closed-form analysis for theta kind {kind.value!r}")
    return kind


# ---------------------------------------------------------------------------
# ratio function and its derivative
# ---------------------------------------------------------------------------

def _shift(kind: ThetaKind) -> float:
    # theta^2 is a power of (shift + mu_k)
    return 1.0 if kind is ThetaKind.SOBOLEV else 0.0


def log_h_ratio(d: int, tau: float, k, theta_kind=ThetaKind.SOBOLEV, complement: float | None = None):
    """log h(k, tau), accurate when h is close to one; ``k`` may be real.

    ``complement`` overrides d - tau (see :class:`~sharpsmooth.problem.Problem`).
    """
    kind = _kind(theta_kind)
    k = np.asarray(k, dtype=float)
    comp = d - tau if complement is None else complement
    log_gamma_part = np.log(2 * k + comp) - np.log(2 * k + d + tau - 2)
    if kind is ThetaKind.ONE:
        return log_gamma_part
    base = _shift(kind) + k * (k + d - 2)
    # (c + (k+1)(k+d-1)) / (c + k(k+d-2)) = 1 + (2k + d - 1) / base
    return log_gamma_part + 0.5 * (tau - 1) * np.log1p((2 * k + d - 1) / base)


def h_ratio(d: int, tau: float, k, theta_kind=ThetaKind.SOBOLEV, complement: float | None = None):
    """h(k, tau) = beta_{k+1} / beta_k in closed form.

    Raises
    ------
    DomainError
        For the homogeneous symbol at k = 0, where beta_0 = 0.
    """
    validate_dimension_tau(d, tau, complement)
    kind = _kind(theta_kind)
    k_arr = np.asarray(k, dtype=float)
    if np.any(k_arr < 0):
        raise DomainError("k must be nonnegative")
    if kind is ThetaKind.HOMOGENEOUS and np.any(k_arr <= 0):
        raise DomainError("h(0, tau) is undefined for the homogeneous symbol (beta_0 = 0)")
    out = np.exp(log_h_ratio(d, tau, k_arr, kind, complement))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class RatioCoefficients:
    """dh/dk = -A(k) (B0 + B1 k + B2 k^2)."""

    d: int
    tau: float
    B0: float
    B1: float
    B2: float
    theta_kind: ThetaKind

    def A(self, k):
        k = np.asarray(k, dtype=float)
        d, tau = self.d, self.tau
        c = _shift(self.theta_kind)
        base = c + k * (k + d - 2)
        nxt = c + (k + 1) * (k + d - 1)
        return (tau - 1) / (2 * (2 * k + d + tau - 2) ** 2 * base**2) * (nxt / base) ** ((tau - 3) / 2)

    def quadratic(self, k):
        k = np.asarray(k, dtype=float)
        return self.B0 + self.B1 * k + self.B2 * k**2

    def dh_dk(self, k):
        return -self.A(k) * self.quadratic(k)

    def positive_root(self) -> float | None:
        """The root of the quadratic on (0, inf), if there is exactly one."""
        B0, B1, B2 = self.B0, self.B1, self.B2
        if B2 == 0.0:
            return -B0 / B1 if B1 != 0.0 and -B0 / B1 > 0 else None
        disc = B1 * B1 - 4 * B0 * B2
        if disc < 0:
            return None
        sq = math.sqrt(disc)
        roots = sorted(r for r in ((-B1 + sq) / (2 * B2), (-B1 - sq) / (2 * B2)) if r > 0)
        return roots[0] if len(roots) == 1 else None


def h_derivative_coeffs(d: int, tau: float, theta_kind=ThetaKind.SOBOLEV) -> RatioCoefficients:
    validate_dimension_tau(d, tau)
    kind = ThetaKind(theta_kind)
    q = tau * (2 - tau)
    if kind is ThetaKind.SOBOLEV:
        B2 = 2 * (q + 3 * d * (d - 4))
        B0 = d * ((d - 3) * q + (d - 4) * (d * d - d + 2))
    elif kind is ThetaKind.HOMOGENEOUS:
        B2 = 2 * (3 * (d - 2) ** 2 + q)
        B0 = (d - 1) * (d - 2) * (d - 2 + tau) * (d - tau)
    else:
        raise DomainError(f"no derivative factorisation for theta kind {kind.value!r}")
    return RatioCoefficients(d, tau, float(B0), float((d - 1) * B2), float(B2), kind)


# ---------------------------------------------------------------------------
# root finding
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThresholdSolution:
    """Root of a defining equation.

    ``complement`` is d - value computed without cancellation (thresholds
    approach d very fast as d grows); None for k(tau).
    """

    value: float
    residual: float
    bracket: tuple[float, float]
    iterations: int
    complement: float | None = None


def bracketed_root(f: Callable[[float], float], lo: float, hi: float, *,
                   coarse: float = 1e-6, xtol: float = 1e-15, max_iter: int = 200
                   ) -> tuple[float, int, tuple[float, float]]:
    """Root of ``f`` in [lo, hi]: bisection down to ``coarse``, then safeguarded secant.

    Returns the root, the iteration count and the final bracket.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo, 0, (lo, hi)
    if fhi == 0.0:
        return hi, 0, (lo, hi)
    if np.sign(flo) == np.sign(fhi):
        raise BracketError(f"no sign change on [{lo}, {hi}]: f = {flo}, {fhi}")
    a0, b0 = lo, hi
    it = 0
    while hi - lo > coarse * max(1.0, abs(lo)) and it < max_iter:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        it += 1
        if fm == 0.0:
            return mid, it, (a0, b0)
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    # secant on the bracket, falling back to bisection if a step escapes it
    x0, f0, x1, f1 = lo, flo, hi, fhi
    while it < max_iter:
        it += 1
        x = x1 - f1 * (x1 - x0) / (f1 - f0) if f1 != f0 else 0.5 * (lo + hi)
        if not lo < x < hi:
            x = 0.5 * (lo + hi)
        fx = f(x)
        if fx == 0.0 or abs(x - x1) <= xtol * max(1.0, abs(x)):
            return x, it, (a0, b0)
        if np.sign(fx) == np.sign(flo):
            lo, flo = x, fx
        else:
            hi, fhi = x, fx
        x0, f0, x1, f1 = x1, f1, x, fx
        if hi - lo <= xtol * max(1.0, abs(lo)):
            return x, it, (a0, b0)
    raise NonConvergenceError("bracketed root did not converge", last=x1, previous=x0)


def _require_d5(d: int) -> None:
    if int(d) != d or d < 5:
        raise DomainError(f"threshold defined for integer d >= 5, got {d}")


def tau_star_equation(d: int, tau: float) -> tuple[float, float]:
    """Both sides d^((tau-1)/2) (d - tau)/2 and (d + tau)/2 - 1."""
    return d ** ((tau - 1) / 2) * (d - tau) / 2, (d + tau) / 2 - 1


def _log_tau_star_ratio(d: int, eta_: float) -> float:
    """log(lhs / rhs) of the tau_* equation written in eta = d - tau."""
    return 0.5 * (d - 1 - eta_) * math.log(d) + math.log(eta_) - math.log(2 * d - 2 - eta_)


@lru_cache(maxsize=None)
def solve_tau_star(d: int) -> ThresholdSolution:
    """tau_*(d): the nontrivial root of d^((tau-1)/2) (d - tau)/2 = (d + tau)/2 - 1.

    tau = 1 always solves the equation; the log of lhs/rhs rises from 0 to a
    single peak and then falls to -inf at tau = d, so the wanted root is
    bracketed by (peak, d).  The search runs over log(d - tau) because d - tau_*
    shrinks roughly like d^(-d/2).  The residual is lhs/rhs - 1.
    """
    _require_d5(d)
    peak = 1 + math.sqrt((d - 1) ** 2 - 4 * (d - 1) / math.log(d))
    s_root, it, _ = bracketed_root(lambda s: _log_tau_star_ratio(d, math.exp(s)),
                                   math.log(1e-300), math.log(d - peak))
    comp = math.exp(s_root)
    residual = math.expm1(_log_tau_star_ratio(d, comp))
    return ThresholdSolution(d - comp, residual, (peak, float(d)), it, comp)


def log_upsilon(d: int, t: float) -> float:
    """log Gamma(t) - log Gamma(d - 1 - t)."""
    return math.lgamma(t) - math.lgamma(d - 1 - t)


@lru_cache(maxsize=None)
def solve_tau_upper_star(d: int) -> ThresholdSolution:
    """tau^*(d) = d - 2 t^*, where Gamma(t^*) = Gamma(d - 1 - t^*) and t^* < (d - 1)/2.

    log Upsilon is convex on (0, (d-1)/2), infinite at 0 and zero at the
    trivial root (d-1)/2; the wanted root lies left of its minimiser.  t^*
    is roughly 1/(d-2)!, so the search runs over log t.  The residual is
    log Upsilon(t^*).
    """
    _require_d5(d)
    half = (d - 1) / 2
    t_min, _, _ = bracketed_root(lambda t: float(special.digamma(t) + special.digamma(d - 1 - t)),
                                 1e-300, half)
    s_root, it, _ = bracketed_root(lambda s: log_upsilon(d, math.exp(s)),
                                   math.log(1e-300), math.log(t_min))
    t_root = math.exp(s_root)
    return ThresholdSolution(d - 2 * t_root, log_upsilon(d, t_root), (d - 2 * t_min, float(d)), it,
                             2 * t_root)


# ---------------------------------------------------------------------------
# crossing point k(tau)
# ---------------------------------------------------------------------------

def k_stationary(d: int, tau: float, theta_kind=ThetaKind.SOBOLEV) -> float | None:
    """Positive stationary point of h(., tau), where it is maximal (d >= 5)."""
    return h_derivative_coeffs(d, tau, theta_kind).positive_root()


def k_upper_bound_d5(tau: float) -> float:
    """Explicit upper bound on k(tau) for d = 5."""
    validate_dimension_tau(5, tau)
    return -2 + math.sqrt((5 - tau * (2 - tau)) / ((5 - tau) * (3 + tau)))


def tau_offset(d: int, tau: float, threshold: ThresholdSolution,
               complement: float | None = None) -> float:
    """tau - threshold, computed from the complements d - tau."""
    comp = d - tau if complement is None else complement
    return threshold.complement - comp


def _tie_tol(threshold: ThresholdSolution) -> float:
    # the absolute tie tolerance must stay well inside the gap d - threshold
    return min(TIE_TOL, 1e-3 * threshold.complement)


def solve_k_of_tau(d: int, tau: float, complement: float | None = None) -> ThresholdSolution:
    """Unique k >= 0 with h(k, tau) = 1, for the Sobolev symbol and tau >= tau_*.

    The residual reported is h(k, tau) - 1.
    """
    _require_d5(d)
    validate_dimension_tau(d, tau, complement)
    t_star = solve_tau_star(d)
    offset = tau_offset(d, tau, t_star, complement)
    if offset < -_tie_tol(t_star):
        raise DomainError(f"tau = {tau} < tau_*({d}) = {t_star.value}: h(., tau) > 1 everywhere")
    if offset <= _tie_tol(t_star):
        residual = float(h_ratio(d, t_star.value, 0.0, complement=t_star.complement)) - 1
        return ThresholdSolution(0.0, residual, (0.0, 0.0), 0)
    k_max = k_stationary(d, tau)
    if k_max is None:
        raise BracketError(f"no stationary point of h for d={d}, tau={tau}")

    def f(k):
        return float(log_h_ratio(d, tau, k, complement=complement))

    root, it, bracket = bracketed_root(f, 0.0, k_max, coarse=1e-6)
    return ThresholdSolution(root, float(h_ratio(d, tau, root, complement=complement)) - 1, bracket, it)


@dataclass(frozen=True)
class KStar:
    value: int
    integer_root: bool
    k_real: float


def k_star(d: int, tau: float, complement: float | None = None) -> KStar:
    """Smallest integer >= k(tau), flagging an integer crossing point."""
    k = solve_k_of_tau(d, tau, complement).value
    nearest = round(k)
    if abs(k - nearest) <= INTEGER_ROOT_TOL:
        return KStar(int(nearest), True, k)
    return KStar(int(math.ceil(k)), False, k)


# ---------------------------------------------------------------------------
# the induction quantities for d >= 6
# ---------------------------------------------------------------------------

def big_theta(d: int, tau: float) -> float:
    """Theta(tau) = h(1, tau)."""
    return (d + 2 - tau) / (d + tau) * ((2 * d + 1) / d) ** ((tau - 1) / 2)


def tau_b0_root(d: int) -> float:
    """Largest tau with B0(d, tau) = 0; B0 < 0 exactly on (tau(d), d)."""
    if d < 4:
        raise DomainError("defined for d >= 4")
    return 1 + math.sqrt(1 + (d - 4) * (d * d - d + 2) / (d - 3))


def eta(d: int) -> float:
    """d - tau(d), in the cancellation-free form."""
    return 8 / ((d - 3) * (d - 1 + math.sqrt(1 + (d - 4) * (d * d - d + 2) / (d - 3))))


def induction_margin(d: int) -> float:
    """2^((d - eta(6) - 1)/2) - 4 d^2 / (5 d - eta(6) - 1); positive for d >= 6."""
    e6 = eta(6)
    return 2 ** ((d - e6 - 1) / 2) - 4 * d * d / (5 * d - e6 - 1)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IndexSet:
    """A finite set of degrees, or all of N_0."""

    members: frozenset[int] = frozenset()
    everything: bool = False

    @classmethod
    def of(cls, items: Iterable[int]) -> "IndexSet":
        return cls(frozenset(int(i) for i in items))

    @classmethod
    def all(cls) -> "IndexSet":
        return cls(frozenset(), True)

    def __contains__(self, k) -> bool:
        return self.everything or k in self.members

    def __bool__(self) -> bool:
        return self.everything or bool(self.members)

    def restrict(self, cap: int) -> tuple[int, ...]:
        """Members up to ``cap`` inclusive."""
        if self.everything:
            return tuple(range(cap + 1))
        return tuple(sorted(k for k in self.members if k <= cap))

    def to_json(self):
        return "N0" if self.everything else sorted(self.members)

    def __str__(self) -> str:
        if self.everything:
            return "N0"
        return "{" + ", ".join(map(str, sorted(self.members))) + "}" if self.members else "empty"


class RegimeLabel(str, enum.Enum):
    LOW_DIM = "d=2,3"
    D4_BELOW = "d=4, tau<2"
    D4_CRITICAL = "d=4, tau=2"
    D4_ABOVE = "d=4, tau>2"
    BELOW_TAU_STAR = "d>=5, tau<tau_*"
    D5_MIDDLE = "d=5, tau_*<=tau<tau^*"
    D5_UPPER = "d=5, tau^*<=tau<5"
    HIGH_AT_TAU_STAR = "d>=6, tau=tau_*"
    HIGH_MIDDLE = "d>=6, tau_*<tau<tau^*"
    HIGH_UPPER = "d>=6, tau^*<=tau<d"
    HOMOGENEOUS = "homogeneous"
    CONSTANT_ONE = "theta=1"


@dataclass
class RegimeReport:
    d: int
    tau: float
    theta_kind: ThetaKind
    b: float
    B: float
    kmin_set: IndexSet
    kmax_set: IndexSet
    regime_label: RegimeLabel
    certified: bool
    flags: list[str] = field(default_factory=list)
    thresholds: dict[str, float] = field(default_factory=dict)
    k_star: KStar | None = None


def _sobolev_low(d: int, tau: float, problem: Problem, limit: float, coeffs: RatioCoefficients):
    beta0 = beta_k(problem, 0)
    if d in (2, 3) or (d == 4 and tau > 2 + TIE_TOL):
        label = RegimeLabel.LOW_DIM if d < 4 else RegimeLabel.D4_ABOVE
        # h increasing to 1, so beta decreasing
        cert = coeffs.B0 < 0 and coeffs.B1 < 0 and coeffs.B2 < 0
        return limit, beta0, IndexSet(), IndexSet.of([0]), label, cert
    if abs(tau - 2) <= TIE_TOL:
        return math.pi, math.pi, IndexSet.all(), IndexSet.all(), RegimeLabel.D4_CRITICAL, True
    cert = coeffs.B0 > 0 and coeffs.B1 > 0 and coeffs.B2 > 0
    return beta0, limit, IndexSet.of([0]), IndexSet(), RegimeLabel.D4_BELOW, cert


def classify(d: int, tau: float, theta_kind=ThetaKind.SOBOLEV,
             tau_complement: float | None = None) -> RegimeReport:
    """Optimal constants b = inf beta_k, B = sup beta_k and the attaining degrees.

    Empty index sets mean the extremum is the tail limit and is not attained.
    ``certified`` records that the sign pattern of the derivative quadratic and
    the relevant h-crossings were checked to agree with the reported row.
    """
    validate_dimension_tau(d, tau, tau_complement)
    kind = _kind(theta_kind)
    problem = Problem.standard(d, tau, kind, tau_complement=tau_complement)
    comp = problem.tau_complement
    limit = beta_tail_limit(problem)

    if kind is ThetaKind.HOMOGENEOUS:
        # h decreasing to 1 from k = 1 on, so beta_k increases to its limit
        coeffs = h_derivative_coeffs(d, tau, kind)
        cert = coeffs.B0 >= 0 and coeffs.B1 > 0 and coeffs.B2 > 0
        return RegimeReport(d, tau, kind, 0.0, limit, IndexSet.of([0]), IndexSet(),
                            RegimeLabel.HOMOGENEOUS, bool(cert), ["degenerate: zero constant"])
    if kind is ThetaKind.ONE:
        ks = np.arange(0, 64)
        cert = bool(np.all(h_ratio(d, tau, ks, kind, comp) < 1))
        return RegimeReport(d, tau, kind, 0.0, beta_k(problem, 0), IndexSet(), IndexSet.of([0]),
                            RegimeLabel.CONSTANT_ONE, cert)

    coeffs = h_derivative_coeffs(d, tau, kind)
    if d <= 4:
        b, B, kmin, kmax, label, cert = _sobolev_low(d, tau, problem, limit, coeffs)
        return RegimeReport(d, tau, kind, b, B, kmin, kmax, label, bool(cert))

    lo_sol, hi_sol = solve_tau_star(d), solve_tau_upper_star(d)
    thresholds = {"tau_star": lo_sol.value, "tau_upper_star": hi_sol.value}
    beta0 = beta_k(problem, 0)
    base_cert = coeffs.B1 > 0 and coeffs.B2 > 0
    lo_off = tau_offset(d, tau, lo_sol, comp)
    if lo_off < -_tie_tol(lo_sol):
        cert = base_cert and float(h_ratio(d, tau, 0.0, complement=comp)) > 1
        return RegimeReport(d, tau, kind, beta0, limit, IndexSet.of([0]), IndexSet(),
                            RegimeLabel.BELOW_TAU_STAR, bool(cert), thresholds=thresholds)

    ks = k_star(d, tau, comp)
    kmin = IndexSet.of([ks.value, ks.value + 1] if ks.integer_root else [ks.value])
    b = beta_k(problem, ks.value)
    hi_off = tau_offset(d, tau, hi_sol, comp)
    upper = hi_off >= -_tie_tol(hi_sol)
    B, kmax = (beta0, IndexSet.of([0])) if upper else (limit, IndexSet())
    if d == 5:
        label = RegimeLabel.D5_UPPER if upper else RegimeLabel.D5_MIDDLE
    elif upper:
        label = RegimeLabel.HIGH_UPPER
    elif lo_off <= _tie_tol(lo_sol):
        label = RegimeLabel.HIGH_AT_TAU_STAR
    else:
        label = RegimeLabel.HIGH_MIDDLE

    # h < 1 before the crossing and h >= 1 from k* on
    cert = base_cert and float(h_ratio(d, tau, float(ks.value), complement=comp)) >= 1 - 1e-12
    if ks.value > 0 and not ks.integer_root:
        cert = cert and float(h_ratio(d, tau, float(ks.value - 1), complement=comp)) < 1
    if d >= 6 and lo_off > _tie_tol(lo_sol):
        cert = cert and 0 < ks.k_real < 1 and float(h_ratio(d, tau, 1.0, complement=comp)) > 1
    if abs(hi_off) > 1e-9:
        cert = cert and (beta0 > limit) == upper
    flags = ["integer crossing point: argmin doubled"] if ks.integer_root else []
    thresholds["k_of_tau"] = ks.k_real
    return RegimeReport(d, tau, kind, b, B, kmin, kmax, label, bool(cert), flags, thresholds, ks)
