"""
Independent numerical checks of the closed-form constants.

Two routes compute the space-time norm of u(t) = exp(i t phi(|nabla|)) f for
Fourier data f^(xi) = Y_k(xi') g(|xi|):

* Path A removes the time integral with the substitution sigma = phi(rho),
  which turns

      int int |psi(|nabla|) theta(-Lambda) u|^2 w(|x|) dx dt

  into (2 pi)^(1-d) |theta(mu_k)|^2 int |g|^2 psi^2 rho^d / |phi'|
  [int J_nu(r rho)^2 r w(r) dr] d rho, with ||f||^2 = (2 pi)^(-d) int |g|^2 rho^(d-1).
* Path B materialises the radial part of u on an (r, t) grid and integrates
  the square directly (Schrodinger only; the time decay makes truncation
  harmless).
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import special

from .beta_core import beta_k, lambda_k, nu
from .errors import DomainError
from .estimates import weighted_bessel_integral
from .problem import (Dispersion, DispersionKind, GeneralWeightProblem, Problem, RadialWeight,
                      ThetaKind)
from .specfun import (LegendreDim, QuadratureSpec, gauss_legendre, harmonic_dimension,
                      legendre_poly, sphere_area)

LAMBDA_RTOL = 1e-6
RATIO_RTOL = 1e-4
FUNK_HECKE_TOL = 1e-8
ORTHOGONALITY_RTOL = 1e-6
PATH_B_RTOL = 0.02
GRAM_NEGLIGIBLE = 1e-12


@dataclass
class VerificationReport:
    name: str
    computed: float
    reference: float | None
    tolerance: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def rel_error(self) -> float:
        """|computed - reference| / |reference| (absolute error when reference is 0)."""
        if self.reference is None:
            return math.nan
        scale = abs(self.reference)
        err = abs(self.computed - self.reference)
        return err / scale if scale > 0 else err

    @property
    def passed(self) -> bool:
        return self.reference is not None and self.rel_error <= self.tolerance


# ---------------------------------------------------------------------------
# data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaussianProfile:
    """exp(-(rho - center)^2 / (2 width^2)) truncated at ``cutoff`` widths."""

    center: float = 1.0
    width: float = 0.2
    cutoff: float = 6.0

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        return np.exp(-0.5 * ((rho - self.center) / self.width) ** 2)

    @property
    def support(self) -> tuple[float, float]:
        return max(self.center - self.cutoff * self.width, 0.0), self.center + self.cutoff * self.width

    @property
    def knots(self) -> tuple[float, ...]:
        return self.support


@dataclass(frozen=True)
class IndicatorProfile:
    a: float
    b: float

    def __post_init__(self):
        if not 0 <= self.a < self.b:
            raise DomainError("need 0 <= a < b")

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        return ((rho >= self.a) & (rho <= self.b)).astype(float)

    @property
    def support(self) -> tuple[float, float]:
        return self.a, self.b

    @property
    def knots(self) -> tuple[float, ...]:
        return self.support


@dataclass(frozen=True)
class GridProfile:
    """Piecewise-linear profile through (rho, value) samples, zero outside."""

    rho: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        r = np.asarray(self.rho)
        if len(r) < 2 or len(r) != len(self.values) or np.any(np.diff(r) <= 0) or r[0] < 0:
            raise DomainError("grid profile needs >= 2 increasing nonnegative nodes with matching values")

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        return np.interp(rho, self.rho, self.values, left=0.0, right=0.0)

    @property
    def support(self) -> tuple[float, float]:
        return self.rho[0], self.rho[-1]

    @property
    def knots(self) -> tuple[float, ...]:
        return tuple(self.rho)


Profile = GaussianProfile | IndicatorProfile | GridProfile


@dataclass(frozen=True)
class SpectralDatum:
    """Fourier data Y_k(xi') g(|xi|), Y_k the L^2(S^{d-1})-normalised zonal harmonic."""

    k: int
    profile: Profile = field(default_factory=GaussianProfile)

    def __post_init__(self):
        if self.k < 0 or int(self.k) != self.k:
            raise DomainError("degree must be a nonnegative integer")

    def nodes(self, n: int = 32) -> tuple[np.ndarray, np.ndarray]:
        """Composite Gauss-Legendre rule on the support, split at the profile knots."""
        knots = self.profile.knots
        per = max(2, n // (len(knots) - 1))
        xs, ws = [], []
        for a, b in zip(knots[:-1], knots[1:]):
            x, w = gauss_legendre(a, b, per)
            xs.append(x)
            ws.append(w)
        x, w = np.concatenate(xs), np.concatenate(ws)
        keep = x > 0
        return x[keep], w[keep]

    def norm_squared(self, d: int, n: int = 32) -> float:
        """||f||^2_{L^2} = (2 pi)^(-d) int |g|^2 rho^(d-1) d rho."""
        x, w = self.nodes(n)
        val = float(np.sum(w * self.profile(x) ** 2 * x ** (d - 1))) / (2 * math.pi) ** d
        if not val > 0:
            raise DomainError("degenerate datum: zero norm")
        return val


# ---------------------------------------------------------------------------
# Bessel-integral oracle for lambda_k
# ---------------------------------------------------------------------------

def bessel_weight_integral(nu_: float, tau: float, rho: float = 1.0,
                           quad: QuadratureSpec | None = None) -> float:
    """int_0^inf J_nu(r rho)^2 r^(1 - tau) dr by oscillatory quadrature.

    Converges for 1 < tau < 2 nu + 2.
    """
    if not 1 < tau < 2 * nu_ + 2:
        raise DomainError(f"integral diverges unless 1 < tau < 2 nu + 2 (nu={nu_}, tau={tau})")
    return weighted_bessel_integral(nu_, RadialWeight.power(tau), rho, quad)


def bessel_weight_closed_form(nu_: float, tau: float, rho: float = 1.0) -> float:
    """2^(1-tau) Gamma(tau-1) Gamma(nu+1-tau/2) / (Gamma(tau/2)^2 Gamma(nu+tau/2)) rho^(tau-2)."""
    log_val = ((1 - tau) * math.log(2) + math.lgamma(tau - 1) + math.lgamma(nu_ + 1 - tau / 2)
               - 2 * math.lgamma(tau / 2) - math.lgamma(nu_ + tau / 2) + (tau - 2) * math.log(rho))
    return math.exp(log_val)


def verify_lambda(d: int, tau: float, k: int, quad: QuadratureSpec | None = None) -> VerificationReport:
    """lambda_k assembled from the Bessel integral, against the Gamma closed form."""
    start = time.perf_counter()
    integral = bessel_weight_integral(nu(k, d), tau, 1.0, quad)
    computed = (2 * math.pi) ** (d + 1) * integral
    return VerificationReport(f"lambda d={d} tau={tau:g} k={k}", computed, lambda_k(d, tau, k),
                              LAMBDA_RTOL, {"bessel_integral": integral,
                                            "runtime_s": time.perf_counter() - start})


def lambda_grid() -> list[tuple[int, float, int]]:
    """The (d, tau, k) oracle grid."""
    return [(d, tau, k) for d in (2, 3, 4, 5, 6) for tau in (1.5, 2.0, 2.5) if tau < d
            for k in (0, 1, 2, 5)]


# ---------------------------------------------------------------------------
# Path A
# ---------------------------------------------------------------------------

def _as_general(problem: Problem | GeneralWeightProblem) -> GeneralWeightProblem:
    return problem.as_general() if isinstance(problem, Problem) else problem


def _radial_density(problem: GeneralWeightProblem, datum: SpectralDatum, rho: np.ndarray) -> np.ndarray:
    """|g|^2 psi^2 rho^d / |phi'| at the nodes (theta excluded)."""
    g = datum.profile(rho)
    return g**2 * problem.psi(rho) ** 2 * rho ** problem.d / np.abs(problem.phi.dphi(rho))


def space_time_norm(problem: Problem | GeneralWeightProblem, datum: SpectralDatum,
                    n_nodes: int = 32, quad: QuadratureSpec | None = None) -> tuple[float, np.ndarray]:
    """Path A value of int int |psi theta u|^2 w dx dt, and the Bessel integrals at the nodes."""
    gp = _as_general(problem)
    rho, wts = datum.nodes(n_nodes)
    inner = np.array([weighted_bessel_integral(nu(datum.k, gp.d), gp.w, float(r), quad) for r in rho])
    theta2 = float(gp.theta(datum.k * (datum.k + gp.d - 2))) ** 2
    total = float(np.sum(wts * _radial_density(gp, datum, rho) * inner))
    return (2 * math.pi) ** (1 - gp.d) * theta2 * total, inner


def _reference_ratio(problem: Problem | GeneralWeightProblem, datum: SpectralDatum,
                     n_nodes: int) -> tuple[float | None, str]:
    """Closed-form expectation of the Path A ratio, where one exists."""
    if isinstance(problem, Problem):
        if problem.theta.kind is ThetaKind.CUSTOM:
            return None, "none"
        base = beta_k(problem, datum.k)
        if problem.psi.canonical:
            return base, "beta_k"
        # homogeneous weight with a non-canonical smoother: beta_k times the zeta average
        rho, w = datum.nodes(n_nodes)
        dens = w * datum.profile(rho) ** 2 * rho ** (problem.d - 1)
        return base * float(np.sum(dens * problem.zeta(rho)) / np.sum(dens)), "beta_k * <zeta>"
    gp = problem
    if gp.w.label.startswith("1[") and gp.w.breakpoints:
        # int_0^R J_nu(r rho)^2 r dr = R^2/2 (J_nu^2 - J_{nu-1} J_{nu+1})(R rho)
        radius = gp.w.breakpoints[0]
        v = nu(datum.k, gp.d)
        rho, w = datum.nodes(n_nodes)
        a = radius * rho
        inner = 0.5 * radius**2 * (special.jv(v, a) ** 2 - special.jv(v - 1, a) * special.jv(v + 1, a))
        theta2 = float(gp.theta(datum.k * (datum.k + gp.d - 2))) ** 2
        lhs = (2 * math.pi) ** (1 - gp.d) * theta2 * float(np.sum(w * _radial_density(gp, datum, rho) * inner))
        return lhs / datum.norm_squared(gp.d, n_nodes), "indicator closed form"
    return None, "none"


def simulate_norm_ratio(problem: Problem | GeneralWeightProblem, datum: SpectralDatum | None = None,
                        n_nodes: int = 32, quad: QuadratureSpec | None = None,
                        tolerance: float = RATIO_RTOL) -> VerificationReport:
    """Space-time norm over ||f||^2 by the Path A reduction."""
    datum = datum or SpectralDatum(0)
    start = time.perf_counter()
    lhs, _ = space_time_norm(problem, datum, n_nodes, quad)
    norm2 = datum.norm_squared(problem.d, n_nodes)
    ref, kind = _reference_ratio(problem, datum, n_nodes)
    return VerificationReport(f"ratio d={problem.d} k={datum.k}", lhs / norm2, ref, tolerance,
                              {"lhs": lhs, "norm_squared": norm2, "reference_kind": kind,
                               "n_nodes": n_nodes, "runtime_s": time.perf_counter() - start})


# ---------------------------------------------------------------------------
# Path B
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DirectTimeGrid:
    T: float = 200.0
    R: float = 200.0
    n_rho: int = 600
    n_r: int = 1000
    n_t: int = 2000


def simulate_direct_time(problem: Problem, datum: SpectralDatum | None = None,
                         grid: DirectTimeGrid | None = None,
                         tolerance: float = PATH_B_RTOL) -> VerificationReport:
    """Brute-force ratio on (r, t) in (0, R] x [-T, T] for the Schrodinger flow.

    The radial factor of u is
        F(r, t) = int g psi e^{i t rho^2/2} (r rho)^{-(d-2)/2} J_nu(r rho) rho^{d-1} d rho
    and the space-time norm is (2 pi)^(-d) |theta|^2 int int r^{d-1-tau} |F|^2 dr dt.
    Since |F(r, -t)| = |F(r, t)| for real g, only t >= 0 is materialised.
    """
    if problem.phi.kind is not DispersionKind.SCHRODINGER:
        raise DomainError("the direct time simulation is implemented for the Schrodinger flow only")
    datum = datum or SpectralDatum(0)
    if not isinstance(datum.profile, GaussianProfile):
        raise DomainError("the direct time simulation expects a Gaussian profile")
    grid = grid or DirectTimeGrid()
    start = time.perf_counter()
    d, tau, v = problem.d, problem.tau, nu(datum.k, problem.d)

    rho, wr = gauss_legendre(*datum.profile.support, grid.n_rho)
    amp = wr * datum.profile(rho) * problem.psi(rho) * rho ** (d - 1)
    r = np.linspace(0.0, grid.R, grid.n_r + 1)[1:]
    dr = r[1] - r[0]
    t = np.linspace(0.0, grid.T, grid.n_t + 1)
    dt = t[1] - t[0]

    x = np.outer(r, rho)
    radial = special.jv(v, x) * x ** (-(d - 2) / 2) * amp  # (n_r, n_rho)
    phase = np.exp(1j * np.outer(problem.phi.phi(rho), t))  # (n_rho, n_t)
    F = radial @ phase
    # trapezoid in t, starting at t = 0, and a right-endpoint rule in r (integrand vanishes at 0)
    space = (np.abs(F) ** 2 * (r ** (d - 1 - tau))[:, None]).sum(axis=0) * dr
    wt = np.full(t.size, dt)
    wt[0] = wt[-1] = dt / 2
    cumulative = 2 * np.cumsum(space * wt)  # both signs of t

    theta2 = float(problem.theta(datum.k * (datum.k + d - 2))) ** 2
    scale = theta2 / (2 * math.pi) ** d / datum.norm_squared(d, grid.n_rho)
    value = cumulative[-1] * scale
    half = cumulative[grid.n_t // 2] * scale
    reference = beta_k(problem, datum.k)
    value, half = float(value), float(half)
    truncation_change = (value - half) / value
    return VerificationReport(f"direct-time d={d} k={datum.k}", value, reference, tolerance,
                              {"T": grid.T, "R": grid.R, "value_half_T": half,
                               "truncation_change": truncation_change,
                               "truncation_dominated": bool(truncation_change > 0.01),
                               "runtime_s": time.perf_counter() - start})


# ---------------------------------------------------------------------------
# Funk-Hecke
# ---------------------------------------------------------------------------

def sphere_quadrature(d: int, n: int = 40, n_circle: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Product rule on S^{d-1} in R^d, exact for polynomials of degree < min(2n, n_circle).

    omega = (t, sqrt(1 - t^2) omega'), d omega = (1 - t^2)^((d-3)/2) dt d omega', with
    Gauss-Gegenbauer in t and the trapezoid rule on the circle.
    """
    if d < 2:
        raise DomainError("need d >= 2")
    n_circle = n_circle or 2 * n
    if d == 2:
        a = 2 * math.pi * np.arange(n_circle) / n_circle
        return np.column_stack([np.cos(a), np.sin(a)]), np.full(n_circle, 2 * math.pi / n_circle)
    inner_x, inner_w = sphere_quadrature(d - 1, n, n_circle)
    if d == 3:
        t, wt = special.roots_legendre(n)
    else:
        t, wt = special.roots_gegenbauer(n, (d - 2) / 2)
    s = np.sqrt(1 - t**2)
    x = np.concatenate([np.column_stack([np.full(len(inner_x), ti), si * inner_x]) for ti, si in zip(t, s)])
    w = np.concatenate([wi * inner_w for wi in wt])
    return x, w


def funk_hecke_reduction(d: int, k: int, radius: float, cos_angle: float, n: int = 80) -> complex:
    """|S^{d-2}| P_{k,d}(cos_angle) int_{-1}^{1} P_{k,d}(s) e^{-i radius s} (1 - s^2)^((d-3)/2) ds."""
    spec = LegendreDim(k, d)
    if d == 2:
        s, w = special.roots_chebyt(n)
    elif d == 3:
        s, w = special.roots_legendre(n)
    else:
        s, w = special.roots_gegenbauer(n, (d - 2) / 2)
    integral = np.sum(w * legendre_poly(spec, s) * np.exp(-1j * radius * s))
    return sphere_area(d - 2) * float(legendre_poly(spec, cos_angle)) * complex(integral)


def random_rotation(d: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def funk_hecke_check(d: int, k: int, radius: float, x_dir: Sequence[float], omega: Sequence[float],
                     n: int = 40, seed: int = 0, tolerance: float = FUNK_HECKE_TOL) -> VerificationReport:
    """Both sides of the zonal commutation identity against their common reduction.

    LHS = int e^{-i R w.x'} P_k(w.omega) dw,  RHS = int e^{-i R w.omega} P_k(x'.w) dw,
    each over S^{d-1} with an independently rotated product rule.  ``radius``
    is r|x|.  ``computed`` is the largest discrepancy among the three values.
    """
    xp = np.asarray(x_dir, dtype=float)
    om = np.asarray(omega, dtype=float)
    if xp.shape != (d,) or om.shape != (d,):
        raise DomainError("direction vectors must have length d")
    xp, om = xp / np.linalg.norm(xp), om / np.linalg.norm(om)
    spec = LegendreDim(k, d)
    rng = np.random.default_rng(seed)
    nodes, w = sphere_quadrature(d, n)

    a = nodes @ random_rotation(d, rng).T
    lhs = complex(np.sum(w * np.exp(-1j * radius * (a @ xp)) * legendre_poly(spec, a @ om)))
    b = nodes @ random_rotation(d, rng).T
    rhs = complex(np.sum(w * np.exp(-1j * radius * (b @ om)) * legendre_poly(spec, b @ xp)))
    red = funk_hecke_reduction(d, k, radius, float(xp @ om))

    scale = max(abs(red), 1.0)
    spread = max(abs(lhs - rhs), abs(lhs - red), abs(rhs - red)) / scale
    return VerificationReport(f"funk-hecke d={d} k={k}", spread, 0.0, tolerance,
                              {"lhs": [lhs.real, lhs.imag], "rhs": [rhs.real, rhs.imag],
                               "reduction": [red.real, red.imag], "radius": radius,
                               "cos_angle": float(xp @ om), "scale": scale})


def random_geometry(d: int, rng: np.random.Generator) -> tuple[float, np.ndarray, np.ndarray]:
    """(r|x|, x', omega) with r|x| uniform on [0.5, 5]."""
    x = rng.standard_normal(d)
    o = rng.standard_normal(d)
    return float(rng.uniform(0.5, 5.0)), x / np.linalg.norm(x), o / np.linalg.norm(o)


# ---------------------------------------------------------------------------
# orthogonality across H_k and across dispersion branches
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Component:
    datum: SpectralDatum
    coefficient: complex = 1.0
    phi: Dispersion | None = None


def zonal_gram(d: int, degrees: Sequence[int], n: int = 64) -> np.ndarray:
    """<Y_j, Y_l>_{L^2(S^{d-1})} for zonal harmonics sharing one axis, by quadrature."""
    if d == 2:
        s, w = special.roots_chebyt(n)
    elif d == 3:
        s, w = special.roots_legendre(n)
    else:
        s, w = special.roots_gegenbauer(n, (d - 2) / 2)
    polys = [legendre_poly(LegendreDim(k, d), s) * math.sqrt(harmonic_dimension(k, d) / sphere_area(d - 1))
             for k in degrees]
    area = sphere_area(d - 2)
    return np.array([[area * float(np.sum(w * p * q)) for q in polys] for p in polys])


def _cross_lhs(gp: GeneralWeightProblem, phi: Dispersion, cj: Component, cl: Component,
               n_nodes: int, quad: QuadratureSpec | None) -> complex:
    """Radial-time cross term for two components sharing one dispersion branch."""
    from .specfun import BesselProduct, integrate_semiinfinite

    d = gp.d
    kj, kl = cj.datum.k, cl.datum.k
    lo = min(cj.datum.profile.support[0], cl.datum.profile.support[0])
    hi = max(cj.datum.profile.support[1], cl.datum.profile.support[1])
    rho, wts = gauss_legendre(max(lo, 1e-12), hi, n_nodes)
    inner = []
    for r in rho:
        g = lambda x, r=r: x * gp.w(x / r)  # noqa: E731
        prod = BesselProduct(nu(kj, d), nu(kl, d), g, tuple(b * r for b in gp.w.breakpoints))
        inner.append(integrate_semiinfinite(prod, quad) / r**2)
    dens = (cj.datum.profile(rho) * cl.datum.profile(rho) * gp.psi(rho) ** 2 * rho**d
            / np.abs(phi.dphi(rho)))
    theta = float(gp.theta(kj * (kj + d - 2))) * float(gp.theta(kl * (kl + d - 2)))
    phase = (1j) ** kj * (-1j) ** kl
    return (2 * math.pi) ** (1 - d) * theta * phase * float(np.sum(wts * dens * np.array(inner)))


def _radial_inner(d: int, a: SpectralDatum, b: SpectralDatum, n_nodes: int) -> float:
    lo = min(a.profile.support[0], b.profile.support[0])
    hi = max(a.profile.support[1], b.profile.support[1])
    rho, w = gauss_legendre(lo, hi, 4 * n_nodes)
    return float(np.sum(w * a.profile(rho) * b.profile(rho) * rho ** (d - 1))) / (2 * math.pi) ** d


def orthogonality_check(problem: Problem, components: Sequence[Component], norm: str = "l2",
                        n_nodes: int = 32, quad: QuadratureSpec | None = None,
                        tolerance: float = ORTHOGONALITY_RTOL) -> VerificationReport:
    """Ratio for a superposition against the norm-weighted average of per-component ratios.

    ``norm="l2"`` divides by ||sum c_j f_j||^2.  ``norm="energy"`` is the
    two-branch (wave / Klein-Gordon) convention: the left side carries a factor
    2 and the data norm is ||sum c_j f_j||^2 + ||sum sgn_j c_j f_j||^2 with
    sgn_j the branch of component j, which equals 2 sum ||c_j f_j||^2 exactly
    when the parallelogram law applies.

    Cross terms between components on disjoint dispersion images vanish after
    the time integration.  For a shared branch they are proportional to the
    angular Gram entry and are computed unless that entry is below 1e-12.
    """
    if norm not in ("l2", "energy"):
        raise DomainError("norm must be 'l2' or 'energy'")
    comps = [c if c.phi is not None else Component(c.datum, c.coefficient, problem.phi) for c in components]
    keys = [(c.datum.k, c.phi.kind) for c in comps]
    if len(set(keys)) != len(keys):
        raise DomainError("components must have distinct (degree, dispersion) pairs")
    start = time.perf_counter()
    d = problem.d
    gram = zonal_gram(d, [c.datum.k for c in comps])

    per_ratio, per_lhs, per_norm = [], [], []
    for c in comps:
        sub = Problem(d, problem.tau, problem.theta, c.phi, problem.psi
                      if not problem.psi.canonical else None)
        lhs, _ = space_time_norm(sub, c.datum, n_nodes, quad)
        n2 = c.datum.norm_squared(d, n_nodes)
        per_ratio.append(lhs / n2)
        per_lhs.append(abs(c.coefficient) ** 2 * lhs)
        per_norm.append(abs(c.coefficient) ** 2 * n2)

    skipped = computed_cross = 0
    lhs_total = complex(sum(per_lhs))
    gp = problem.as_general()
    for j in range(len(comps)):
        for l in range(j + 1, len(comps)):
            cj, cl = comps[j], comps[l]
            if cj.phi.overlaps(cl.phi) and cj.phi.kind is not cl.phi.kind:
                raise DomainError("cross terms between distinct overlapping dispersions are not supported")
            if cj.phi.kind is not cl.phi.kind:
                continue
            if abs(gram[j, l]) < GRAM_NEGLIGIBLE:
                skipped += 1
                continue
            computed_cross += 1
            gpj = GeneralWeightProblem(d, gp.w, gp.theta, cj.phi, gp.psi)
            term = _cross_lhs(gpj, cj.phi, cj, cl, n_nodes, quad) * gram[j, l]
            lhs_total += 2 * (cj.coefficient * np.conj(cl.coefficient) * term).real

    def data_norm(signs):
        total = 0.0
        for j, cj in enumerate(comps):
            for l, cl in enumerate(comps):
                if abs(gram[j, l]) < GRAM_NEGLIGIBLE:
                    continue
                coeff = signs[j] * signs[l] * cj.coefficient * np.conj(cl.coefficient)
                total += (coeff * gram[j, l] * _radial_inner(d, cj.datum, cl.datum, n_nodes)).real
        return total

    ones = [1] * len(comps)
    if norm == "l2":
        multiplier, denom = 1.0, data_norm(ones)
    else:
        multiplier = 2.0
        denom = data_norm(ones) + data_norm([c.phi.branch for c in comps])
    computed = multiplier * lhs_total.real / denom
    # the factor 2 and the doubled orthogonal norm cancel in the energy case
    reference = float(np.dot(per_ratio, per_norm) / np.sum(per_norm))
    return VerificationReport(f"orthogonality d={d} n={len(comps)} norm={norm}", computed, reference,
                              tolerance, {"per_component_ratio": per_ratio, "gram": gram.tolist(),
                                          "cross_terms_computed": computed_cross,
                                          "cross_terms_skipped": skipped, "data_norm": denom,
                                          "runtime_s": time.perf_counter() - start})
