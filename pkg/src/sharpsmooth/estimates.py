"""
Equation-level sharp constants.

The Schrodinger, wave and Klein-Gordon smoothing estimates are instances of
the abstract estimate with a homogeneous weight |x|^(-tau), the symbol
theta(rho) = (1 + rho)^((tau - 1)/4) and a canonical smoother, so their
optimal constants come straight from :func:`sharpsmooth.regimes.classify`.
For general radial weights the constants involve the functions alpha_k(rho).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .beta_core import nu
from .errors import DomainError
from .problem import (AngularSymbol, Dispersion, GeneralWeightProblem, Problem, RadialWeight,
                      Smoother, ThetaKind)
from .regimes import IndexSet, RegimeReport, classify
from .specfun import BesselProduct, QuadratureSpec, integrate_semiinfinite

IDENTITY_RTOL = 1e-12


class Equation(str, enum.Enum):
    SCHRODINGER = "schrodinger"
    WAVE = "wave"
    KLEIN_GORDON = "klein-gordon"


@dataclass(frozen=True)
class NormComponent:
    """||D^order X||^2 with X either u(0) or its time derivative."""

    field: str  # "u" or "dt_u"
    order: float
    coefficient: float = 1.0

    def __str__(self) -> str:
        name = "u(0)" if self.field == "u" else "dt u(0)"
        return f"||{name}||^2_(H^{self.order:g})"


@dataclass(frozen=True)
class DataNorm:
    components: tuple[NormComponent, ...]

    def __str__(self) -> str:
        return " + ".join(map(str, self.components))


@dataclass(frozen=True)
class EquationSpec:
    equation: Equation
    d: int
    s: float

    def __post_init__(self):
        object.__setattr__(self, "equation", Equation(self.equation))
        if int(self.d) != self.d or self.d < 2:
            raise DomainError(f"dimension must be an integer >= 2, got {self.d}")
        lo, hi = self.s_range
        if not lo < self.s < hi:
            raise DomainError(f"s = {self.s} outside ({lo}, {hi}) for the {self.equation.value} equation")

    @property
    def s_range(self) -> tuple[float, float]:
        if self.equation is Equation.WAVE:
            return 0.0, (self.d - 1) / 2
        return -0.5, self.d / 2 - 1

    @property
    def tau(self) -> float:
        if self.equation is Equation.WAVE:
            return 1 + 2 * self.s
        return 2 * (1 + self.s)

    @property
    def effective_s(self) -> float:
        """Index at which the Schrodinger constants c(d, .), C(d, .) are read off."""
        return self.s - 0.5 if self.equation is Equation.WAVE else self.s

    @property
    def multiplier(self) -> float:
        """Factor in front of the space-time integral."""
        return 1.0 if self.equation is Equation.SCHRODINGER else 2.0

    @property
    def dispersions(self) -> tuple[Dispersion, ...]:
        if self.equation is Equation.SCHRODINGER:
            return (Dispersion.schrodinger(),)
        if self.equation is Equation.WAVE:
            return Dispersion.half_wave(1), Dispersion.half_wave(-1)
        return Dispersion.klein_gordon(1), Dispersion.klein_gordon(-1)

    @property
    def smoother(self) -> Smoother:
        s = self.s
        if self.equation is Equation.KLEIN_GORDON:
            return Smoother(lambda r: (1 + r**2) ** -0.25 * r ** (-s), True, f"(1+rho^2)^-1/4 rho^-{s}")
        return Smoother(lambda r: r ** (-s), True, f"rho^-{s}")

    @property
    def data_norm(self) -> DataNorm:
        s = self.s
        if self.equation is Equation.SCHRODINGER:
            return DataNorm((NormComponent("u", s),))
        if self.equation is Equation.WAVE:
            return DataNorm((NormComponent("u", s), NormComponent("dt_u", s - 1)))
        return DataNorm((NormComponent("u", s), NormComponent("u", s + 1), NormComponent("dt_u", s)))

    def problems(self) -> tuple[Problem, ...]:
        """One abstract problem per dispersion branch."""
        theta = AngularSymbol.sobolev(self.tau)
        return tuple(Problem(self.d, self.tau, theta, phi, self.smoother) for phi in self.dispersions)


def describe_index_set(index_set: IndexSet) -> str:
    if index_set.everything:
        return "every nonzero datum"
    if not index_set:
        return "no extremisers"
    if index_set.members == {0}:
        return "radial data only"
    names = " + ".join(f"H_{k}" for k in sorted(index_set.members))
    return f"data in {names}"


@dataclass(frozen=True)
class ExtremiserDescription:
    lower: IndexSet
    upper: IndexSet

    @property
    def lower_text(self) -> str:
        return describe_index_set(self.lower)

    @property
    def upper_text(self) -> str:
        return describe_index_set(self.upper)


@dataclass
class SharpConstants:
    spec: EquationSpec
    c: float
    C: float
    tau: float
    multiplier: float
    data_norm: DataNorm
    extremisers: ExtremiserDescription
    regime: RegimeReport

    @property
    def identity(self) -> bool:
        return abs(self.C - self.c) <= IDENTITY_RTOL * abs(self.C)


def sharp_constants(spec: EquationSpec) -> SharpConstants:
    """Optimal (c, C) in c ||data||^2 <= multiplier * LHS <= C ||data||^2."""
    report = classify(spec.d, spec.tau, ThetaKind.SOBOLEV)
    return SharpConstants(spec, report.b, report.B, spec.tau, spec.multiplier, spec.data_norm,
                          ExtremiserDescription(report.kmin_set, report.kmax_set), report)


@dataclass(frozen=True)
class IdentityRecord:
    equation: Equation
    d: int
    weight: str
    angular_operator: str
    extra_operator: str | None
    multiplier: float
    constant: float
    norm: DataNorm


_IDENTITY_S = {Equation.SCHRODINGER: 0.0, Equation.WAVE: 0.5, Equation.KLEIN_GORDON: 0.0}


def exact_identity_constants(equation) -> IdentityRecord:
    """The d = 4, |x|^-2 case where the two-sided estimate is an equality."""
    equation = Equation(equation)
    result = sharp_constants(EquationSpec(equation, 4, _IDENTITY_S[equation]))
    if not result.identity:  # pragma: no cover - guarded by tests
        raise ArithmeticError("d = 4 constants failed to coincide")
    extra = "(1-Delta)^(1/4)" if equation is Equation.KLEIN_GORDON else None
    return IdentityRecord(equation, 4, "|x|^-2", "(1-Lambda)^(1/4)", extra, result.multiplier,
                          result.C, result.data_norm)


# ---------------------------------------------------------------------------
# general weights
# ---------------------------------------------------------------------------

def weighted_bessel_integral(nu_: float, w: RadialWeight, rho: float,
                             spec: QuadratureSpec | None = None) -> float:
    """int_0^inf J_nu(r rho)^2 r w(r) dr, after substituting x = r rho."""
    if rho <= 0:
        raise DomainError("rho must be positive")
    g = lambda x: x * w(x / rho)  # noqa: E731
    integrand = BesselProduct.square(nu_, g, tuple(b * rho for b in w.breakpoints))
    return integrate_semiinfinite(integrand, spec) / rho**2


def alpha_k_general(problem: GeneralWeightProblem, k: int, rho: float,
                    spec: QuadratureSpec | None = None) -> float:
    """alpha_k(rho) = rho psi(rho)^2 / |phi'(rho)| int_0^inf J_nu(r rho)^2 r w(r) dr."""
    factor = rho * float(problem.psi(np.asarray(rho))) ** 2 / abs(float(problem.phi.dphi(np.asarray(rho))))
    return factor * weighted_bessel_integral(nu(k, problem.d), problem.w, rho, spec)


def beta_k_general(problem: GeneralWeightProblem, k: int, rho: float,
                   spec: QuadratureSpec | None = None) -> float:
    """beta_k(rho) = 2 pi |theta(mu_k)|^2 alpha_k(rho)."""
    mu_k = k * (k + problem.d - 2)
    return 2 * math.pi * float(problem.theta(mu_k)) ** 2 * alpha_k_general(problem, k, rho, spec)


@dataclass
class ZetaProfile:
    """zeta on a log grid; the extrema are grid extrema, never certified."""

    rho: np.ndarray
    values: np.ndarray
    inf: float
    sup: float
    grid: dict = field(default_factory=dict)
    certified: bool = False

    @property
    def flat(self) -> bool:
        """Heuristic: zeta constant on the grid to 1e-12."""
        return self.sup - self.inf <= 1e-12 * max(abs(self.sup), 1.0)


def zeta_profile(problem: Problem, rho_min: float = 1e-4, rho_max: float = 1e4,
                 n: int = 2000) -> ZetaProfile:
    """zeta(rho) = rho^(tau-1) psi^2 / |phi'| on ``n`` log-spaced points."""
    if not 0 < rho_min < rho_max or n < 2:
        raise DomainError("need 0 < rho_min < rho_max and n >= 2")
    rho = np.geomspace(rho_min, rho_max, n)
    values = problem.zeta(rho)
    return ZetaProfile(rho, values, float(values.min()), float(values.max()),
                       {"rho_min": rho_min, "rho_max": rho_max, "n": n, "spacing": "log"})
