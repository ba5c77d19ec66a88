"""Domain types: angular symbols, dispersion relations, smoothers, weights, problems."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from scipy import optimize

from .errors import DomainError


class ThetaKind(str, enum.Enum):
    SOBOLEV = "sobolev"  # (1 + rho)^((tau - 1)/4)
    HOMOGENEOUS = "homogeneous"  # rho^((tau - 1)/4)
    ONE = "one"
    CUSTOM = "custom"


@dataclass(frozen=True)
class AngularSymbol:
    """The function theta applied to the eigenvalues of the spherical Laplacian."""

    kind: ThetaKind
    tau: float | None = None
    func: Callable[[float], float] | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", ThetaKind(self.kind))
        if self.kind in (ThetaKind.SOBOLEV, ThetaKind.HOMOGENEOUS) and self.tau is None:
            raise DomainError(f"{self.kind.value} symbol needs tau")
        if self.kind is ThetaKind.CUSTOM and self.func is None:
            raise DomainError("custom symbol needs a function")

    @classmethod
    def sobolev(cls, tau: float) -> "AngularSymbol":
        return cls(ThetaKind.SOBOLEV, tau)

    @classmethod
    def homogeneous(cls, tau: float) -> "AngularSymbol":
        return cls(ThetaKind.HOMOGENEOUS, tau)

    @classmethod
    def one(cls) -> "AngularSymbol":
        return cls(ThetaKind.ONE)

    @classmethod
    def custom(cls, func: Callable[[float], float]) -> "AngularSymbol":
        return cls(ThetaKind.CUSTOM, None, func)

    @classmethod
    def from_table(cls, d: int, table: Mapping[int, float]) -> "AngularSymbol":
        """Custom symbol known only at the eigenvalues mu_k = k(k + d - 2)."""
        by_mu = {k * (k + d - 2): float(v) for k, v in table.items()}

        def lookup(mu):
            try:
                return by_mu[int(round(mu))]
            except KeyError:
                raise DomainError(f"no tabulated theta value at mu = {mu}") from None

        symbol = cls.custom(lookup)
        object.__setattr__(symbol, "_table", dict(table))
        return symbol

    @property
    def table(self) -> dict[int, float] | None:
        return getattr(self, "_table", None)

    def __call__(self, mu):
        if self.kind is ThetaKind.SOBOLEV:
            return (1.0 + mu) ** ((self.tau - 1.0) / 4.0)
        if self.kind is ThetaKind.HOMOGENEOUS:
            return mu ** ((self.tau - 1.0) / 4.0)
        if self.kind is ThetaKind.ONE:
            return 1.0 if np.ndim(mu) == 0 else np.ones_like(np.asarray(mu, dtype=float))
        return self.func(mu)

    def log_abs_square(self, mu):
        """log |theta(mu)|^2 for the parametric kinds (``-inf`` where theta = 0)."""
        mu = np.asarray(mu, dtype=float)
        with np.errstate(divide="ignore"):
            if self.kind is ThetaKind.SOBOLEV:
                return 0.5 * (self.tau - 1.0) * np.log1p(mu)
            if self.kind is ThetaKind.HOMOGENEOUS:
                return 0.5 * (self.tau - 1.0) * np.log(mu)
            if self.kind is ThetaKind.ONE:
                return np.zeros_like(mu)
            vals = np.array([abs(self.func(float(m))) for m in np.ravel(mu)]).reshape(mu.shape)
            return 2.0 * np.log(vals)


class DispersionKind(str, enum.Enum):
    SCHRODINGER = "schrodinger"
    HALF_WAVE_PLUS = "half-wave+"
    HALF_WAVE_MINUS = "half-wave-"
    KLEIN_GORDON_PLUS = "klein-gordon+"
    KLEIN_GORDON_MINUS = "klein-gordon-"
    CUSTOM = "custom"


@dataclass(frozen=True)
class Dispersion:
    """Radial dispersion relation phi, with derivative and inverse.

    ``image`` is the interval phi((0, inf)); the inverse is needed when two
    evolutions are compared on the frequency line sigma = phi(rho).
    """

    kind: DispersionKind
    phi: Callable = field(compare=False)
    dphi: Callable = field(compare=False)
    inverse: Callable | None = field(default=None, compare=False)
    image: tuple[float, float] = (0.0, math.inf)

    @classmethod
    def schrodinger(cls) -> "Dispersion":
        return cls(DispersionKind.SCHRODINGER, lambda r: 0.5 * r**2, lambda r: r,
                   lambda s: np.sqrt(2.0 * s), (0.0, math.inf))

    @classmethod
    def half_wave(cls, sign: int = 1) -> "Dispersion":
        if sign > 0:
            return cls(DispersionKind.HALF_WAVE_PLUS, lambda r: r, lambda r: np.ones_like(r),
                       lambda s: s, (0.0, math.inf))
        return cls(DispersionKind.HALF_WAVE_MINUS, lambda r: -r, lambda r: -np.ones_like(r),
                   lambda s: -s, (-math.inf, 0.0))

    @classmethod
    def klein_gordon(cls, sign: int = 1) -> "Dispersion":
        if sign > 0:
            return cls(DispersionKind.KLEIN_GORDON_PLUS, lambda r: np.sqrt(1.0 + r**2),
                       lambda r: r / np.sqrt(1.0 + r**2), lambda s: np.sqrt(s**2 - 1.0), (1.0, math.inf))
        return cls(DispersionKind.KLEIN_GORDON_MINUS, lambda r: -np.sqrt(1.0 + r**2),
                   lambda r: -r / np.sqrt(1.0 + r**2), lambda s: np.sqrt(s**2 - 1.0), (-math.inf, -1.0))

    @classmethod
    def custom(cls, phi, dphi, inverse=None, image=None) -> "Dispersion":
        if image is None:
            lo, hi = float(phi(1e-12)), float(phi(1e12))
            image = (min(lo, hi), max(lo, hi))
        if inverse is None:
            inverse = _numeric_inverse(phi)
        return cls(DispersionKind.CUSTOM, phi, dphi, inverse, image)

    @property
    def branch(self) -> int:
        """+1 for relations increasing in rho, -1 for decreasing ones."""
        return 1 if float(self.dphi(np.array(1.0))) > 0 else -1

    def overlaps(self, other: "Dispersion") -> bool:
        lo = max(self.image[0], other.image[0])
        hi = min(self.image[1], other.image[1])
        return hi > lo


def _numeric_inverse(phi):
    def inverse(sigma):
        sig = np.atleast_1d(np.asarray(sigma, dtype=float))
        out = np.empty_like(sig)
        for i, s in enumerate(sig):
            lo, hi = 1e-12, 1.0
            while (phi(hi) - s) * (phi(lo) - s) > 0 and hi < 1e12:
                hi *= 2.0
            out[i] = optimize.brentq(lambda r: phi(r) - s, lo, hi, xtol=1e-15)
        return out if np.ndim(sigma) else float(out[0])

    return inverse


@dataclass(frozen=True)
class Smoother:
    """Frequency multiplier psi(|nabla|)."""

    psi: Callable = field(compare=False)
    canonical: bool = False
    label: str = "custom"

    @classmethod
    def canonical_for(cls, phi: Dispersion, tau: float) -> "Smoother":
        """psi with psi^2 = |phi'| rho^(1 - tau)."""
        return cls(lambda r: np.sqrt(np.abs(phi.dphi(r)) * r ** (1.0 - tau)), True, "canonical")

    @classmethod
    def power(cls, s: float) -> "Smoother":
        """psi(rho) = rho^(-s)."""
        return cls(lambda r: r ** (-s), False, f"rho^-{s}")

    def __call__(self, rho):
        return self.psi(rho)


def validate_dimension_tau(d: int, tau: float, complement: float | None = None) -> None:
    """Check d >= 2 and 1 < tau < d.

    ``complement`` is d - tau carried separately when tau is so close to d
    that the difference is not representable; tau may then round to d.
    """
    if int(d) != d or d < 2:
        raise DomainError(f"dimension must be an integer >= 2, got {d}")
    if complement is None:
        if not 1.0 < tau < d:
            raise DomainError(f"tau must lie in (1, d) = (1, {d}), got {tau}")
        return
    if not (tau > 1.0 and 0.0 < complement < d - 1):
        raise DomainError(f"tau must lie in (1, d) = (1, {d}), got d - tau = {complement}")
    if abs((d - complement) - tau) > 8 * math.ulp(d):
        raise DomainError(f"tau = {tau} inconsistent with d - tau = {complement}")


@dataclass(frozen=True)
class Problem:
    """One estimate instance with homogeneous weight |x|^(-tau)."""

    d: int
    tau: float
    theta: AngularSymbol
    phi: Dispersion = field(default_factory=Dispersion.schrodinger)
    psi: Smoother | None = None
    tau_complement: float | None = None

    def __post_init__(self):
        validate_dimension_tau(self.d, self.tau, self.tau_complement)
        if self.tau_complement is None:
            object.__setattr__(self, "tau_complement", self.d - self.tau)
        if self.psi is None:
            object.__setattr__(self, "psi", Smoother.canonical_for(self.phi, self.tau))

    @classmethod
    def standard(cls, d: int, tau: float, theta: str | ThetaKind = ThetaKind.SOBOLEV,
                 phi: Dispersion | None = None, tau_complement: float | None = None) -> "Problem":
        kind = ThetaKind(theta)
        symbol = {
            ThetaKind.SOBOLEV: lambda: AngularSymbol.sobolev(tau),
            ThetaKind.HOMOGENEOUS: lambda: AngularSymbol.homogeneous(tau),
            ThetaKind.ONE: AngularSymbol.one,
        }[kind]()
        return cls(d, tau, symbol, phi or Dispersion.schrodinger(), tau_complement=tau_complement)

    def zeta(self, rho):
        """rho^(tau - 1) psi^2 / |phi'|; identically one for the canonical smoother."""
        rho = np.asarray(rho, dtype=float)
        return rho ** (self.tau - 1.0) * self.psi(rho) ** 2 / np.abs(self.phi.dphi(rho))

    def as_general(self) -> "GeneralWeightProblem":
        return GeneralWeightProblem(self.d, RadialWeight.power(self.tau), self.theta, self.phi, self.psi)


@dataclass(frozen=True)
class RadialWeight:
    """Radial weight w(|x|), smooth away from ``breakpoints``."""

    w: Callable = field(compare=False)
    breakpoints: tuple[float, ...] = ()
    label: str = "custom"
    homogeneous_exponent: float | None = None

    @classmethod
    def power(cls, tau: float) -> "RadialWeight":
        return cls(lambda r: r ** (-tau), (), f"|x|^-{tau}", tau)

    @classmethod
    def indicator(cls, radius: float) -> "RadialWeight":
        return cls(lambda r: (np.asarray(r) <= radius).astype(float), (radius,), f"1[|x|<={radius}]")

    def __call__(self, r):
        return self.w(r)


@dataclass(frozen=True)
class GeneralWeightProblem:
    """Estimate with an arbitrary radial weight and unconstrained (phi, psi)."""

    d: int
    w: RadialWeight
    theta: AngularSymbol
    phi: Dispersion = field(default_factory=Dispersion.schrodinger)
    psi: Smoother = field(default_factory=lambda: Smoother(lambda r: np.ones_like(r), False, "one"))

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise DomainError(f"dimension must be an integer >= 2, got {self.d}")
