"""
Special functions and quadrature primitives.

Gamma-type functions are thin wrappers over ``math``/``scipy.special`` except
for :func:`log_gamma_ratio`, which keeps full relative accuracy when both
arguments are large (the naive ``lgamma(a) - lgamma(b)`` loses about
``log10(a log a)`` digits to cancellation).

Semi-infinite integrals of Bessel products are split as

    J_a J_b = (J_a J_b + Y_a Y_b)/2 + (J_a J_b - Y_a Y_b)/2

where the first term is non-oscillatory (it tends to the product of the
Bessel moduli) and the second oscillates with zero mean.  The smooth part is
integrated on a logarithmic scale until its envelope is negligible, the
oscillating part panel by panel between consecutive zeros with Wynn's
epsilon algorithm on the partial sums.
"""
from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize, special

from .errors import DomainError, NonConvergenceError

EULER_GAMMA = 0.57721566490153286061

# Binet series coefficients B_{2n} / (2n (2n - 1)), n = 1..8
_BINET = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)
_STIRLING_MIN = 10.0


class OscillatoryStrategy(str, enum.Enum):
    BETWEEN_ZEROS = "between-zeros-with-acceleration"
    TRUNCATE_AT_ENVELOPE = "truncate-at-envelope"


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and limits for :func:`integrate_semiinfinite`."""

    abs_tol: float = 1e-12
    rel_tol: float = 1e-8
    max_subdivisions: int = 200
    oscillatory_strategy: OscillatoryStrategy = OscillatoryStrategy.BETWEEN_ZEROS

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise DomainError(f"abs_tol must be positive, got {self.abs_tol}")
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol}")
        if int(self.max_subdivisions) < 1:
            raise DomainError("max_subdivisions must be at least 1")
        object.__setattr__(self, "oscillatory_strategy", OscillatoryStrategy(self.oscillatory_strategy))

    @classmethod
    def from_env(cls, prefix: str = "SHARPSMOOTH_QUAD_") -> "QuadratureSpec":
        """Defaults overridden by ``<prefix>ABS_TOL``, ``REL_TOL``, ``MAX_SUBDIVISIONS``."""
        kwargs = {}
        for name, conv in (("abs_tol", float), ("rel_tol", float), ("max_subdivisions", int)):
            raw = os.environ.get(prefix + name.upper())
            if raw:
                kwargs[name] = conv(raw)
        return cls(**kwargs)


DEFAULT_QUAD = QuadratureSpec()


@dataclass(frozen=True)
class LegendreDim:
    """Degree ``k`` Legendre polynomial attached to the sphere in dimension ``d``."""

    k: int
    d: int

    def __post_init__(self):
        if self.k < 0 or int(self.k) != self.k:
            raise DomainError(f"degree must be a nonnegative integer, got {self.k}")
        if self.d < 2 or int(self.d) != self.d:
            raise DomainError(f"dimension must be an integer >= 2, got {self.d}")


# ---------------------------------------------------------------------------
# Gamma family


def log_gamma(x: float) -> float:
    """Return ln Gamma(x) for x > 0."""
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def _binet(x):
    # remainder of Stirling's series, valid to ~1e-16 for x >= 10
    inv = 1.0 / x
    inv2 = inv * inv
    acc = 0.0
    for c in reversed(_BINET):
        acc = acc * inv2 + c
    return acc * inv


def log_gamma_ratio(a, b, delta=None):
    """Return ln(Gamma(a) / Gamma(b)), elementwise, for a, b > 0.

    For ``min(a, b) >= 10`` the difference of Stirling series is formed
    directly in terms of ``a - b`` so that no large intermediate cancels.
    ``delta`` supplies ``a - b`` exactly when a and b are large shifts of a
    common integer; rounding a and b separately would otherwise cost about
    ulp(a) * log(a) in the result.
    """
    a_arr = np.asarray(a, dtype=float)
    b_arr = np.asarray(b, dtype=float)
    if np.any(a_arr <= 0) or np.any(b_arr <= 0):
        raise DomainError("log_gamma_ratio requires positive arguments")
    a_arr, b_arr = np.broadcast_arrays(a_arr, b_arr)
    out = np.empty(a_arr.shape)
    big = np.minimum(a_arr, b_arr) >= _STIRLING_MIN
    if np.any(~big):
        out[~big] = special.gammaln(a_arr[~big]) - special.gammaln(b_arr[~big])
    if np.any(big):
        ab, bb = a_arr[big], b_arr[big]
        if delta is None:
            delta_big = ab - bb
        else:
            delta_big = np.broadcast_to(np.asarray(delta, dtype=float), a_arr.shape)[big]
        out[big] = (
            (ab - 0.5) * np.log1p(delta_big / bb)
            + delta_big * (np.log(bb) - 1.0)
            + (_binet(ab) - _binet(bb))
        )
    if out.ndim == 0:
        return float(out)
    return out


def gamma_ratio(a: float, b: float) -> float:
    """Return Gamma(a) / Gamma(b) without forming either factor."""
    if not (a > 0 and b > 0):
        raise DomainError(f"gamma_ratio requires positive arguments, got ({a}, {b})")
    return math.exp(log_gamma_ratio(a, b))


def digamma(x: float) -> float:
    """Return the digamma function (log Gamma)'(x) for x > 0."""
    if not x > 0:
        raise DomainError(f"digamma requires x > 0, got {x}")
    return float(special.psi(x))


# ---------------------------------------------------------------------------
# Sphere and Legendre polynomials


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere S^n in R^{n+1}.  ``S^0`` has measure 2."""
    if n < 0:
        raise DomainError("sphere dimension must be nonnegative")
    return 2.0 * math.pi ** ((n + 1) / 2.0) / math.gamma((n + 1) / 2.0)


def harmonic_dimension(k: int, d: int) -> int:
    """Dimension N_{k,d} of the degree-k spherical harmonics on S^{d-1}."""
    LegendreDim(k, d)
    if d == 2:
        return 1 if k == 0 else 2
    if k == 0:
        return 1
    return (2 * k + d - 2) * math.comb(k + d - 3, k) // (d - 2)


def legendre_poly(spec: LegendreDim, s):
    """Evaluate P_{k,d}(s), normalised so that P_{k,d}(1) = 1.

    Uses the three-term recurrence

        (n + d - 2) P_{n+1} = (2n + d - 2) s P_n - n P_{n-1},

    which reduces to the classical Legendre recurrence for d = 3 and to the
    Chebyshev one for d = 2.  ``s`` may be an array.
    """
    s_arr = np.asarray(s, dtype=float)
    if np.any(np.abs(s_arr) > 1.0 + 1e-14):
        raise DomainError("legendre_poly requires |s| <= 1")
    k, d = spec.k, spec.d
    p_prev = np.ones_like(s_arr)
    if k == 0:
        return float(p_prev) if p_prev.ndim == 0 else p_prev
    p = s_arr.copy()
    for n in range(1, k):
        p_next = ((2 * n + d - 2) * s_arr * p - n * p_prev) / (n + d - 2)
        p_prev, p = p, p_next
    return float(p) if p.ndim == 0 else p


# ---------------------------------------------------------------------------
# Bessel functions


def bessel_j(nu: float, x):
    """Bessel function of the first kind J_nu(x) for nu >= 0, x >= 0."""
    if nu < 0:
        raise DomainError(f"bessel_j requires nu >= 0, got {nu}")
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0):
        raise DomainError("bessel_j requires x >= 0")
    out = special.jv(nu, x_arr)
    return float(out) if out.ndim == 0 else out


def _hankel_coeffs(nu: float, n: int) -> list[float]:
    mu = 4.0 * nu * nu
    coeffs = [1.0]
    for k in range(1, n + 1):
        coeffs.append(coeffs[-1] * (mu - (2 * k - 1) ** 2) / (k * 8.0))
    return coeffs


def _asymptotic_threshold(nu: float, mu: float) -> float:
    return max(60.0, 2.0 * max(nu, mu) ** 2)


def _bessel_pair_smooth(nu: float, mu: float, x: np.ndarray) -> np.ndarray:
    """J_nu J_mu + Y_nu Y_mu, using the Hankel expansion for large x."""
    out = np.empty_like(x)
    cut = _asymptotic_threshold(nu, mu)
    small = x <= cut
    if np.any(small):
        xs = x[small]
        out[small] = special.jv(nu, xs) * special.jv(mu, xs) + special.yv(nu, xs) * special.yv(mu, xs)
    if np.any(~small):
        xb = x[~small]
        a_nu = _hankel_coeffs(nu, 14)
        a_mu = _hankel_coeffs(mu, 14)
        inv = 1.0 / xb
        s_nu = np.zeros(xb.shape, dtype=complex)
        s_mu = np.zeros(xb.shape, dtype=complex)
        power = np.ones_like(xb)
        for k in range(15):
            s_nu += (1j) ** k * a_nu[k] * power
            s_mu += (-1j) ** k * a_mu[k] * power
            power = power * inv
        phase = np.exp(-0.5j * math.pi * (nu - mu))
        out[~small] = (2.0 / (math.pi * xb)) * np.real(phase * s_nu * s_mu)
    return out


@dataclass(frozen=True)
class BesselProduct:
    """Integrand x -> J_nu(x) J_mu(x) g(x) on (0, inf).

    ``g`` must be vectorised, smooth away from ``breakpoints`` and of at most
    algebraic growth, with ``J_nu J_mu g`` integrable at infinity.
    """

    nu: float
    mu: float
    g: Callable[[np.ndarray], np.ndarray]
    breakpoints: tuple[float, ...] = ()

    def __post_init__(self):
        if self.nu < 0 or self.mu < 0:
            raise DomainError("Bessel orders must be nonnegative")

    @classmethod
    def square(cls, nu, g, breakpoints=()):
        return cls(nu, nu, g, tuple(breakpoints))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return special.jv(self.nu, x) * special.jv(self.mu, x) * self.g(x)

    def smooth_part(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * _bessel_pair_smooth(self.nu, self.mu, x) * self.g(x)

    def oscillating_part(self, x):
        x = np.asarray(x, dtype=float)
        jj = special.jv(self.nu, x) * special.jv(self.mu, x)
        yy = special.yv(self.nu, x) * special.yv(self.mu, x)
        return 0.5 * (jj - yy) * self.g(x)

    def split_point(self) -> float:
        """Where the exact integrand hands over to the smooth/oscillating split."""
        top = max(self.breakpoints) if self.breakpoints else 0.0
        return max(10.0, 2.0 * max(self.nu, self.mu) + 10.0, top + 1.0)


# ---------------------------------------------------------------------------
# Quadrature


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)


def _gauss_panel(f, a: float, b: float) -> float:
    half = 0.5 * (b - a)
    x = half * _GL_NODES + 0.5 * (a + b)
    return float(half * np.dot(_GL_WEIGHTS, f(x)))


def wynn_epsilon(partial_sums: Sequence[float]) -> float:
    """Wynn epsilon extrapolation of a sequence of partial sums.

    Returns the deepest even-column entry that the table supports.  An exact
    repeat in the sequence is taken as convergence to that value.
    """
    row = [float(v) for v in partial_sums]
    if not row:
        raise ValueError("empty sequence")
    prev = [0.0] * (len(row) + 1)
    best = row[-1]
    column = 0
    while len(row) > 1:
        new = []
        for j in range(len(row) - 1):
            diff = row[j + 1] - row[j]
            if diff == 0.0 or not math.isfinite(diff):
                # converged (or broke down) at this depth: report the even column we have
                return best
            new.append(prev[j + 1] + 1.0 / diff)
        prev, row = row, new
        column += 1
        if column % 2 == 0:
            if not math.isfinite(row[-1]):
                return best
            best = row[-1]
    return best


def _quad(f, a, b, spec: QuadratureSpec, points=None):
    pts = None
    if points:
        pts = sorted(p for p in points if a < p < b) or None
    value, _ = integrate.quad(
        f, a, b, points=pts, limit=spec.max_subdivisions,
        epsabs=min(spec.abs_tol, 1e-14), epsrel=max(min(spec.rel_tol, 1e-12), 1e-13),
    )
    return value


def _integrate_log_scale(f, x0: float, spec: QuadratureSpec, chunk: float = 8.0, u_max: float = 690.0):
    """Integral of a non-oscillatory f over (x0, inf) via x = x0 e^u."""
    if x0 <= 0:
        raise DomainError("log-scale integration needs a positive start")

    def transformed(u):
        x = x0 * np.exp(u)
        return f(x) * x

    total = 0.0
    previous = None
    u = 0.0
    quiet = 0
    while u < u_max:
        piece, _ = integrate.quad(transformed, u, u + chunk, limit=spec.max_subdivisions,
                                  epsabs=0.0, epsrel=1e-13)
        previous, total = total, total + piece
        u += chunk
        if abs(piece) <= 0.1 * max(spec.abs_tol, 1e-3 * spec.rel_tol * abs(total)):
            quiet += 1
            if quiet >= 2:
                return total
        else:
            quiet = 0
    raise NonConvergenceError(
        "envelope decay too slow for log-scale truncation", last=total, previous=previous
    )


def _next_sign_change(f, a: float, step: float, limit: float):
    fa = f(np.array([a]))[0]
    x = a
    while x < limit:
        b = x + step
        fb = f(np.array([b]))[0]
        if fa == 0.0:
            return x
        if np.sign(fb) != np.sign(fa):
            return optimize.brentq(lambda t: f(np.array([t]))[0], x, b, xtol=1e-14, rtol=1e-15)
        x, fa = b, fb
    return None


def _integrate_between_zeros(f, x0: float, spec: QuadratureSpec, period: float = math.pi,
                             max_panels: int = 80, min_panels: int = 8):
    """Accelerated sum of panel integrals of a zero-mean oscillating f over (x0, inf).

    Returns ``None`` if f shows no sign change within 32 periods of x0.
    """
    step = period / 8.0
    first = _next_sign_change(f, x0, step, x0 + 32 * period)
    if first is None:
        return None
    total = _gauss_panel(f, x0, first) if first > x0 else 0.0
    sums = []
    left = first
    estimates = []
    for n in range(max_panels):
        right = _next_sign_change(f, left + 1e-9 * max(1.0, left), step, left + 8 * period)
        if right is None:
            # the integrand died out (e.g. compactly supported weight)
            tail = _gauss_panel(f, left, left + 8 * period)
            sums.append(total + tail)
            return sums[-1]
        total += _gauss_panel(f, left, right)
        sums.append(total)
        left = right
        if n + 1 >= min_panels:
            estimates.append(wynn_epsilon(sums))
            if len(estimates) >= 3:
                e1, e2, e3 = estimates[-3:]
                scale = max(abs(e3), spec.abs_tol)
                if abs(e3 - e2) <= 0.1 * spec.rel_tol * scale and abs(e2 - e1) <= spec.rel_tol * scale:
                    return e3
    raise NonConvergenceError(
        "oscillatory tail did not converge", last=estimates[-1] if estimates else total,
        previous=estimates[-2] if len(estimates) > 1 else None,
    )


def integrate_semiinfinite(f, spec: QuadratureSpec | None = None, *, start: float | None = None,
                           period: float = math.pi, points: Sequence[float] = ()) -> float:
    """Integrate ``f`` over (0, inf).

    ``f`` is either a vectorised callable or a :class:`BesselProduct`.  For a
    :class:`BesselProduct` the integral over ``(0, x0)`` is done directly and
    the remainder is split into its smooth and oscillating parts (see the
    module docstring), regardless of the strategy requested.

    For a plain callable, ``between-zeros-with-acceleration`` treats the tail
    past ``start`` as a zero-mean oscillation with half-period about
    ``period`` and accelerates the panel sums; when no sign change appears it
    falls back to ``truncate-at-envelope``, which integrates on a log scale
    until the contributions are negligible.

    Raises
    ------
    NonConvergenceError
        If neither the tail sum nor the log-scale integral settles.
    """
    spec = spec or DEFAULT_QUAD
    if isinstance(f, BesselProduct):
        x0 = f.split_point() if start is None else max(start, f.split_point())
        head = _quad(f, 0.0, x0, spec, points=f.breakpoints + tuple(points))
        smooth = _integrate_log_scale(f.smooth_part, x0, spec)
        osc = _integrate_between_zeros(f.oscillating_part, x0, spec, period=period / 2.0)
        return head + smooth + (osc or 0.0)

    x0 = 1.0 if start is None else float(start)
    if points:
        x0 = max(x0, max(points) + 1.0)
    head = _quad(f, 0.0, x0, spec, points=tuple(points)) if x0 > 0 else 0.0
    if spec.oscillatory_strategy is OscillatoryStrategy.BETWEEN_ZEROS:
        tail = _integrate_between_zeros(f, x0, spec, period=period)
        if tail is not None:
            return head + tail
    return head + _integrate_log_scale(f, x0, spec)


def bessel_square_power_integral(nu: float, tau: float, spec: QuadratureSpec | None = None) -> float:
    """Quadrature value of the integral of J_nu(x)^2 x^(1 - tau) over (0, inf)."""
    if not 1.0 < tau < 2.0 * nu + 2.0:
        raise DomainError(f"integral diverges unless 1 < tau < 2 nu + 2 (nu={nu}, tau={tau})")
    return integrate_semiinfinite(BesselProduct.square(nu, lambda x: x ** (1.0 - tau)), spec)


def gauss_legendre(a: float, b: float, n: int):
    """Gauss-Legendre nodes and weights on [a, b]."""
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return half * x + 0.5 * (a + b), half * w
