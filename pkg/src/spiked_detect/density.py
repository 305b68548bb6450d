"""Noise densities, their derivatives, samplers, and information functionals.

A noise density is the law of a normalized matrix entry: a smooth, even,
strictly positive probability density with unit variance.  Everything
downstream (likelihood ratios, entrywise transforms, the spin-glass
decomposition) consumes densities only through this module's interface:
``pdf``, ``log_pdf``, ``deriv(order, x)`` for order 1..4, and a sampler
taking an explicit RNG.

The information functionals

    F       = integral of p'(x)^2 / p(x)
    G       = integral of p''(x)^2 / p(x)
    I_cross = integral of p'(x)^2 p''(x) / p(x)^2

are evaluated by adaptive panel quadrature on [-L, L], where L is chosen
so the tails are below double-precision relevance.
"""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import roots_legendre

__all__ = [
    "NoiseDensity",
    "InfoFunctionals",
    "DensityError",
    "QuadratureError",
    "builtin_gaussian",
    "builtin_sech",
    "custom_density",
    "density_from_table",
    "adaptive_quad",
    "compute_info",
    "check_ibp_identities",
]


class DensityError(ValueError):
    """Raised when a candidate density fails validation."""


class QuadratureError(RuntimeError):
    """Raised when adaptive quadrature cannot reach tolerance.

    Attributes
    ----------
    residual : float
        The best error estimate achieved before giving up.
    """

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (achieved residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class NoiseDensity:
    """An even, positive, smooth probability density with unit variance.

    ``deriv(order, x)`` returns the order-th derivative of the pdf;
    ``ratio(order, x)`` the score-type ratio p^(order)/p used throughout.
    Instances are immutable and safe to share across workers; the sampler
    takes an explicit ``numpy.random.Generator``.
    """

    name: str
    pdf: Callable[[np.ndarray], np.ndarray]
    log_pdf: Callable[[np.ndarray], np.ndarray]
    deriv: Callable[[int, np.ndarray], np.ndarray]
    sampler: Callable[..., np.ndarray]
    support_halfwidth: float
    analytic_derivs: bool

    def ratio(self, order: int, x: np.ndarray) -> np.ndarray:
        """p^(order)(x) / p(x), vectorized."""
        return self.deriv(order, x) / self.pdf(x)

    def score(self, x: np.ndarray) -> np.ndarray:
        """The optimal entrywise transform q(x) = -p'(x)/p(x)."""
        return -self.ratio(1, x)

    def sample(self, rng: np.random.Generator, size=None) -> np.ndarray:
        return self.sampler(rng, size)


@dataclass(frozen=True)
class InfoFunctionals:
    """Scalar functionals of the off-diagonal / diagonal noise densities."""

    F: float
    F_d: float
    G: float
    G_tilde: float
    I_cross: float


# ---------------------------------------------------------------------------
# quadrature

_GL_NODES, _GL_WEIGHTS = roots_legendre(15)


def _panel(f, a: float, b: float) -> float:
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    return half * float(np.dot(_GL_WEIGHTS, f(mid + half * _GL_NODES)))


def adaptive_quad(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float = 1e-12,
    max_depth: int = 40,
) -> float:
    """Adaptive bisection quadrature with a 15-point Gauss rule per panel.

    Panels are split until the whole-panel estimate agrees with the sum of
    its halves to the (per-panel) absolute tolerance.  Raises
    :class:`QuadratureError` if the depth limit is hit anywhere.
    """

    def recurse(a, b, whole, tol, depth):
        mid = 0.5 * (a + b)
        left = _panel(f, a, mid)
        right = _panel(f, mid, b)
        err = abs(left + right - whole)
        if err <= tol or err <= 1e-16 * abs(whole):
            return left + right
        if depth >= max_depth:
            raise QuadratureError(
                f"quadrature did not converge on [{a:g}, {b:g}]", err
            )
        # never demand less than machine-level absolute accuracy per panel
        half_tol = max(0.5 * tol, 1e-17)
        return recurse(a, mid, left, half_tol, depth + 1) + recurse(
            mid, b, right, half_tol, depth + 1
        )

    return recurse(a, b, _panel(f, a, b), tol, 0)


def _symmetric_quad(f, L: float, tol: float = 1e-12) -> float:
    # integrate over [-L, L] splitting at 0 where even densities peak
    return adaptive_quad(f, -L, 0.0, tol / 2) + adaptive_quad(f, 0.0, L, tol / 2)


def _choose_halfwidth(pdf, cutoff: float = 1e-16) -> float:
    L = 2.0
    while L <= 2.0**20:
        if float(pdf(np.asarray(L))) < cutoff:
            return L
        L *= 2.0
    raise DensityError("pdf does not decay below cutoff within 2^20")


# ---------------------------------------------------------------------------
# built-in densities

_SQRT2PI = math.sqrt(2.0 * math.pi)

# probabilists' Hermite polynomials: d^s/dx^s phi(x) = (-1)^s He_s(x) phi(x)
_HERMITE = {
    1: lambda x: x,
    2: lambda x: x * x - 1.0,
    3: lambda x: x * (x * x - 3.0),
    4: lambda x: x ** 4 - 6.0 * x * x + 3.0,
}


def builtin_gaussian() -> NoiseDensity:
    """Standard normal density with analytic derivatives to order 4."""

    def pdf(x):
        x = np.asarray(x, dtype=float)
        return np.exp(-0.5 * x * x) / _SQRT2PI

    def log_pdf(x):
        x = np.asarray(x, dtype=float)
        return -0.5 * x * x - math.log(_SQRT2PI)

    def deriv(order, x):
        x = np.asarray(x, dtype=float)
        if order == 0:
            return pdf(x)
        if order not in _HERMITE:
            raise ValueError(f"derivative order {order} not supported")
        sign = -1.0 if order % 2 else 1.0
        return sign * _HERMITE[order](x) * pdf(x)

    def sampler(rng, size=None):
        return rng.standard_normal(size)

    return NoiseDensity(
        name="gaussian",
        pdf=pdf,
        log_pdf=log_pdf,
        deriv=deriv,
        sampler=sampler,
        support_halfwidth=16.0,
        analytic_derivs=True,
    )


def builtin_sech() -> NoiseDensity:
    """Hyperbolic-secant density sech(pi x / 2) / 2 (unit variance).

    Score ratios are polynomials in t = tanh(pi x / 2), so the tails never
    suffer the 0/0 cancellation of naive derivative quotients.
    """

    half_pi = math.pi / 2.0

    def log_pdf(x):
        a = half_pi * np.asarray(x, dtype=float)
        # log(1/(e^a + e^-a)) computed from the dominant exponential
        return -np.abs(a) - np.log1p(np.exp(-2.0 * np.abs(a)))

    def pdf(x):
        return np.exp(log_pdf(x))

    def _ratio(order, t):
        if order == 1:
            return -half_pi * t
        if order == 2:
            return -(half_pi ** 2) * (1.0 - 2.0 * t * t)
        if order == 3:
            return (half_pi ** 3) * t * (5.0 - 6.0 * t * t)
        if order == 4:
            t2 = t * t
            return (half_pi ** 4) * (5.0 - 28.0 * t2 + 24.0 * t2 * t2)
        raise ValueError(f"derivative order {order} not supported")

    def deriv(order, x):
        x = np.asarray(x, dtype=float)
        if order == 0:
            return pdf(x)
        t = np.tanh(half_pi * x)
        return _ratio(order, t) * pdf(x)

    def sampler(rng, size=None):
        # inverse CDF: F^{-1}(u) = (2/pi) log tan(pi u / 2)
        u = rng.random(size)
        u = np.clip(u, 1e-300, 1.0 - 1e-16)
        return (2.0 / math.pi) * np.log(np.tan(half_pi * u))

    return NoiseDensity(
        name="sech",
        pdf=pdf,
        log_pdf=log_pdf,
        deriv=deriv,
        sampler=sampler,
        support_halfwidth=32.0,
        analytic_derivs=True,
    )


# ---------------------------------------------------------------------------
# user densities

_EPS = float(np.finfo(float).eps)

# central-difference stencils of fourth-order accuracy: order -> (offsets, weights)
_FD_STENCILS = {
    1: ((-2, -1, 1, 2), (1 / 12, -2 / 3, 2 / 3, -1 / 12)),
    2: ((-2, -1, 0, 1, 2), (-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12)),
    3: ((-3, -2, -1, 1, 2, 3), (1 / 8, -1, 13 / 8, -13 / 8, 1, -1 / 8)),
    4: ((-3, -2, -1, 0, 1, 2, 3), (-1 / 6, 2, -13 / 2, 28 / 3, -13 / 2, 2, -1 / 6)),
}


def _fd_derivative(f, x, order: int = 1):
    """Direct central-difference derivative of f at x (orders 1..4).

    Each order uses its own stencil on f itself rather than differencing a
    lower-order estimate, which keeps the roundoff amplification at
    eps / h^order instead of compounding across levels.  Step sizes
    balance that roundoff against the O(h^4) truncation error.
    """
    if order not in _FD_STENCILS:
        raise ValueError(f"derivative order {order} not supported")
    x = np.asarray(x, dtype=float)
    h = _EPS ** (1.0 / (order + 4)) * (1.0 + np.abs(x))
    offsets, weights = _FD_STENCILS[order]
    total = weights[0] * f(x + offsets[0] * h)
    for k, w in zip(offsets[1:], weights[1:]):
        total = total + w * f(x + k * h)
    return total / h**order


def custom_density(
    pdf: Callable[[np.ndarray], np.ndarray],
    deriv: Callable[[int, np.ndarray], np.ndarray] | None = None,
    sampler: Callable[..., np.ndarray] | None = None,
    name: str = "custom",
) -> NoiseDensity:
    """Wrap a user pdf, validating it and filling in missing pieces.

    Missing derivatives are finite differences (Richardson-extrapolated,
    applied recursively for higher orders); a missing sampler is built by
    inverse-CDF interpolation on a dense grid.  Rejects densities that are
    not normalized to within 1e-3 or not even.
    """

    def _pdf(x):
        return np.asarray(pdf(np.asarray(x, dtype=float)), dtype=float)

    L = _choose_halfwidth(_pdf)
    # pull the truncation in while the outer half touches zero pdf values
    # (tabulated densities are exactly zero beyond their table range, and
    # score ratios are undefined there)
    while L > 2.0 and np.any(_pdf(np.linspace(L / 2.0, L, 33)) <= 0.0):
        L /= 2.0

    total = _symmetric_quad(_pdf, L, tol=1e-10)
    if abs(total - 1.0) > 1e-3:
        raise DensityError(f"pdf integrates to {total:.6f}, not 1")

    grid = np.linspace(0.0, L / 2.0, 129)
    left, right = _pdf(-grid), _pdf(grid)
    if np.max(np.abs(left - right)) > 1e-8 * np.max(right):
        raise DensityError("pdf is not symmetric about 0")
    if np.any(right <= 0.0):
        raise DensityError("pdf is not strictly positive on its working support")

    if deriv is None:
        analytic = False

        def deriv_fn(order, x):
            if order == 0:
                return _pdf(x)
            return _fd_derivative(_pdf, x, order)

    else:
        analytic = True
        user_deriv = deriv

        def deriv_fn(order, x):
            if order == 0:
                return _pdf(x)
            return np.asarray(user_deriv(order, np.asarray(x, dtype=float)))

    if sampler is None:
        xs = np.linspace(-L, L, 1 << 14)
        cdf = np.concatenate([[0.0], np.cumsum((_pdf(xs)[1:] + _pdf(xs)[:-1]) / 2.0 * np.diff(xs))])
        cdf /= cdf[-1]

        def sampler_fn(rng, size=None):
            return np.interp(rng.random(size), cdf, xs)

    else:
        sampler_fn = sampler

    tiny = np.finfo(float).tiny

    def log_pdf(x):
        return np.log(np.maximum(_pdf(x), tiny))

    return NoiseDensity(
        name=name,
        pdf=_pdf,
        log_pdf=log_pdf,
        deriv=deriv_fn,
        sampler=sampler_fn,
        support_halfwidth=L,
        analytic_derivs=analytic,
    )


def density_from_table(path: str, name: str | None = None) -> NoiseDensity:
    """Load a density from a plain-text ``x,pdf`` table (>= 1024 rows).

    The tabulated values are cubic-spline interpolated inside the table's
    range and treated as zero outside it.
    """
    from scipy.interpolate import CubicSpline

    data = np.loadtxt(path, delimiter=",")
    if data.ndim != 2 or data.shape[1] != 2:
        raise DensityError(f"{path}: expected two columns x,pdf")
    if data.shape[0] < 1024:
        raise DensityError(f"{path}: need at least 1024 rows, got {data.shape[0]}")
    order = np.argsort(data[:, 0])
    xs, ps = data[order, 0], data[order, 1]
    spline = CubicSpline(xs, ps)
    lo, hi = xs[0], xs[-1]

    def pdf(x):
        x = np.asarray(x, dtype=float)
        out = np.where((x >= lo) & (x <= hi), spline(np.clip(x, lo, hi)), 0.0)
        return np.maximum(out, 0.0)

    return custom_density(pdf, name=name or f"file:{path}")


# ---------------------------------------------------------------------------
# information functionals

def _expectation(d: NoiseDensity, integrand_of_x, tol: float | None = None) -> float:
    # finite-difference derivatives carry roundoff noise that an absolute
    # 1e-12 tolerance would chase forever; relax to what the noise allows
    if tol is None:
        tol = 1e-12 if d.analytic_derivs else 1e-6
    L = d.support_halfwidth
    return _symmetric_quad(lambda x: integrand_of_x(x) * d.pdf(x), L, tol)


_info_cache: "weakref.WeakKeyDictionary[NoiseDensity, dict]" = weakref.WeakKeyDictionary()


def compute_info(
    d: NoiseDensity,
    d_diag: NoiseDensity | None = None,
    gtilde_denominator_power: int = 2,
) -> InfoFunctionals:
    """Compute F, F_d, G, I_cross, and the spectral-test constant G_tilde.

    ``gtilde_denominator_power`` selects which cross integral feeds the
    G_tilde formula: 2 uses integral of p'^2 p'' / p^2 in both numerator
    and denominator (the default reading), 1 uses p'^2 p'' / p instead.
    Results are cached per density instance.
    """
    if d_diag is None:
        d_diag = d
    cacheable = d_diag is d
    if cacheable:
        per_d = _info_cache.setdefault(d, {})
        if gtilde_denominator_power in per_d:
            return per_d[gtilde_denominator_power]

    F = _expectation(d, lambda x: d.ratio(1, x) ** 2)
    F_d = F if d_diag is d else _expectation(d_diag, lambda x: d_diag.ratio(1, x) ** 2)
    G = _expectation(d, lambda x: d.ratio(2, x) ** 2)
    I_cross = _expectation(d, lambda x: d.ratio(1, x) ** 2 * d.ratio(2, x))

    if gtilde_denominator_power == 2:
        cross = I_cross
    elif gtilde_denominator_power == 1:
        cross = _expectation(d, lambda x: d.ratio(1, x) ** 2 * d.deriv(2, x))
    else:
        raise ValueError("gtilde_denominator_power must be 1 or 2")

    denom = 1.5 * cross - F * F
    G_tilde = math.inf if denom == 0.0 else cross * cross / denom

    info = InfoFunctionals(F=F, F_d=F_d, G=G, G_tilde=G_tilde, I_cross=I_cross)
    if cacheable:
        per_d[gtilde_denominator_power] = info
    return info


def check_ibp_identities(d: NoiseDensity) -> dict[str, float]:
    """Residuals of the integration-by-parts identities the theory rests on.

    Returns absolute residuals of: E[p^(s)/p] = 0 for s = 1..4,
    E[(P1)^4] = (3/2) E[(P1)^2 P2], and E[(P1)^2 P2] = E[(P2)^2 + P1 P3],
    where Ps denotes p^(s)/p under p.
    """
    out: dict[str, float] = {}
    for s in range(1, 5):
        out[f"mean_ratio_{s}"] = abs(_expectation(d, lambda x, s=s: d.ratio(s, x)))

    p1_4 = _expectation(d, lambda x: d.ratio(1, x) ** 4)
    p1sq_p2 = _expectation(d, lambda x: d.ratio(1, x) ** 2 * d.ratio(2, x))
    p2sq_plus = _expectation(
        d, lambda x: d.ratio(2, x) ** 2 + d.ratio(1, x) * d.ratio(3, x)
    )
    out["quartic_vs_cross"] = abs(p1_4 - 1.5 * p1sq_p2)
    out["cross_vs_second"] = abs(p1sq_p2 - p2sq_plus)
    return out


def get_density(spec: str) -> NoiseDensity:
    """Resolve a density name used on the command line."""
    if spec == "gaussian":
        return builtin_gaussian()
    if spec == "sech":
        return builtin_sech()
    if spec.startswith("file:"):
        return density_from_table(spec[len("file:"):])
    raise DensityError(f"unknown density {spec!r}")
