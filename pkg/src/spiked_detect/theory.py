"""Closed-form limiting laws for the detection problem.

The log likelihood ratio converges under the null to a Gaussian with mean
-rho and variance 2*rho (mean +rho under the alternative), so the optimal
test's limiting total error (Type I + Type II) is erfc(sqrt(rho)/2).  This
module evaluates rho for both models, the related series nu, the erfc error
curves, the sech LSS comparison curve, and the effective SNR.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.special import erfc

from .density import InfoFunctionals

__all__ = [
    "LimitingLaw",
    "ErrorCurve",
    "DomainError",
    "rho_wigner",
    "rho_iid",
    "nu",
    "nu_star",
    "limiting_error",
    "lss_error_sech",
    "lss_threshold_sech",
    "effective_snr",
    "error_curve",
]


class DomainError(ValueError):
    """Parameter outside the admissible (high-temperature) range.

    Carries ``threshold``, the largest admissible value of the offending
    parameter, so sweep drivers can clip their grids automatically.
    """

    def __init__(self, message: str, threshold: float):
        super().__init__(message)
        self.threshold = threshold


@dataclass(frozen=True)
class LimitingLaw:
    rho: float
    model: Literal["wigner", "iid"]
    omega: float
    info: InfoFunctionals


@dataclass(frozen=True)
class ErrorCurve:
    omegas: np.ndarray
    values: np.ndarray
    kind: Literal["lr_wigner", "lr_iid", "lss_sech", "lr_sech_closed_form"]


def rho_wigner(omega: float, info: InfoFunctionals) -> float:
    """Gaussian parameter of the limiting log-LR law, symmetric model."""
    if omega < 0:
        raise DomainError("omega must be nonnegative", 0.0)
    t = omega * info.F
    if t >= 1.0:
        raise DomainError(
            f"omega*F = {t:.6g} >= 1; admissible omega < {1.0 / info.F:.6g}",
            1.0 / info.F,
        )
    return -0.25 * (
        math.log1p(-t)
        + omega * (info.F - 2.0 * info.F_d)
        + (omega**2 / 4.0) * (2.0 * info.F**2 - info.G)
    )


def rho_iid(omega: float, info: InfoFunctionals) -> float:
    """Gaussian parameter of the limiting log-LR law, asymmetric model."""
    if omega < 0:
        raise DomainError("omega must be nonnegative", 0.0)
    t = 2.0 * omega * info.F
    if t >= 1.0:
        raise DomainError(
            f"2*omega*F = {t:.6g} >= 1; admissible omega < {0.5 / info.F:.6g}",
            0.5 / info.F,
        )
    return -0.25 * (math.log1p(-t) + (omega**2 / 2.0) * (2.0 * info.F**2 - info.G))


def _nu_of_t(t: float) -> float:
    if not 0.0 <= t < 1.0:
        raise DomainError(f"series parameter t = {t:.6g} outside [0, 1)", 1.0)
    # closed form of sum_{k>=3} t^k / (4k)
    return -0.25 * (math.log1p(-t) + t + t * t / 2.0)


def nu(omega: float, F: float) -> float:
    return _nu_of_t(omega * F)


def nu_star(omega: float, F: float) -> float:
    return _nu_of_t(2.0 * omega * F)


def limiting_error(rho: float) -> float:
    """Total error of the optimal test: erfc(sqrt(rho)/2)."""
    if rho < 0:
        raise DomainError("rho must be nonnegative", 0.0)
    return float(erfc(math.sqrt(rho) / 2.0))


def lss_error_sech(omega: float) -> float:
    """Limiting total error of the sech LSS test."""
    a = math.pi**2 * omega / 8.0
    if not 0.0 <= a < 1.0:
        raise DomainError(
            f"pi^2*omega/8 = {a:.6g} outside [0, 1); admissible omega < {8.0 / math.pi**2:.6g}",
            8.0 / math.pi**2,
        )
    return float(erfc(0.25 * math.sqrt(-math.log1p(-a) + a)))


def lss_threshold_sech(omega: float) -> float:
    """Acceptance threshold of the sech LSS test (midpoint rule)."""
    a = math.pi**2 * omega / 8.0
    if not 0.0 <= a < 1.0:
        raise DomainError("omega outside the admissible LSS range", 8.0 / math.pi**2)
    return -math.log1p(-a) - 3.0 * math.pi**4 * omega**2 / 512.0


def effective_snr(omega: float, F: float, model: Literal["wigner", "iid"]) -> float:
    """SNR after the optimal entrywise transform: omega*F, doubled for IID."""
    if model == "wigner":
        return omega * F
    if model == "iid":
        return 2.0 * omega * F
    raise ValueError(f"unknown model {model!r}")


def error_curve(
    omegas, info: InfoFunctionals, kind: Literal["lr_wigner", "lr_iid", "lss_sech"]
) -> ErrorCurve:
    """Evaluate a theoretical error curve on a grid, clipping to the domain."""
    omegas = np.asarray(omegas, dtype=float)
    values = np.empty_like(omegas)
    for i, w in enumerate(omegas):
        try:
            if kind == "lr_wigner":
                values[i] = limiting_error(rho_wigner(w, info))
            elif kind == "lr_iid":
                values[i] = limiting_error(rho_iid(w, info))
            elif kind == "lss_sech":
                values[i] = lss_error_sech(w)
            else:
                raise ValueError(f"unknown curve kind {kind!r}")
        except DomainError:
            values[i] = math.nan
    return ErrorCurve(omegas=omegas, values=values, kind=kind)
