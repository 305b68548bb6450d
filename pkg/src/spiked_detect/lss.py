"""Linear-spectral-statistics detector for sech noise.

The observation is passed through the entrywise map
sqrt(2/N) * tanh(pi*sqrt(N)*x/2); the statistic combines a log determinant
of the shifted transformed matrix with trace corrections and is compared
to a fixed closed-form threshold.  Only the sech instance is implemented:
the numeric coefficients are specific to that density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .models import DataMatrix
from .theory import DomainError, lss_threshold_sech

__all__ = [
    "LssStatistic",
    "LssIndeterminateError",
    "pretransform_sech",
    "lss_statistic",
    "lss_decide",
]


class LssIndeterminateError(RuntimeError):
    """An eigenvalue shift in the log determinant was non-positive.

    A rare finite-N edge fluctuation, not a bug; callers should record the
    replicate as indeterminate rather than as a decision.
    """

    def __init__(self, eigenvalue: float, shift: float):
        super().__init__(
            f"non-positive determinant factor {shift:.6g} at eigenvalue {eigenvalue:.6g}"
        )
        self.eigenvalue = eigenvalue
        self.shift = shift


@dataclass(frozen=True)
class LssStatistic:
    value: float
    omega: float
    threshold: float
    decision: Literal["accept_H0", "reject_H0"]


def pretransform_sech(M: DataMatrix) -> DataMatrix:
    """Entrywise sqrt(2/N) * tanh(pi * sqrt(N) * M_ij / 2)."""
    if not M.symmetric:
        raise ValueError("pretransform requires a symmetric matrix")
    N = M.dim
    out = math.sqrt(2.0 / N) * np.tanh(0.5 * math.pi * math.sqrt(N) * M.values)
    return DataMatrix(out, symmetric=True)


def lss_statistic(Mt: DataMatrix, omega: float) -> float:
    """The four-term statistic on the pre-transformed matrix.

    -log det((1+a)I - sqrt(a) Mt) + a*N/2 + (pi*sqrt(omega)/(2*sqrt(2))) Tr Mt
    + (a/2)(Tr Mt^2 - N), with a = pi^2 * omega / 8.
    """
    if not Mt.symmetric:
        raise ValueError("statistic requires a symmetric matrix")
    a = math.pi**2 * omega / 8.0
    if not 0.0 <= a < 1.0:
        raise DomainError("omega outside the admissible LSS range", 8.0 / math.pi**2)
    N = Mt.dim
    eigs = np.linalg.eigvalsh(Mt.values)
    shifts = (1.0 + a) - math.sqrt(a) * eigs
    if np.any(shifts <= 0.0):
        i = int(np.argmin(shifts))
        raise LssIndeterminateError(float(eigs[i]), float(shifts[i]))
    tr = float(eigs.sum())
    tr2 = float((eigs**2).sum())
    return float(
        -np.log(shifts).sum()
        + math.pi**2 * omega * N / 16.0
        + (math.pi * math.sqrt(omega) / (2.0 * math.sqrt(2.0))) * tr
        + (math.pi**2 * omega / 16.0) * (tr2 - N)
    )


def lss_decide(value: float, omega: float) -> LssStatistic:
    """Accept the null iff the statistic does not exceed the threshold."""
    threshold = lss_threshold_sech(omega)
    decision = "accept_H0" if value <= threshold else "reject_H0"
    return LssStatistic(value=value, omega=omega, threshold=threshold, decision=decision)
