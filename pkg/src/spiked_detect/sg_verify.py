"""Finite-N checks of the spin-glass decomposition behind the limit law.

The log LR decomposes, after Taylor expansion of each pair term, into a
quadratic spin-glass piece driven by a matrix A plus deterministic-given-B
corrections.  This module builds the A/B/C matrices from the score ratios,
brute-forces the partition function Z and its product form zeta at small N,
and enumerates simple cycles to check the loop expansion of zeta and its
second-moment law.  Everything here is exact finite-N arithmetic or
statistics with explicit tolerances; no asymptotics are assumed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._enumerate import pair_average_log
from .density import NoiseDensity, builtin_gaussian, builtin_sech, compute_info
from .models import DataMatrix, SpikedModelConfig, sample_wigner, substream

__all__ = [
    "ABCDecomposition",
    "LoopExpansion",
    "compute_abc",
    "z_bruteforce",
    "zeta_bruteforce",
    "zeta_prime",
    "loop_expansion",
    "even_subgraph_expansion",
    "expected_tanh2",
    "run_suite",
    "BRUTEFORCE_N_LIMIT",
    "LOOP_N_LIMIT",
]

BRUTEFORCE_N_LIMIT = 16
LOOP_N_LIMIT = 14
_CYCLE_COUNT_GUARD = 10**8


@dataclass(frozen=True)
class ABCDecomposition:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    omega: float


@dataclass(frozen=True)
class LoopExpansion:
    """Per-length cycle sums xi_k, the squared sum eta, and prod(1 + w)."""

    xi: dict[int, float]
    eta: float
    prod_one_plus_w: float
    k_max: int


def _symmetrize_zero_diag(X: np.ndarray) -> np.ndarray:
    X = 0.5 * (X + X.T)
    np.fill_diagonal(X, 0.0)
    return X


def compute_abc(M: DataMatrix, omega: float, density: NoiseDensity) -> ABCDecomposition:
    """The A, B, C matrices of the pairwise Taylor expansion.

    For a symmetric observation the entries are built from the score
    ratios P_s = p^(s)(sqrt(N) M_ij) / p(sqrt(N) M_ij); for an asymmetric
    observation each pair combines the (i, j) and (j, i) ratios, which is
    the starred variant of the same expansion.
    """
    if omega < 0:
        raise ValueError("omega must be nonnegative")
    N = M.dim
    w = math.sqrt(N) * M.values
    P = [None] + [density.ratio(s, w) for s in range(1, 5)]
    for s in range(1, 5):
        if not np.all(np.isfinite(P[s])):
            raise ValueError("density vanished while computing score ratios")

    def combine(expr: np.ndarray) -> np.ndarray:
        # symmetric data: expr already symmetric; asymmetric: add the mirror
        return expr if M.symmetric else expr + expr.T

    P1, P2, P3, P4 = P[1], P[2], P[3], P[4]
    A = -math.sqrt(omega * N) * combine(
        P1 + (omega / (6.0 * N)) * (P3 - 3.0 * P1 * P2 + 2.0 * P1**3)
    )
    B = (omega / (2.0 * N)) * combine(P2 - P1**2)
    C = (omega**2 / (24.0 * N**2)) * combine(
        P4 - 3.0 * P2**2 - 4.0 * P1 * P3 + 12.0 * P1**2 * P2 - 6.0 * P1**4
    )
    return ABCDecomposition(
        A=_symmetrize_zero_diag(A),
        B=_symmetrize_zero_diag(B),
        C=_symmetrize_zero_diag(C),
        omega=omega,
    )


def _check_bruteforce_size(A: np.ndarray) -> int:
    N = A.shape[0]
    if N > BRUTEFORCE_N_LIMIT:
        raise ValueError(f"brute force refused for N={N} > {BRUTEFORCE_N_LIMIT}")
    return N


def z_bruteforce(A: np.ndarray) -> float:
    """Z = 2^{-N} sum_x exp(sum_{i<j} A_ij x_i x_j), x_i = +-1/sqrt(N)."""
    N = _check_bruteforce_size(A)
    t = np.asarray(A, dtype=float) / N
    return math.exp(pair_average_log(t, -t))


def zeta_bruteforce(A: np.ndarray) -> float:
    """zeta = 2^{-N} sum_x prod_{i<j} (1 + N x_i x_j tanh(A_ij/N))."""
    N = _check_bruteforce_size(A)
    th = np.tanh(np.asarray(A, dtype=float) / N)
    return math.exp(pair_average_log(np.log1p(th), np.log1p(-th)))


def zeta_prime(A: np.ndarray) -> float:
    """sum_{i<j} (A_ij^2 / 2N^2 - A_ij^4 / 12N^4)."""
    A = np.asarray(A, dtype=float)
    N = A.shape[0]
    iu = np.triu_indices(N, k=1)
    a = A[iu]
    return float((a**2 / (2.0 * N**2) - a**4 / (12.0 * N**4)).sum())


def _cycle_count(N: int, k_max: int) -> float:
    return sum(math.perm(N, k) / (2 * k) for k in range(3, k_max + 1))


def _iter_cycles(N: int, k_max: int):
    """Simple cycles as vertex tuples, each counted once.

    Canonical form: the cycle starts at its smallest vertex and the second
    vertex is smaller than the last, which kills both rotations and the
    reflection.
    """
    for base in range(N):
        higher = range(base + 1, N)
        for k in range(3, k_max + 1):
            for rest in itertools.permutations(higher, k - 1):
                if rest[0] < rest[-1]:
                    yield (base,) + rest


def loop_expansion(A: np.ndarray, k_max: int) -> LoopExpansion:
    """Enumerate simple cycles of length 3..k_max and their weights.

    Weights are w(cycle) = prod of tanh(A_ij/N) over the cycle's edges.
    """
    A = np.asarray(A, dtype=float)
    N = A.shape[0]
    if N > LOOP_N_LIMIT:
        raise ValueError(f"cycle enumeration refused for N={N} > {LOOP_N_LIMIT}")
    k_max = min(k_max, N)
    if _cycle_count(N, k_max) > _CYCLE_COUNT_GUARD:
        raise ValueError("estimated cycle count exceeds the enumeration guard")
    th = np.tanh(A / N)
    xi = {k: 0.0 for k in range(3, k_max + 1)}
    eta = 0.0
    log_prod = 0.0
    for cyc in _iter_cycles(N, k_max):
        w = th[cyc[-1], cyc[0]]
        for u, v in zip(cyc[:-1], cyc[1:]):
            w *= th[u, v]
        xi[len(cyc)] += w
        eta += w * w
        log_prod += math.log1p(w)
    return LoopExpansion(xi=xi, eta=eta, prod_one_plus_w=math.exp(log_prod), k_max=k_max)


def even_subgraph_expansion(A: np.ndarray) -> float:
    """sum of prod tanh(A_ij/N) over all simple subgraphs with even degrees.

    Independent combinatorial evaluation of zeta; exponential in the edge
    count, so restricted to N <= 5.
    """
    A = np.asarray(A, dtype=float)
    N = A.shape[0]
    if N > 5:
        raise ValueError("even-subgraph enumeration restricted to N <= 5")
    th = np.tanh(A / N)
    edges = [(i, j) for i in range(N) for j in range(i + 1, N)]
    total = 0.0
    for mask in range(1 << len(edges)):
        deg = [0] * N
        w = 1.0
        for e, (i, j) in enumerate(edges):
            if mask >> e & 1:
                deg[i] += 1
                deg[j] += 1
                w *= th[i, j]
        if all(d % 2 == 0 for d in deg):
            total += w
    return total


def expected_tanh2(N: int, omega: float, density: NoiseDensity) -> float:
    """E[tanh^2(A_12/N)] for a null off-diagonal entry, by quadrature.

    This is the exact finite-N ingredient of the cycle second-moment law
    E[xi_k^2] = P(N,k)/(2k) * E[tanh^2(A_12/N)]^k.
    """
    from .density import _symmetric_quad

    def integrand(x):
        p1 = density.ratio(1, x)
        p2 = density.ratio(2, x)
        p3 = density.ratio(3, x)
        a = -math.sqrt(omega * N) * (
            p1 + (omega / (6.0 * N)) * (p3 - 3.0 * p1 * p2 + 2.0 * p1**3)
        )
        return np.tanh(a / N) ** 2 * density.pdf(x)

    return _symmetric_quad(integrand, density.support_halfwidth, 1e-12)


# ---------------------------------------------------------------------------
# named verification suites (exposed on the command line)

def _suite_identity(seed: int) -> dict:
    """log Z = log zeta + sum log cosh(A_ij/N) on random small instances."""
    worst = 0.0
    count = 0
    instances = []
    for d_index, density in enumerate((builtin_gaussian(), builtin_sech())):
        for w_index, omega in enumerate((0.1, 0.3)):
            for rep in range(25):
                rng = substream(seed, d_index, w_index, rep)
                N = int(rng.integers(3, 11))
                cfg = SpikedModelConfig(N=N, lam=0.0, off_density=density)
                M = sample_wigner(cfg, rng)
                abc = compute_abc(M, omega, density)
                iu = np.triu_indices(N, k=1)
                residual = abs(
                    math.log(z_bruteforce(abc.A))
                    - math.log(zeta_bruteforce(abc.A))
                    - float(np.log(np.cosh(abc.A[iu] / N)).sum())
                )
                worst = max(worst, residual)
                count += 1
                instances.append(
                    {"density": density.name, "omega": omega, "N": N, "residual": residual}
                )
    return {
        "suite": "identity",
        "instances": count,
        "max_residual": worst,
        "tolerance": 1e-9,
        "passed": worst < 1e-9,
        "details": instances,
    }


def _suite_loops(seed: int) -> dict:
    """Second-moment law of the length-3 cycle sum at N=12, sech noise."""
    density = builtin_sech()
    N, k, draws = 12, 3, 400
    omega = 0.5 / compute_info(density).F  # effective SNR 0.5
    cfg = SpikedModelConfig(N=N, lam=0.0, off_density=density)
    xi_sq = np.empty(draws)
    for rep in range(draws):
        rng = substream(seed, rep)
        M = sample_wigner(cfg, rng)
        abc = compute_abc(M, omega, density)
        xi_sq[rep] = loop_expansion(abc.A, k).xi[k] ** 2
    predicted = math.perm(N, k) / (2 * k) * expected_tanh2(N, omega, density) ** k
    mean = float(xi_sq.mean())
    se = float(xi_sq.std(ddof=1) / math.sqrt(draws))
    return {
        "suite": "loops",
        "N": N,
        "k": k,
        "draws": draws,
        "omega": omega,
        "sample_mean_xi_sq": mean,
        "predicted": predicted,
        "se": se,
        "z_score": (mean - predicted) / se,
        "passed": abs(mean - predicted) <= 3.0 * se,
    }


def _suite_abc_scaling(seed: int) -> dict:
    """Entry-magnitude scaling of A, B, C under the null as N grows."""
    density = builtin_sech()
    omega = 0.3
    eps = 0.2
    rows = []
    passed = True
    for i, N in enumerate((50, 100, 200)):
        rng = substream(seed, i)
        cfg = SpikedModelConfig(N=N, lam=0.0, off_density=density)
        M = sample_wigner(cfg, rng)
        abc = compute_abc(M, omega, density)
        ratios = {
            "A": float(np.abs(abc.A).max()) / N ** (0.5 + eps),
            "B": float(np.abs(abc.B).max()) / N ** (-1.0 + eps),
            "C": float(np.abs(abc.C).max()) / N ** (-2.0 + eps),
        }
        rows.append({"N": N, **ratios})
        passed = passed and all(v < 5.0 for v in ratios.values())
    return {
        "suite": "abc-scaling",
        "omega": omega,
        "epsilon": eps,
        "bound": 5.0,
        "scaled_max_entries": rows,
        "passed": passed,
    }


def run_suite(name: str, seed: int = 7) -> dict:
    """Run a named verification suite; returns pass/fail plus residuals."""
    suites = {
        "identity": _suite_identity,
        "loops": _suite_loops,
        "abc-scaling": _suite_abc_scaling,
    }
    if name not in suites:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(suites)}")
    return suites[name](seed)
