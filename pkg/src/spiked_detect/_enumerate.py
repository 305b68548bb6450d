"""Exact averages over the Rademacher hypercube.

Many quantities here have the form

    2^{-N} * sum over sign vectors s of exp( c0 + sum_{i<j} t_{ij}(s_i s_j) )

where each pair term takes one of two values depending on the sign product.
Writing t = mean + (s_i s_j) * delta turns the exponent into a quadratic
form, so a whole chunk of sign vectors can be evaluated with one matrix
product instead of a per-configuration loop.
"""

from __future__ import annotations

import numpy as np

__all__ = ["pair_average_log", "pair_form", "pair_exponents", "sign_chunk"]


def sign_chunk(start: int, stop: int, nbits: int) -> np.ndarray:
    """Sign vectors (+-1) for configuration indices [start, stop)."""
    idx = np.arange(start, stop, dtype=np.uint64)[:, None]
    bits = (idx >> np.arange(nbits, dtype=np.uint64)[None, :]) & np.uint64(1)
    return 1.0 - 2.0 * bits.astype(float)


def pair_form(
    t_plus: np.ndarray, t_minus: np.ndarray, const: float = 0.0
) -> tuple[float, np.ndarray]:
    """Rewrite sum_{i<j} t_{+-}[i,j] as c0 + 0.5 * s^T delta s.

    Splitting each pair term into its sign-free mean and sign-carrying
    half-difference gives a quadratic form in the sign vector s, which
    vectorizes over many sign vectors at once.
    """
    t_plus = np.asarray(t_plus, dtype=float)
    t_minus = np.asarray(t_minus, dtype=float)
    mean = 0.5 * (t_plus + t_minus)
    delta = 0.5 * (t_plus - t_minus)
    np.fill_diagonal(mean, 0.0)
    np.fill_diagonal(delta, 0.0)
    c0 = const + 0.5 * mean.sum()  # sum over i<j of the sign-free part
    return c0, delta


def pair_exponents(signs: np.ndarray, c0: float, delta: np.ndarray) -> np.ndarray:
    """Evaluate c0 + 0.5 * s^T delta s for each row s of ``signs``."""
    return c0 + 0.5 * np.einsum("ci,ij,cj->c", signs, delta, signs, optimize=True)


def pair_average_log(
    t_plus: np.ndarray,
    t_minus: np.ndarray,
    const: float = 0.0,
    fix_first: bool = False,
    chunk: int = 1 << 15,
) -> float:
    """log of 2^{-N} sum_s exp(const + sum_{i<j} t_{+-}[i,j]).

    ``t_plus`` / ``t_minus`` are symmetric N x N arrays giving each pair's
    exponent contribution when s_i s_j = +1 / -1 (diagonals ignored).  With
    ``fix_first`` only configurations with s_1 = +1 are enumerated and the
    count halved, which equals the full average by global spin-flip symmetry.
    """
    N = np.asarray(t_plus).shape[0]
    c0, delta = pair_form(t_plus, t_minus, const)

    nbits = N - 1 if fix_first else N
    total = 1 << nbits

    running_max = -np.inf
    running_sum = 0.0
    for start in range(0, total, chunk):
        stop = min(start + chunk, total)
        s = sign_chunk(start, stop, nbits)
        if fix_first:
            s = np.hstack([np.ones((s.shape[0], 1)), s])
        expo = pair_exponents(s, c0, delta)
        m = expo.max()
        if m > running_max:
            running_sum *= np.exp(running_max - m)
            running_max = m
        running_sum += np.exp(expo - running_max).sum()
    return running_max + np.log(running_sum) - nbits * np.log(2.0)
