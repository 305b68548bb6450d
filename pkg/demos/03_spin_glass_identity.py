"""Finite-N spin-glass structure behind the limit law, made concrete.

Builds the A/B/C coefficient matrices for one small null matrix, checks
the exact partition-function factorization log Z = log zeta + sum log
cosh(A_ij/N) by brute force, and enumerates simple cycles to show how
the loop expansion reconstructs zeta.

Run:  python3 demos/03_spin_glass_identity.py
"""

import math

import numpy as np

from spiked_detect.density import builtin_sech
from spiked_detect.models import SpikedModelConfig, sample_wigner, substream
from spiked_detect.sg_verify import (
    compute_abc,
    loop_expansion,
    z_bruteforce,
    zeta_bruteforce,
)

N, OMEGA, SEED = 10, 0.3, 3

sech = builtin_sech()
cfg = SpikedModelConfig(N=N, lam=0.0, off_density=sech)
M = sample_wigner(cfg, substream(SEED, 0))
abc = compute_abc(M, OMEGA, sech)

print(f"N={N}, omega={OMEGA}, sech noise")
print(f"max|A| = {np.abs(abc.A).max():.4f}  (order sqrt(N))")
print(f"max|B| = {np.abs(abc.B).max():.2e}  (order 1/N)")
print(f"max|C| = {np.abs(abc.C).max():.2e}  (order 1/N^2)\n")

log_z = math.log(z_bruteforce(abc.A))
log_zeta = math.log(zeta_bruteforce(abc.A))
iu = np.triu_indices(N, k=1)
log_cosh = float(np.log(np.cosh(abc.A[iu] / N)).sum())
print(f"log Z                      = {log_z:.12f}")
print(f"log zeta + sum log cosh    = {log_zeta + log_cosh:.12f}")
print(f"residual                   = {abs(log_z - log_zeta - log_cosh):.2e}\n")

loops = loop_expansion(abc.A, k_max=6)
print("cycle sums xi_k (loop expansion of zeta):")
for k, xi in sorted(loops.xi.items()):
    print(f"  k={k}: xi_k = {xi:+.6e}")
print(f"prod over cycles of (1 + w)  = {loops.prod_one_plus_w:.10f}")
print(f"zeta by brute force          = {math.exp(log_zeta):.10f}")
print(
    "\nThe product over simple cycles already matches zeta to several "
    "digits at this size; the residual is carried by non-simple even "
    "subgraphs, which are higher order in 1/N."
)
