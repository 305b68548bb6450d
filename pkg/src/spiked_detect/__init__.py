"""Detection laboratory for rank-one spiked Wigner and spiked IID matrices.

Submodules
----------
density    noise densities, derivatives, samplers, information functionals
models     spike priors, noise matrices, spiked observations
lr         exact and Monte Carlo log likelihood ratios
theory     closed-form limiting laws and error curves
lss        linear-spectral-statistics detector (sech noise)
pca        entrywise-transformed PCA detectors
sg_verify  finite-N checks of the spin-glass decomposition
harness    replicated experiments, aggregation, CSV/JSON reports
"""

from . import density, harness, lr, lss, models, pca, sg_verify, theory

__all__ = [
    "density",
    "models",
    "lr",
    "theory",
    "lss",
    "pca",
    "sg_verify",
    "harness",
]

__version__ = "0.1.0"
