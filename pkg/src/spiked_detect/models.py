"""Spike priors, Wigner / IID noise matrices, and spiked observations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .density import NoiseDensity, builtin_sech

__all__ = [
    "Spike",
    "DataMatrix",
    "SpikedModelConfig",
    "substream",
    "sample_spike",
    "sample_wigner",
    "sample_iid",
    "sample_noise",
    "add_spike",
]

Prior = Literal["rademacher", "spherical"]
ModelKind = Literal["wigner", "iid"]


def substream(master_seed: int, *path: int) -> np.random.Generator:
    """Counter-style substream: a generator keyed by (master_seed, path).

    The same (seed, path) always yields the same stream regardless of how
    work is split across processes, which is what makes the Monte Carlo
    harness reproducible under any worker count.
    """
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(path))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class Spike:
    """A length-N signal vector x with unit spectral weight."""

    entries: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class DataMatrix:
    """Dense N x N observation; ``symmetric`` marks the Wigner case."""

    values: np.ndarray
    symmetric: bool

    @property
    def dim(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class SpikedModelConfig:
    N: int
    lam: float
    kind: ModelKind = "wigner"
    prior: Prior = "rademacher"
    off_density: NoiseDensity = field(default_factory=builtin_sech)
    diag_density: NoiseDensity | None = None
    w2: float = 1.0

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be positive")
        if self.lam < 0:
            raise ValueError("lambda must be nonnegative")
        if self.diag_density is None:
            object.__setattr__(self, "diag_density", self.off_density)


def sample_spike(prior: Prior, N: int, rng: np.random.Generator) -> Spike:
    """Draw a spike: Rademacher signs / sqrt(N), or uniform on the sphere."""
    if N < 1:
        raise ValueError("N must be positive")
    if prior == "rademacher":
        signs = rng.integers(0, 2, size=N) * 2.0 - 1.0
        return Spike(signs / np.sqrt(N))
    if prior == "spherical":
        g = rng.standard_normal(N)
        return Spike(g / np.linalg.norm(g))
    raise ValueError(f"unknown prior {prior!r}")


def sample_wigner(config: SpikedModelConfig, rng: np.random.Generator) -> DataMatrix:
    """Symmetric noise: off-diagonals s/sqrt(N), diagonals sqrt(w2)*s_d/sqrt(N)."""
    if config.kind != "wigner":
        raise ValueError("config.kind must be 'wigner'")
    N = config.N
    upper = config.off_density.sample(rng, size=(N, N))
    H = np.triu(upper, 1)
    H = H + H.T
    np.fill_diagonal(H, np.sqrt(config.w2) * config.diag_density.sample(rng, size=N))
    return DataMatrix(H / np.sqrt(N), symmetric=True)


def sample_iid(config: SpikedModelConfig, rng: np.random.Generator) -> DataMatrix:
    """Fully asymmetric noise: all N^2 entries independent draws / sqrt(N)."""
    if config.kind != "iid":
        raise ValueError("config.kind must be 'iid'")
    N = config.N
    X = config.off_density.sample(rng, size=(N, N))
    return DataMatrix(X / np.sqrt(N), symmetric=False)


def sample_noise(config: SpikedModelConfig, rng: np.random.Generator) -> DataMatrix:
    return sample_wigner(config, rng) if config.kind == "wigner" else sample_iid(config, rng)


def add_spike(noise: DataMatrix, lam: float, spike: Spike) -> DataMatrix:
    """Form the observation noise + sqrt(lambda) * x x^T."""
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    if spike.dim != noise.dim:
        raise ValueError("spike and noise dimensions differ")
    x = spike.entries
    return DataMatrix(noise.values + np.sqrt(lam) * np.outer(x, x), noise.symmetric)
