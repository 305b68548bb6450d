"""Replicated hypothesis-testing experiments and their reports.

Runs the enabled detectors over a grid of SNR values with fresh noise (and
a fresh spike under the alternative) per replicate, aggregates empirical
total errors with binomial standard errors next to the theoretical
curves, and serializes everything to JSON + CSV.  Results are bit-for-bit
deterministic for a given master seed regardless of the worker count:
every replicate owns a counter-keyed RNG substream and aggregation folds
in replicate order, never completion order.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np
from scipy import stats

from . import lr as lr_mod
from .density import compute_info, get_density
from .lss import LssIndeterminateError, lss_decide, lss_statistic, pretransform_sech
from .models import SpikedModelConfig, add_spike, sample_noise, sample_spike, substream
from .pca import pca_detect
from .theory import (
    DomainError,
    limiting_error,
    lss_error_sech,
    rho_iid,
    rho_wigner,
)

__all__ = [
    "ExperimentConfig",
    "ExperimentReport",
    "run_experiment",
    "normality_summary",
    "export",
    "THREADS_ENV_VAR",
]

THREADS_ENV_VAR = "SPIKED_DETECT_THREADS"

TestName = Literal["lr_mc", "lr_exact", "lss", "pca"]


@dataclass(frozen=True)
class ExperimentConfig:
    N: int
    omega_grid: tuple[float, ...]
    replicates: int
    n_mc: int = 10_000
    density: str = "sech"
    model: Literal["wigner", "iid"] = "wigner"
    prior: Literal["rademacher", "spherical"] = "rademacher"
    tests: tuple[TestName, ...] = ("lr_mc",)
    master_seed: int = 0
    worker_count: int = 1
    pca_delta: float = 0.1
    max_density_evals: float = 1e9

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.N < 1:
            raise ValueError("N must be positive")
        if not self.tests:
            raise ValueError("at least one test must be enabled")
        for t in self.tests:
            if t not in ("lr_mc", "lr_exact", "lss", "pca"):
                raise ValueError(f"unknown test {t!r}")
        if "lss" in self.tests and self.model != "wigner":
            raise ValueError("the LSS test is defined for the symmetric model only")


@dataclass
class ExperimentReport:
    config: dict
    records: list[dict]
    aggregates: list[dict]
    loglr_samples: list[dict]
    timing_seconds: float

    def canonical(self) -> dict:
        """Everything except execution details (timing, worker count),
        for determinism checks."""
        config = {k: v for k, v in self.config.items() if k != "worker_count"}
        return {
            "config": config,
            "records": self.records,
            "aggregates": self.aggregates,
            "loglr_samples": self.loglr_samples,
        }


def _resolve_workers(config: ExperimentConfig) -> int:
    env = os.environ.get(THREADS_ENV_VAR)
    if env:
        return max(1, int(env))
    return max(1, config.worker_count)


def _admissible_grid(config: ExperimentConfig, info) -> tuple[float, ...]:
    """Drop grid points outside any enabled theoretical curve's domain."""
    limit = math.inf
    if "lr_mc" in config.tests or "lr_exact" in config.tests:
        limit = min(
            limit,
            1.0 / info.F if config.model == "wigner" else 0.5 / info.F,
        )
    if "lss" in config.tests:
        limit = min(limit, 8.0 / math.pi**2)
    kept = tuple(w for w in config.omega_grid if 0.0 <= w < limit)
    if len(kept) != len(config.omega_grid):
        dropped = sorted(set(config.omega_grid) - set(kept))
        warnings.warn(f"clipped inadmissible omega values {dropped} (limit {limit:.6g})")
    return kept

def _estimate_density_evals(config: ExperimentConfig, n_omegas: int) -> float:
    per_matrix = config.N**2
    per_rep = per_matrix  # sampling
    if "lr_mc" in config.tests:
        # Rademacher spikes reuse precomputed pair terms; spherical spikes
        # evaluate the density once per (spike, entry)
        per_rep += per_matrix if config.prior == "rademacher" else config.n_mc * per_matrix
    if "lr_exact" in config.tests:
        per_rep += per_matrix + 2.0**config.N * config.N / 64.0  # flop-equivalents
    if "lss" in config.tests or "pca" in config.tests:
        per_rep += per_matrix
    return 2.0 * n_omegas * config.replicates * per_rep


def _theory_error(config: ExperimentConfig, info, test: TestName, omega: float) -> float:
    try:
        if test in ("lr_mc", "lr_exact"):
            rho = (
                rho_wigner(omega, info)
                if config.model == "wigner"
                else rho_iid(omega, info)
            )
            return limiting_error(rho)
        if test == "lss":
            return lss_error_sech(omega)
    except DomainError:
        return math.nan
    return math.nan  # no finite-N closed form for the PCA rule


def _run_replicate(
    config: ExperimentConfig,
    model_config: SpikedModelConfig,
    i_omega: int,
    omega: float,
    replicate: int,
) -> list[dict]:
    rows = []
    for hyp_index, hypothesis in enumerate(("H0", "H1")):
        noise_rng = substream(config.master_seed, i_omega, replicate, hyp_index, 0)
        spike_rng = substream(config.master_seed, i_omega, replicate, hyp_index, 1)
        mc_rng = substream(config.master_seed, i_omega, replicate, hyp_index, 2)

        data = sample_noise(model_config, noise_rng)
        if hypothesis == "H1":
            spike = sample_spike(config.prior, config.N, spike_rng)
            data = add_spike(data, omega, spike)

        for test in config.tests:
            row = {
                "omega": omega,
                "replicate": replicate,
                "hypothesis": hypothesis,
                "test": test,
                "statistic": math.nan,
                "decision": None,
                "indeterminate": False,
            }
            try:
                if test == "lr_mc":
                    res = lr_mod.loglr_mc(data, omega, model_config, config.n_mc, mc_rng)
                    row["statistic"] = res.log_lr
                    row["decision"] = "accept_H0" if res.log_lr <= 0.0 else "reject_H0"
                elif test == "lr_exact":
                    res = lr_mod.loglr_exact(data, omega, model_config)
                    row["statistic"] = res.log_lr
                    row["decision"] = "accept_H0" if res.log_lr <= 0.0 else "reject_H0"
                elif test == "lss":
                    value = lss_statistic(pretransform_sech(data), omega)
                    dec = lss_decide(value, omega)
                    row["statistic"] = dec.value
                    row["decision"] = dec.decision
                elif test == "pca":
                    det = pca_detect(
                        data,
                        model_config.off_density,
                        config.model,
                        threshold_offset=config.pca_delta,
                        omega=omega,
                    )
                    row["statistic"] = det.top_eigenvalue
                    row["decision"] = (
                        "reject_H0" if det.decision == "signal" else "accept_H0"
                    )
            except (LssIndeterminateError, ValueError) as exc:
                row["indeterminate"] = True
                row["error"] = str(exc)
            rows.append(row)
    return rows


def _binomial_se(p_hat: float, n: int) -> float:
    if n == 0:
        return math.nan
    return math.sqrt(p_hat * (1.0 - p_hat) / n)


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    t0 = time.perf_counter()
    density = get_density(config.density)
    info = compute_info(density)
    omegas = _admissible_grid(config, info)

    est = _estimate_density_evals(config, len(omegas))
    if est > config.max_density_evals:
        raise RuntimeError(
            f"estimated cost {est:.3g} density evaluations exceeds the ceiling "
            f"{config.max_density_evals:.3g}; raise max_density_evals to proceed"
        )

    workers = _resolve_workers(config)
    tasks = [
        (i, omega, rep)
        for i, omega in enumerate(omegas)
        for rep in range(config.replicates)
    ]

    def model_for(omega: float) -> SpikedModelConfig:
        return SpikedModelConfig(
            N=config.N,
            lam=omega,
            kind=config.model,
            prior=config.prior,
            off_density=density,
        )

    model_configs = {omega: model_for(omega) for omega in omegas}

    def run_task(task):
        i, omega, rep = task
        return _run_replicate(config, model_configs[omega], i, omega, rep)

    if workers == 1:
        per_task = [run_task(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_task = list(pool.map(run_task, tasks))

    # deterministic fold in task (omega-major, replicate) order
    records = [row for rows in per_task for row in rows]

    aggregates = []
    for omega in omegas:
        for test in config.tests:
            cell = [
                r for r in records if r["omega"] == omega and r["test"] == test
            ]
            n_indet = sum(r["indeterminate"] for r in cell)
            h0 = [r for r in cell if r["hypothesis"] == "H0" and not r["indeterminate"]]
            h1 = [r for r in cell if r["hypothesis"] == "H1" and not r["indeterminate"]]
            p_reject_h0 = (
                sum(r["decision"] == "reject_H0" for r in h0) / len(h0) if h0 else math.nan
            )
            p_accept_h1 = (
                sum(r["decision"] == "accept_H0" for r in h1) / len(h1) if h1 else math.nan
            )
            se0 = _binomial_se(p_reject_h0, len(h0)) if h0 else math.nan
            se1 = _binomial_se(p_accept_h1, len(h1)) if h1 else math.nan
            aggregates.append(
                {
                    "omega": omega,
                    "test": test,
                    "err_empirical": p_reject_h0 + p_accept_h1,
                    "err_se": math.hypot(se0, se1),
                    "err_theory": _theory_error(config, info, test, omega),
                    "n_indeterminate": n_indet,
                    "p_reject_given_h0": p_reject_h0,
                    "se_reject_given_h0": se0,
                    "p_accept_given_h1": p_accept_h1,
                    "se_accept_given_h1": se1,
                }
            )

    loglr_samples = [
        {
            "omega": r["omega"],
            "hypothesis": r["hypothesis"],
            "replicate": r["replicate"],
            "loglr": r["statistic"],
        }
        for r in records
        if r["test"] in ("lr_mc", "lr_exact") and not r["indeterminate"]
    ]

    cfg = asdict(config)
    cfg["omega_grid"] = list(omegas)
    cfg["tests"] = list(config.tests)
    cfg["rng_scheme"] = "philox(master_seed; omega_index, replicate, hypothesis, stream)"
    return ExperimentReport(
        config=cfg,
        records=records,
        aggregates=aggregates,
        loglr_samples=loglr_samples,
        timing_seconds=time.perf_counter() - t0,
    )


def normality_summary(report: ExperimentReport, omega: float) -> dict:
    """Moments of the log-LR samples against the limiting Gaussian targets."""
    density = get_density(report.config["density"])
    info = compute_info(density)
    rho = (
        rho_wigner(omega, info)
        if report.config["model"] == "wigner"
        else rho_iid(omega, info)
    )
    out = {"omega": omega, "rho": rho}
    for hypothesis, sign in (("H0", -1.0), ("H1", 1.0)):
        samples = np.array(
            [
                s["loglr"]
                for s in report.loglr_samples
                if s["omega"] == omega and s["hypothesis"] == hypothesis
            ]
        )
        if len(samples) < 30:
            raise ValueError(
                f"need >= 30 log-LR samples for {hypothesis} at omega={omega}, "
                f"got {len(samples)}"
            )
        degenerate = bool(np.all(samples == samples[0]))
        ks = math.nan
        if not degenerate and rho > 0:
            ks = float(
                stats.kstest(samples, "norm", args=(sign * rho, math.sqrt(2 * rho))).statistic
            )
        out[hypothesis] = {
            "mean": float(samples.mean()),
            "variance": float(samples.var(ddof=1)),
            "target_mean": sign * rho,
            "target_variance": 2.0 * rho,
            "n": int(len(samples)),
            "ks_distance": ks,
            "degenerate": degenerate,
        }
    return out


def _write_csv(path: Path, header: list[str], rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(row[c]) if isinstance(row[c], float) else row[c] for c in header])


def export(report: ExperimentReport, out_dir: str | Path) -> dict[str, Path]:
    """Write report.json, curves.csv, and loglr_samples.csv under out_dir.

    Floats in the CSVs use shortest round-trip decimal form, so re-reading
    reproduces the aggregate values bit-exactly.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "report": out_dir / "report.json",
        "curves": out_dir / "curves.csv",
        "loglr_samples": out_dir / "loglr_samples.csv",
    }
    try:
        with open(paths["report"], "w") as fh:
            json.dump(
                {**report.canonical(), "timing_seconds": report.timing_seconds},
                fh,
                indent=2,
            )
            fh.write("\n")
        _write_csv(
            paths["curves"],
            ["omega", "test", "err_empirical", "err_se", "err_theory", "n_indeterminate"],
            report.aggregates,
        )
        _write_csv(
            paths["loglr_samples"],
            ["omega", "hypothesis", "replicate", "loglr"],
            report.loglr_samples,
        )
    except OSError as exc:
        raise OSError(f"failed writing report files under {out_dir}: {exc}") from exc
    return paths
