"""Figure rendering from the experiment CSV tables."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["FigureSpec", "plot_histograms", "plot_error_curves"]

_DPI = 150
# stripped so the PNG carries no tool/version metadata that could vary
_PNG_METADATA = {"Software": None}

MIN_SAMPLES = 30
MIN_BINS, MAX_BINS = 10, 60


@dataclass(frozen=True)
class FigureSpec:
    """Inputs and output of one figure.

    kind is "histogram" (uses samples + theory) or "error_curves" (uses
    curves + theory).  omegas selects histogram panels; empty means none.
    """

    kind: str
    out: str
    samples: str | None = None
    curves: tuple[str, ...] = ()
    curve_labels: tuple[str, ...] = ()
    theory: str | None = None
    omegas: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in ("histogram", "error_curves"):
            raise ValueError(f"unknown figure kind {self.kind!r}")


def _read_table(path: str | Path, required: list[str]) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for column in required:
            if column not in header:
                raise ValueError(f"{path}: missing required column {column!r}")
        return [row for row in reader]


def _read_theory(path: str | Path) -> dict[float, dict]:
    rows = _read_table(path, ["omega", "rho", "err_lr", "err_lss"])
    return {
        float(r["omega"]): {k: float(v) for k, v in r.items()} for r in rows
    }


def _fd_bin_count(samples: np.ndarray) -> int:
    """Freedman-Diaconis bin count clamped to [MIN_BINS, MAX_BINS]."""
    q75, q25 = np.percentile(samples, [75, 25])
    iqr = q75 - q25
    if iqr <= 0:
        return MIN_BINS
    width = 2.0 * iqr / len(samples) ** (1.0 / 3.0)
    count = int(math.ceil((samples.max() - samples.min()) / width))
    return max(MIN_BINS, min(MAX_BINS, count))


def _gauss_pdf(x: np.ndarray, mean: float, variance: float) -> np.ndarray:
    return np.exp(-((x - mean) ** 2) / (2.0 * variance)) / math.sqrt(
        2.0 * math.pi * variance
    )


def plot_histograms(spec: FigureSpec) -> Path | None:
    """Two-panel (H0/H1) log-LR histograms per omega with Gaussian overlays.

    The overlay for each panel is the centred limit N(-rho, 2 rho) under
    H0 and N(+rho, 2 rho) under H1, with rho read from the theory table.
    Returns the written path, or None for an empty omega selection.
    """
    if not spec.omegas:
        warnings.warn("empty omega selection: no histogram written")
        return None
    samples = _read_table(spec.samples, ["omega", "hypothesis", "replicate", "loglr"])
    theory = _read_theory(spec.theory)

    n_rows = len(spec.omegas)
    fig, axes = plt.subplots(
        n_rows, 2, figsize=(9.0, 3.0 * n_rows), squeeze=False, dpi=_DPI
    )
    for i, omega in enumerate(spec.omegas):
        if omega not in theory:
            raise ValueError(f"omega={omega} not present in {spec.theory}")
        rho = theory[omega]["rho"]
        for j, (hypothesis, sign) in enumerate((("H0", -1.0), ("H1", 1.0))):
            values = np.array(
                [
                    float(r["loglr"])
                    for r in samples
                    if float(r["omega"]) == omega and r["hypothesis"] == hypothesis
                ]
            )
            if len(values) < MIN_SAMPLES:
                raise ValueError(
                    f"need >= {MIN_SAMPLES} samples for {hypothesis} at "
                    f"omega={omega}, got {len(values)}"
                )
            ax = axes[i][j]
            ax.hist(
                values,
                bins=_fd_bin_count(values),
                density=True,
                color="C0",
                alpha=0.6,
                edgecolor="white",
            )
            if rho > 0:
                grid = np.linspace(
                    min(values.min(), sign * rho - 4 * math.sqrt(2 * rho)),
                    max(values.max(), sign * rho + 4 * math.sqrt(2 * rho)),
                    400,
                )
                ax.plot(grid, _gauss_pdf(grid, sign * rho, 2.0 * rho), "C3-", lw=1.5)
            ax.set_title(f"$\\omega={omega}$, {hypothesis}")
            ax.set_xlabel("log likelihood ratio")
            if j == 0:
                ax.set_ylabel("density")
    fig.tight_layout()
    out = Path(spec.out)
    fig.savefig(out, dpi=_DPI, metadata=_PNG_METADATA)
    plt.close(fig)
    return out


def plot_error_curves(spec: FigureSpec) -> Path:
    """Empirical error curves with SE bands plus the theoretical curves.

    One panel per curves file (e.g. one per spike prior).  Every omega in
    a curves file must appear in the theory grid; a mismatch error lists
    the missing values.
    """
    theory = _read_theory(spec.theory)
    panels = []
    for path in spec.curves:
        rows = _read_table(
            path, ["omega", "test", "err_empirical", "err_se", "err_theory"]
        )
        omegas = sorted({float(r["omega"]) for r in rows})
        missing = [w for w in omegas if w not in theory]
        if missing:
            raise ValueError(f"{path}: omegas missing from theory grid: {missing}")
        panels.append((path, rows, omegas))

    labels = spec.curve_labels or tuple(Path(p).stem for p in spec.curves)
    fig, axes = plt.subplots(
        1, len(panels), figsize=(5.0 * len(panels), 4.0), squeeze=False, dpi=_DPI
    )
    theory_grid = sorted(theory)
    for ax, (path, rows, omegas), label in zip(axes[0], panels, labels):
        for test in sorted({r["test"] for r in rows}):
            sub = sorted(
                (r for r in rows if r["test"] == test), key=lambda r: float(r["omega"])
            )
            x = np.array([float(r["omega"]) for r in sub])
            y = np.array([float(r["err_empirical"]) for r in sub])
            se = np.array([float(r["err_se"]) for r in sub])
            style = "o" if len(x) == 1 else "o-"
            ax.errorbar(x, y, yerr=se, fmt=style, color="C0", capsize=3,
                        label=f"empirical {test}")
        t_lr = np.array([theory[w]["err_lr"] for w in theory_grid])
        t_lss = np.array([theory[w]["err_lss"] for w in theory_grid])
        ax.plot(theory_grid, t_lr, "C3-", lw=1.5, label="theory LR")
        if np.any(np.isfinite(t_lss)):
            ax.plot(theory_grid, t_lss, "C2--", lw=1.5, label="theory LSS")
        ax.set_xlabel("$\\omega$")
        ax.set_ylabel("total error")
        ax.set_ylim(0.0, 1.05)
        ax.set_title(label)
        ax.legend(loc="lower left", fontsize=8)
    fig.tight_layout()
    out = Path(spec.out)
    fig.savefig(out, dpi=_DPI, metadata=_PNG_METADATA)
    plt.close(fig)
    return out
