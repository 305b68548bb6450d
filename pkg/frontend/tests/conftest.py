import csv
import math

import numpy as np
import pytest


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


@pytest.fixture
def theory_csv(tmp_path):
    """Small synthetic theory table with the expected column layout."""
    path = tmp_path / "theory.csv"
    rows = []
    for omega in (0.0, 0.1, 0.2, 0.3, 0.4):
        rho = 0.7 * omega**2  # any smooth nonnegative curve works here
        err = math.erfc(math.sqrt(rho / 2.0)) if rho > 0 else 1.0
        rows.append([omega, rho, err, err, 1.2337 * omega])
    _write_csv(path, ["omega", "rho", "err_lr", "err_lss", "eff_snr"], rows)
    return path


@pytest.fixture
def samples_csv(tmp_path):
    """Synthetic log-LR samples: 60 per (omega, hypothesis) for two omegas."""
    path = tmp_path / "loglr_samples.csv"
    rng = np.random.default_rng(5)
    rows = []
    for omega in (0.3, 0.4):
        rho = 0.7 * omega**2
        for hypothesis, sign in (("H0", -1.0), ("H1", 1.0)):
            draws = rng.normal(sign * rho, math.sqrt(2 * rho), size=60)
            for rep, value in enumerate(draws):
                rows.append([omega, hypothesis, rep, value])
    _write_csv(path, ["omega", "hypothesis", "replicate", "loglr"], rows)
    return path


@pytest.fixture
def curves_csv(tmp_path):
    path = tmp_path / "curves.csv"
    rows = [
        [0.1, "lr_mc", 0.95, 0.02, 0.96, 0],
        [0.2, "lr_mc", 0.88, 0.03, 0.90, 0],
        [0.3, "lr_mc", 0.80, 0.03, 0.82, 0],
    ]
    _write_csv(
        path,
        ["omega", "test", "err_empirical", "err_se", "err_theory", "n_indeterminate"],
        rows,
    )
    return path
