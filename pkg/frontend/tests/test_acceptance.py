"""Acceptance gate for the figure package.

Regenerates both figure styles from experiment outputs produced through
the detection package's command-line interface (its external contract),
and checks that re-running yields byte-identical images.
"""

import shutil
import subprocess
import sys

import pytest


def _report(capsys, number, ok, detail):
    with capsys.disabled():
        print(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'} — {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def experiment_dir(tmp_path_factory):
    """A scaled-down error-curve experiment exported via the CLI."""
    if shutil.which("spiked-detect") is None:
        pytest.skip("spiked-detect CLI not installed")
    out_dir = tmp_path_factory.mktemp("run")
    res = subprocess.run(
        [
            "spiked-detect", "fig2",
            "--n", "16",
            "--reps", "40",
            "--n-mc", "2000",
            "--omega", "0.1,0.3,0.4",
            "--seed", "15",
            "--out-dir", str(out_dir),
        ],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0, res.stderr
    return out_dir


def test_criterion_15_regenerate_figures(capsys, tmp_path, experiment_dir):
    def render(tag):
        fig1 = tmp_path / f"fig1_{tag}.png"
        fig2 = tmp_path / f"fig2_{tag}.png"
        for args in (
            [
                "histogram",
                "--samples", str(experiment_dir / "loglr_samples.csv"),
                "--theory", str(experiment_dir / "theory.csv"),
                "--omega", "0.3,0.4",
                "--out", str(fig1),
            ],
            [
                "errors",
                "--curves", str(experiment_dir / "curves.csv"),
                "--theory", str(experiment_dir / "theory.csv"),
                "--out", str(fig2),
            ],
        ):
            res = subprocess.run(
                [sys.executable, "-m", "spiked_plots", *args],
                capture_output=True,
                text=True,
            )
            if res.returncode != 0:
                raise AssertionError(f"rendering failed: {res.stderr}")
        return fig1.read_bytes(), fig2.read_bytes()

    first = render("a")
    second = render("b")
    ok = first[0] == second[0] and first[1] == second[1]
    _report(
        capsys,
        15,
        ok,
        "histogram and error-curve figures regenerate from CLI-exported "
        "CSVs; re-run is byte-identical",
    )
