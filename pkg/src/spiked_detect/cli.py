"""Command-line entry points.

Subcommands: info, sample, lr, theory, lss, pca, verify, fig2.  Matrices
travel as plain CSV (one row per line, full square); structured results
are printed as JSON.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .density import check_ibp_identities, compute_info, get_density
from .harness import ExperimentConfig, export, run_experiment
from .lr import loglr_exact, loglr_mc
from .lss import LssIndeterminateError, lss_decide, lss_statistic, pretransform_sech
from .models import (
    DataMatrix,
    SpikedModelConfig,
    add_spike,
    sample_noise,
    sample_spike,
    substream,
)
from .pca import pca_detect
from .sg_verify import run_suite
from .theory import (
    DomainError,
    effective_snr,
    limiting_error,
    lss_error_sech,
    rho_iid,
    rho_wigner,
)

__all__ = ["main"]


def _write_matrix(path: str, M: DataMatrix) -> None:
    np.savetxt(path, M.values, delimiter=",", fmt="%.17g")


def _read_matrix(path: str) -> DataMatrix:
    values = np.loadtxt(path, delimiter=",", ndmin=2)
    if values.shape[0] != values.shape[1]:
        raise SystemExit(f"matrix in {path} is not square: shape {values.shape}")
    symmetric = bool(np.array_equal(values, values.T))
    return DataMatrix(values, symmetric=symmetric)


def _parse_grid(spec: str) -> list[float]:
    """Grid syntax: 'start:stop:step' (stop inclusive) or 'a,b,c'."""
    if ":" in spec:
        start, stop, step = (float(tok) for tok in spec.split(":"))
        n = int(round((stop - start) / step))
        return [round(start + i * step, 12) for i in range(n + 1)]
    return [float(tok) for tok in spec.split(",")]


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _cmd_info(args) -> int:
    density = get_density(args.density)
    info = compute_info(density)
    _emit(
        {
            "density": density.name,
            "F": info.F,
            "F_d": info.F_d,
            "G": info.G,
            "G_tilde": info.G_tilde,
            "I_cross": info.I_cross,
            "residuals": check_ibp_identities(density),
        }
    )
    return 0


def _cmd_sample(args) -> int:
    density = get_density(args.density)
    config = SpikedModelConfig(
        N=args.n, lam=args.lam, kind=args.kind, prior=args.prior, off_density=density
    )
    rng = substream(args.seed, 0)
    data = sample_noise(config, rng)
    if args.lam > 0:
        spike = sample_spike(args.prior, args.n, substream(args.seed, 1))
        data = add_spike(data, args.lam, spike)
    _write_matrix(args.out, data)
    return 0


def _cmd_lr(args) -> int:
    density = get_density(args.density)
    data = _read_matrix(args.infile)
    kind = args.kind or ("wigner" if data.symmetric else "iid")
    config = SpikedModelConfig(
        N=data.dim, lam=args.omega, kind=kind, prior=args.prior, off_density=density
    )
    if args.mode == "exact":
        result = loglr_exact(data, args.omega, config)
    else:
        result = loglr_mc(data, args.omega, config, args.n_mc, substream(args.seed, 0))
    _emit(asdict(result))
    return 0


def _cmd_theory(args) -> int:
    density = get_density(args.density)
    info = compute_info(density)
    rho_fn = rho_wigner if args.model == "wigner" else rho_iid
    rows = []
    for omega in _parse_grid(args.omega_grid):
        try:
            rho = rho_fn(omega, info)
            err_lr = limiting_error(rho)
        except DomainError:
            rho = math.nan
            err_lr = math.nan
        try:
            err_lss = lss_error_sech(omega) if args.density == "sech" else math.nan
        except DomainError:
            err_lss = math.nan
        rows.append(
            {
                "omega": omega,
                "rho": rho,
                "err_lr": err_lr,
                "err_lss": err_lss,
                "eff_snr": effective_snr(omega, info.F, args.model),
            }
        )
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["omega", "rho", "err_lr", "err_lss", "eff_snr"]
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(row[c]) for c in header])
    return 0


def _cmd_lss(args) -> int:
    data = _read_matrix(args.infile)
    try:
        value = lss_statistic(pretransform_sech(data), args.omega)
    except LssIndeterminateError as exc:
        _emit({"indeterminate": True, "omega": args.omega, "reason": str(exc)})
        return 1
    _emit(asdict(lss_decide(value, args.omega)))
    return 0


def _cmd_pca(args) -> int:
    density = get_density(args.density)
    data = _read_matrix(args.infile)
    result = pca_detect(
        data, density, args.model, threshold_offset=args.delta, omega=args.omega
    )
    _emit(asdict(result))
    return 0


def _cmd_verify(args) -> int:
    result = run_suite(args.suite, args.seed)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(result, fh, indent=2)
            fh.write("\n")
    summary = {k: v for k, v in result.items() if k not in ("details",)}
    _emit(summary)
    return 0 if result["passed"] else 1


def _cmd_fig2(args) -> int:
    config = ExperimentConfig(
        N=args.n,
        omega_grid=tuple(_parse_grid(args.omega)),
        replicates=args.reps,
        n_mc=args.n_mc,
        density=args.density,
        prior=args.prior,
        tests=("lr_mc",),
        master_seed=args.seed,
        worker_count=args.workers,
        max_density_evals=args.max_density_evals,
    )
    report = run_experiment(config)
    paths = export(report, args.out_dir)
    # theoretical curves on the same grid for downstream plotting
    theory_args = argparse.Namespace(
        density=args.density,
        model="wigner",
        omega_grid=args.omega,
        out=str(Path(args.out_dir) / "theory.csv"),
    )
    _cmd_theory(theory_args)
    _emit({name: str(path) for name, path in paths.items()})
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spiked-detect",
        description="Detection laboratory for rank-one spiked random matrices",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", help="print information functionals of a density")
    p.add_argument("--density", required=True)
    p.set_defaults(func=_cmd_info)

    p = sub.add_parser("sample", help="sample a (possibly spiked) matrix to CSV")
    p.add_argument("--kind", choices=["wigner", "iid"], default="wigner")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p.add_argument("--density", default="sech")
    p.add_argument("--prior", choices=["rademacher", "spherical"], default="rademacher")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("lr", help="log likelihood ratio of a stored matrix")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--density", default="sech")
    p.add_argument("--mode", choices=["exact", "mc"], default="mc")
    p.add_argument("--n-mc", type=int, default=100_000)
    p.add_argument("--prior", choices=["rademacher", "spherical"], default="rademacher")
    p.add_argument("--kind", choices=["wigner", "iid"], default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_lr)

    p = sub.add_parser("theory", help="tabulate limiting error curves to CSV")
    p.add_argument("--density", default="sech")
    p.add_argument("--model", choices=["wigner", "iid"], default="wigner")
    p.add_argument("--omega-grid", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_theory)

    p = sub.add_parser("lss", help="spectral-statistics test of a stored matrix")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--omega", type=float, required=True)
    p.set_defaults(func=_cmd_lss)

    p = sub.add_parser("pca", help="transformed-PCA detection on a stored matrix")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--density", default="sech")
    p.add_argument("--model", choices=["wigner", "iid"], default="wigner")
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--omega", type=float, default=None)
    p.set_defaults(func=_cmd_pca)

    p = sub.add_parser("verify", help="run a finite-N verification suite")
    p.add_argument("--suite", choices=["identity", "loops", "abc-scaling"], required=True)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("fig2", help="replicated error-curve experiment")
    p.add_argument("--n", type=int, default=32)
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--n-mc", type=int, default=10_000)
    p.add_argument("--omega", default="0:0.5:0.05")
    p.add_argument("--density", default="sech")
    p.add_argument("--prior", choices=["rademacher", "spherical"], default="rademacher")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--max-density-evals", type=float, default=1e9)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_fig2)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
