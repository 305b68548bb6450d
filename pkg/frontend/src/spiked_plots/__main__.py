"""Command line: `python -m spiked_plots histogram|errors ...`."""

from __future__ import annotations

import argparse
import sys

from .figures import FigureSpec, plot_error_curves, plot_histograms


def _parse_omegas(spec: str) -> tuple[float, ...]:
    if not spec:
        return ()
    return tuple(float(tok) for tok in spec.split(","))


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="spiked_plots", description="Figures from detection-experiment CSVs"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("histogram", help="log-LR histograms with Gaussian overlays")
    p.add_argument("--samples", required=True)
    p.add_argument("--theory", required=True)
    p.add_argument("--omega", default="", help="comma-separated panel selection")
    p.add_argument("--out", required=True)

    p = sub.add_parser("errors", help="empirical vs theoretical error curves")
    p.add_argument("--curves", required=True, action="append",
                   help="curves.csv; repeat for one panel per file")
    p.add_argument("--labels", default=None,
                   help="comma-separated panel titles, one per --curves")
    p.add_argument("--theory", required=True)
    p.add_argument("--out", required=True)

    args = parser.parse_args(argv)
    try:
        if args.command == "histogram":
            spec = FigureSpec(
                kind="histogram",
                samples=args.samples,
                theory=args.theory,
                omegas=_parse_omegas(args.omega),
                out=args.out,
            )
            plot_histograms(spec)
        else:
            labels = tuple(args.labels.split(",")) if args.labels else ()
            spec = FigureSpec(
                kind="error_curves",
                curves=tuple(args.curves),
                curve_labels=labels,
                theory=args.theory,
                out=args.out,
            )
            plot_error_curves(spec)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
