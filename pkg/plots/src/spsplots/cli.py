"""plot-curves: render energy-curve CSVs to PNG and SVG figures."""

from __future__ import annotations

import argparse
import sys

from .curves import PlotDataError, PlotSpec, plot_curve


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot-curves",
        description="Render energy-curve CSV files (columns c,lambda,converged,...) "
                    "into publication-style figures: c vertical, lambda horizontal.",
    )
    parser.add_argument("inputs", nargs="+", help="curve CSV files")
    parser.add_argument("--cstar", type=float, default=None,
                        help="threshold energy; drawn as a dashed horizontal line")
    parser.add_argument("--lambda-tilde1", type=float, default=None,
                        help="limiting coupling marker (vertical dashed line)")
    parser.add_argument("--lambda1", type=float, default=None,
                        help="first-eigenvalue marker on the lambda axis (r = q)")
    parser.add_argument("--labels", default=None,
                        help="comma-separated legend labels, one per input")
    parser.add_argument("--title", default=None)
    parser.add_argument("--out", required=True, help="output path; .png and .svg are written")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    labels = tuple(args.labels.split(",")) if args.labels else None
    spec = PlotSpec(
        inputs=tuple(args.inputs),
        out=args.out,
        c_star=args.cstar,
        lambda_tilde_1=args.lambda_tilde1,
        lambda_1=args.lambda1,
        title=args.title,
        labels=labels,
    )
    try:
        written = plot_curve(spec)
    except PlotDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
