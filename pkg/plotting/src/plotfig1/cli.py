"""CLI: plot_fig1 --csv r5.csv --csv r10.csv --out fig1.png"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .reader import SchemaError
from .render import PlotSpec, render_figure


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot_fig1",
        description="Render mean-distance curves with error bands from sweep CSVs",
    )
    parser.add_argument(
        "--csv",
        dest="csv_paths",
        type=Path,
        action="append",
        required=True,
        help="input results CSV; repeat for one panel per file",
    )
    parser.add_argument("--out", dest="output_path", type=Path, required=True)
    parser.add_argument(
        "--format",
        dest="image_format",
        choices=("png", "svg"),
        default=None,
        help="default: inferred from the output suffix, falling back to png",
    )
    parser.add_argument(
        "--band-stds",
        dest="band_stds",
        type=float,
        default=1.0,
        help="half-width of the shaded band in standard deviations",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    image_format = args.image_format
    if image_format is None:
        suffix = args.output_path.suffix.lower().lstrip(".")
        image_format = suffix if suffix in ("png", "svg") else "png"
    try:
        spec = PlotSpec(
            csv_paths=tuple(args.csv_paths),
            output_path=args.output_path,
            image_format=image_format,
            band_stds=args.band_stds,
        )
        out = render_figure(spec)
    except (SchemaError, ValueError, OSError) as exc:
        print(f"plot_fig1: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
