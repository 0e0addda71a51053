"""CLI: ``plots --kind efficiency --in sweep.csv --out fig2.png``."""

from __future__ import annotations

import argparse
import sys

from .render import FigureSpec, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plots", description=__doc__)
    parser.add_argument("--kind", required=True, choices=("efficiency", "fringes"))
    parser.add_argument("--in", dest="input_csv", required=True, help="input CSV path")
    parser.add_argument("--out", dest="output_image", required=True, help="output image path")
    log = parser.add_mutually_exclusive_group()
    log.add_argument("--log-y", dest="log_y", action="store_true", default=None)
    log.add_argument("--no-log-y", dest="log_y", action="store_false")
    parser.add_argument("--title", default="")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(
        input_csv=args.input_csv,
        figure_kind=args.kind,
        output_image=args.output_image,
        log_y=args.log_y,
        title=args.title,
    )
    try:
        keys = render(spec)
    except SchemaError as exc:
        print(f"plots: schema error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"plots: i/o error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.output_image} ({len(keys)} series: {', '.join(keys)})")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
