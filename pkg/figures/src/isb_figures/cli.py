"""figures <family> --in results.csv --out fig.svg"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .plots import FigureFamily, FigureSpec, render
from .schema import EmptySelectionError, SchemaError

EXIT_USAGE = 2
EXIT_SCHEMA = 3
EXIT_EMPTY = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Render a figure family from sweep result CSVs",
    )
    parser.add_argument(
        "family", choices=[f.value for f in FigureFamily],
        help="figure family to render",
    )
    parser.add_argument("--in", dest="input_csv", required=True,
                        help="results.csv (distributions.csv for distribution_check)")
    parser.add_argument("--out", dest="output", required=True,
                        help="output image path (.svg)")
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    spec = FigureSpec(
        figure_family=FigureFamily(args.family),
        input_csv=Path(args.input_csv),
        output=Path(args.output),
    )
    try:
        render(spec)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except EmptySelectionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(spec.output)
    return 0


def entry() -> None:  # console-script shim
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
