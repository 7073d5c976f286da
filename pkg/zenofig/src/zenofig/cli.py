"""Command-line entry point: one subcommand per figure id.

``zenofig <figure-id> --in table.csv [--out image.png]``.  Exit codes:
0 success, 1 bad input (schema mismatch with column diff, or no data rows),
2 output I/O failure.
"""

from __future__ import annotations

import argparse
import sys

from .core import FIGURE_IDS, FigureSpec, NoDataError, SchemaError, render

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_IO = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zenofig", description=__doc__)
    sub = parser.add_subparsers(dest="figure_id", required=True)
    for figure_id in FIGURE_IDS:
        p = sub.add_parser(figure_id, help=f"render {figure_id}")
        p.add_argument("--in", dest="input_csv", required=True,
                       help="sweep-table CSV exported by the simulation CLI")
        p.add_argument("--out", dest="output_path",
                       default=f"{figure_id}.png",
                       help="output image path (default: <figure-id>.png)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(
        input_csv=args.input_csv,
        figure_id=args.figure_id,
        output_path=args.output_path,
    )
    try:
        out = render(spec)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NoDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {out}")
    return EXIT_OK


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
