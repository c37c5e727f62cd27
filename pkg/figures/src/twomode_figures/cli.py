"""Figure rendering front end.

    render <kind> --in INPUT --out IMAGE [--points JSON] [--value COLUMN]
                  [--no-overlays] [--xlim LO HI] [--ylim LO HI]

Kinds: heatmap | cut | spectrum | trajectory.  Inputs are twomode CLI
outputs and must carry its comment-header contract; schema mismatches
exit nonzero.
"""

from __future__ import annotations

import argparse
import sys

from .io import SchemaError
from .render import FigureSpec, render


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="render", description="Render twomode output files to images.")
    parser.add_argument("kind", choices=("heatmap", "cut", "spectrum", "trajectory"))
    parser.add_argument("--in", dest="input", required=True, help="input CSV from the twomode CLI")
    parser.add_argument("--out", required=True, help="output image path (png)")
    parser.add_argument("--points", default=None, help="critical-points JSON for overlays (heatmap)")
    parser.add_argument("--value", default="sel_energy", help="heatmap colour column")
    parser.add_argument("--no-overlays", action="store_true")
    parser.add_argument("--xlim", nargs=2, type=float, default=None)
    parser.add_argument("--ylim", nargs=2, type=float, default=None)
    args = parser.parse_args(argv)

    spec = FigureSpec(
        kind=args.kind,
        input=args.input,
        out=args.out,
        points=args.points,
        value=args.value,
        overlays=not args.no_overlays,
        x_range=tuple(args.xlim) if args.xlim else None,
        y_range=tuple(args.ylim) if args.ylim else None,
    )
    try:
        out = render(spec)
    except (SchemaError, OSError) as exc:
        print(f"render: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
