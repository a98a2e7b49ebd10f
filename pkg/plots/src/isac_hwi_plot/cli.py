"""`isac-hwi-plot`: turn one scenario CSV into one figure image.

Exit codes: 0 success, 2 schema/argument error, 3 output I/O error.
"""

import argparse
import os
import sys

import matplotlib.pyplot as plt

from .render import FIGURE_KINDS, FigureSpec, SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="isac-hwi-plot",
        description="Render isac-hwi scenario CSV tables into figures.")
    parser.add_argument("--csv", required=True, help="input scenario CSV")
    parser.add_argument("--kind", required=True, choices=FIGURE_KINDS,
                        help="figure kind")
    parser.add_argument("--out", required=True, help="output image path (png)")
    args = parser.parse_args(argv)

    if not os.path.exists(args.csv):
        print(f"error: no such CSV: {args.csv}", file=sys.stderr)
        return 2
    spec = FigureSpec(scenario_csv=args.csv, figure_kind=args.kind,
                      output_image=args.out)
    try:
        fig = render(spec)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: cannot write figure: {exc}", file=sys.stderr)
        return 3
    plt.close(fig)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
