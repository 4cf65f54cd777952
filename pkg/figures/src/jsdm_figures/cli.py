"""render_figures <csv> --kind rate|fairness|precoders|threshold --out <png>"""

import argparse
import sys

from .render import KINDS, FigureSpec, SchemaError, render


def main(argv=None):
    parser = argparse.ArgumentParser(prog="render_figures", description=__doc__)
    parser.add_argument("csv", help="result CSV produced by the simulator")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--out", required=True, help="output PNG path")
    args = parser.parse_args(argv)
    try:
        path = render(FigureSpec(args.csv, args.kind, args.out))
    except SchemaError as exc:
        print("schema error: %s" % exc, file=sys.stderr)
        return 1
    except OSError as exc:
        print("io error: %s" % exc, file=sys.stderr)
        return 1
    print("wrote %s" % path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
