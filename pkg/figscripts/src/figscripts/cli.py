"""render_figs <csv-dir> <out-dir> [--panels 1c,2a,...]"""

from __future__ import annotations

import argparse
import sys

from .csvdata import SchemaError
from .panels import PANELS, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render_figs",
        description="Regenerate figure panels from simulation CSV files.",
    )
    parser.add_argument("csv_dir", help="directory holding the CSV outputs")
    parser.add_argument("out_dir", help="directory for the rendered images")
    parser.add_argument(
        "--panels",
        default=",".join(sorted(PANELS)),
        help="comma-separated panel ids (default: all)",
    )
    args = parser.parse_args(argv)

    panels = [p.strip() for p in args.panels.split(",") if p.strip()]
    unknown = [p for p in panels if p not in PANELS]
    if unknown:
        print(f"unknown panels: {', '.join(unknown)}; "
              f"available: {', '.join(sorted(PANELS))}", file=sys.stderr)
        return 2
    try:
        for panel in panels:
            out = render(panel, args.csv_dir, args.out_dir)
            print(f"fig{panel}: {out}")
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
