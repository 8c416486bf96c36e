#!/usr/bin/env python3
"""Middle surface between two shifted wave sheets compared with z = 0.2 cos(xy)."""

import argparse
import json

from midfield.experiments import SOLVER_NAMES, wave_sheet_surface


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--h", type=float, default=0.025)
    ap.add_argument("--solver", default="fsm", choices=SOLVER_NAMES)
    ap.add_argument("--margin-cells", type=int, default=2)
    args = ap.parse_args()
    print(json.dumps(wave_sheet_surface(args.h, args.solver, args.margin_cells), indent=2))


if __name__ == "__main__":
    main()
