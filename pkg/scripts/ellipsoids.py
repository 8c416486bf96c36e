#!/usr/bin/env python3
"""Five ellipsoid clouds: count voxels whose tracked label differs from the
brute-force nearest dataset where that choice is clear by more than 2h."""

import argparse
import json

from midfield.experiments import SOLVER_NAMES, ellipsoid_voronoi


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--h", type=float, default=0.02)
    ap.add_argument("--solvers", nargs="+", default=list(SOLVER_NAMES), choices=SOLVER_NAMES)
    args = ap.parse_args()
    print(json.dumps(ellipsoid_voronoi(args.h, args.solvers), indent=2))


if __name__ == "__main__":
    main()
