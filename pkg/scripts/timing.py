#!/usr/bin/env python3
"""Solve wall time per solver on the lattice cube; initialization is excluded.

Absolute times depend on the machine, only the ordering is meaningful.
"""

import argparse

from midfield.experiments import SOLVER_NAMES, solve_timings
from midfield.io_cli import write_metrics_json
from midfield.scenes import cube


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--h", type=float, default=0.00625)
    ap.add_argument("--solvers", nargs="+", default=list(SOLVER_NAMES), choices=SOLVER_NAMES)
    ap.add_argument("--metrics", help="write the timings to this JSON file")
    args = ap.parse_args()
    scene = cube(args.h)
    times = solve_timings(scene, args.solvers)
    for name, t in sorted(times.items(), key=lambda kv: kv[1]):
        print(f"{name:>4} {t:9.3f} s")
    if args.metrics:
        write_metrics_json(args.metrics, {"scene": "cube", "h": args.h, "dims": scene.grid().dims,
                                          "solve_seconds": times})


if __name__ == "__main__":
    main()
