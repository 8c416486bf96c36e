#!/usr/bin/env python3
"""Middle surface between the unit cube mesh and a centred sphere cloud:
enclosed volume and area of the 0.5 isosurface per solver and grid step."""

import argparse

from midfield.experiments import REFERENCE, SOLVER_NAMES, cube_sphere_surface


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--h", type=float, nargs="+", default=[0.2, 0.1, 0.05, 0.025, 0.0125])
    ap.add_argument("--solvers", nargs="+", default=list(SOLVER_NAMES), choices=SOLVER_NAMES)
    args = ap.parse_args()
    print(f"{'h':>9} {'solver':>6} {'init':>9} {'volume':>9} {'ref':>9} {'area':>9} {'ref':>9} {'time s':>7}")
    for h in args.h:
        for s in args.solvers:
            r = cube_sphere_surface(h, s)
            rv, ra = REFERENCE["cube_sphere"][s].get(h, (float("nan"),) * 2)
            print(f"{h:9.6g} {s:>6} {r['init']:>9} {r['volume']:9.6f} {rv:9.6f} {r['area']:9.5f} {ra:9.5f} "
                  f"{r['time']:7.2f}", flush=True)


if __name__ == "__main__":
    main()
