#!/usr/bin/env python3
"""Cube distance experiment: MSE against the exact cube distance and solve time
per solver and grid step, next to the published reference values."""

import argparse

from midfield.experiments import REFERENCE, SOLVER_NAMES, cube_mse


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--h", type=float, nargs="+", default=[0.2, 0.1, 0.05, 0.025, 0.0125])
    ap.add_argument("--solvers", nargs="+", default=list(SOLVER_NAMES), choices=SOLVER_NAMES)
    args = ap.parse_args()
    print(f"{'h':>9} {'solver':>6} {'mse':>12} {'ref mse':>12} {'solve s':>8} {'ref s':>8} {'fixed':>7}")
    for h in args.h:
        for s in args.solvers:
            r = cube_mse(h, s)
            ref = REFERENCE["cube_mse"][s].get(h, float("nan"))
            ref_t = REFERENCE["cube_time"][s].get(h, float("nan"))
            print(f"{h:9.6g} {s:>6} {r['mse']:12.5e} {ref:12.5e} {r['time_solve']:8.3f} {ref_t:8.3f} {r['n_fixed']:7d}",
                  flush=True)


if __name__ == "__main__":
    main()
