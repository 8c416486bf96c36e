#!/usr/bin/env python3
"""Agreement between FSM and FMM, and between VDT and DP, on the builtin scenes."""

import argparse

from midfield.experiments import cross_solver
from midfield.scenes import BUILTIN, builtin


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenes", nargs="+", default=list(BUILTIN), choices=sorted(BUILTIN))
    ap.add_argument("--h", type=float, help="override each scene's default grid step")
    args = ap.parse_args()
    print(f"{'scene':>14} {'max|fsm-fmm|':>13} {'max|vdt-dp|':>12} {'vdt/dp frac>1e-9':>17}")
    for name in args.scenes:
        r = cross_solver(builtin(name, args.h))
        print(f"{name:>14} {r['fsm_fmm_max']:13.2e} {r['vdt_dp_max']:12.2e} {r['vdt_dp_frac_over']:17.2e}", flush=True)


if __name__ == "__main__":
    main()
