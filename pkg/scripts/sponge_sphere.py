#!/usr/bin/env python3
"""Tracked FSM on the sponge and sphere clouds: the plain cloud initialization
leaves source gaps, the enlarged one labels every voxel."""

import argparse
import json

from midfield.experiments import sponge_sphere_gap


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--h", type=float, default=0.025)
    print(json.dumps(sponge_sphere_gap(ap.parse_args().h), indent=2, default=str))


if __name__ == "__main__":
    main()
