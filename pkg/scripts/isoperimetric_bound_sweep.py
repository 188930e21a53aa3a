#!/usr/bin/env python3
"""Sweep the total mass of the base space and tabulate, for each mass, the
family minimum of the boundary-gradient ratios against the proven lower and
upper bounds for the matching isoperimetric constants.

Writes a plot-ready CSV to stdout or --out.
"""

import argparse
import csv
import math
import sys

from poissoncalc import (QuadSpec, Region, build_box_space, count_event,
                         isoperimetric_profile)
from poissoncalc.estimates import McSpec
from poissoncalc.profiles import ratio_lower_bound


def event_family(space):
    full = space.full_region()
    half = Region((0.0,), (0.5 * space.sides[0],))
    events = []
    for k in (0, 1, 2):
        events.append(count_event(space, full, "=", k))
    for k in (1, 2):
        events.append(count_event(space, full, ">=", k))
        events.append(count_event(space, half, ">=", k))
    return events


def upper_bound(p, mass):
    if p == 1:
        return 4.0 + 4.0 * math.sqrt(mass)
    if math.isinf(p):
        return 4.0 / mass + 4.0 / math.sqrt(mass)
    return None


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--masses", type=float, nargs="+",
                        default=[0.25, 0.5, 1.0, 2.0])
    parser.add_argument("--n-outer", type=int, default=20000)
    parser.add_argument("--seed", type=int, default=2024)
    parser.add_argument("--out", default=None)
    args = parser.parse_args()

    mc = McSpec(args.n_outer, args.seed)
    quad = QuadSpec(32, seed=args.seed + 1)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    writer = csv.writer(fh)
    writer.writerow(["mass", "p", "family_min_ratio", "lower_bound",
                     "upper_bound", "n_included"])
    for mass in args.masses:
        space = build_box_space(1, [1.0], mass)
        family = event_family(space)
        for p in (1.0, 2.0, math.inf):
            table = isoperimetric_profile(space, family, p, "full", 1.0, mc,
                                          quad)
            included = sum(not r.excluded for r in table.rows)
            writer.writerow([mass, p, f"{table.family_min:.6f}",
                             ratio_lower_bound(p, "full", mass),
                             upper_bound(p, mass), included])
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
