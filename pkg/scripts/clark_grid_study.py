#!/usr/bin/env python3
"""Table of predictable-representation residuals as the compensator grid
refines, for the squared terminal count of a unit-rate path on [0, 1].

The residual should shrink roughly like one over the square of the cell
count; the linear terminal count is included as a zero baseline.
"""

import argparse

from poissoncalc import PathGrid
from poissoncalc.clark import (UNIT_SPACE, clark_residual,
                               linear_count_projection,
                               squared_count_projection)
from poissoncalc.estimates import McSpec
from poissoncalc.functionals import region_count, total_count


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--grids", type=int, nargs="+",
                        default=[8, 16, 32, 64, 128])
    parser.add_argument("--n-outer", type=int, default=5000)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    square = region_count(UNIT_SPACE, UNIT_SPACE.full_region(),
                          transform=lambda c: float(c * c), label="N1^2")
    linear = total_count(UNIT_SPACE)
    print(f"{'cells':>6} {'residual(N1^2)':>16} {'stderr':>10} "
          f"{'residual(N1)':>14}")
    for cells in args.grids:
        mc = McSpec(args.n_outer, args.seed + cells)
        sq = clark_residual(square, 1.0, mc, PathGrid(cells),
                            projection=squared_count_projection(1.0))
        ln = clark_residual(linear, 1.0, mc, PathGrid(cells),
                            projection=linear_count_projection(1.0))
        print(f"{cells:>6} {sq.mean:>16.3e} {sq.stderr:>10.2e} "
              f"{ln.mean:>14.3e}")


if __name__ == "__main__":
    main()
