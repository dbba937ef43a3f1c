"""Compare exhaustive churn extrema against the accuracy-implied bounds.

For every (n, K, c_i, c_j) up to the limits, prints a summary per K: how often
the oracle min/max equal the bounds, and how often the max exceeds the bound.
"""

import argparse
from collections import Counter
from fractions import Fraction
from itertools import product

from jitterlab.metrics import pair_bounds, pair_max_attainable
from jitterlab.simulator import brute_force_churn_extrema


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=6)
    ap.add_argument("--classes", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--verbose", action="store_true", help="list every count pair whose max escapes the bound")
    args = ap.parse_args()
    for k in args.classes:
        tally = Counter()
        for n in range(1, args.max_n + 1):
            for ci, cj in product(range(n + 1), repeat=2):
                a_i, a_j = Fraction(ci, n), Fraction(cj, n)
                lo, hi = pair_bounds(a_i, a_j)
                o_lo, o_hi = brute_force_churn_extrema(n, k, (ci, cj))
                tally["cases"] += 1
                tally["min tight"] += o_lo == lo
                tally["max tight"] += o_hi == hi
                tally["max escapes"] += o_hi > hi
                tally["attainable formula holds"] += o_hi == pair_max_attainable(a_i, a_j, k)
                if args.verbose and o_hi > hi:
                    print(f"  K={k} n={n} counts=({ci},{cj}) oracle max={o_hi} bound={hi}")
        print(f"K={k}: " + ", ".join(f"{key} {v}" for key, v in tally.items()))


if __name__ == "__main__":
    main()
