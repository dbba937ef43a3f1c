"""Print the min/max jitter table for three runs at 90%, 91% and 92% accuracy."""

import argparse

from jitterlab.core import AccuracyProfile
from jitterlab.report import render_bounds_table


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--accuracies", type=float, nargs="+", default=[0.90, 0.91, 0.92])
    ap.add_argument("--n-examples", type=int, default=100)
    ap.add_argument("--places", type=int, default=1)
    args = ap.parse_args()
    names = [f"p{k + 1}" for k in range(len(args.accuracies))]
    prof = AccuracyProfile.from_accuracies(args.accuracies, args.n_examples, names)
    print(render_bounds_table(prof, args.places), end="")


if __name__ == "__main__":
    main()
