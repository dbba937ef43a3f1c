"""Seeded batch: jitter of 5-run sliding-window ensembles vs. single runs.

Each scenario synthesizes 14 runs; ensembles over windows 1-5 .. 10-14 give
10 versions, compared against the last 10 single runs.
"""

import argparse
import random
import statistics

from jitterlab import RunCollection, aggregate_jitter, window_ensembles
from jitterlab.simulator import SimSpec, synthesize_runs


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenarios", type=int, default=100)
    ap.add_argument("--rho", type=float, nargs="+", default=[0.0, 0.25, 0.5, 0.75, 1.0])
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    print(f"{'rho':>5}  {'single J (%)':>12}  {'ensemble J (%)':>14}")
    for rho in args.rho:
        rnd = random.Random(args.seed)
        single, ens = [], []
        for _ in range(args.scenarios):
            n = rnd.randint(100, 200)
            correct = [rnd.randint(int(0.75 * n), int(0.9 * n)) for _ in range(14)]
            spec = SimSpec.from_counts(n, rnd.randint(2, 10), correct, rho, seed=rnd.getrandbits(64))
            coll = synthesize_runs(spec)
            single.append(aggregate_jitter(RunCollection(coll.eval_set, coll.runs[4:])))
            ens.append(aggregate_jitter(window_ensembles(coll, 5)))
        print(f"{rho:>5}  {100 * statistics.fmean(single):>12.2f}  {100 * statistics.fmean(ens):>14.2f}")


if __name__ == "__main__":
    main()
