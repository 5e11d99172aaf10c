#!/usr/bin/env python3
"""Estimate how often a random 2-coloring of pairs from [n] has a monochromatic h-set.

For each n in the range, draws seeded colorings and reports the fraction for
which ``find_homogeneous`` returns a verified homogeneous set.
"""

import argparse
import itertools

import numpy as np

from ultracomb.patterns import find_homogeneous


def hit_rate(n: int, h: int, trials: int, seed: int) -> float:
    pairs = list(itertools.combinations(range(n), 2))
    hits = 0
    for t in range(trials):
        table = dict(zip(pairs, np.random.default_rng([seed, n, t]).integers(0, 2, len(pairs)).tolist()))
        found = find_homogeneous(table.__getitem__, 2, n, h, colors=(0, 1))
        if found is not None:
            H, c = found
            assert all(table[p] == c for p in itertools.combinations(sorted(H), 2))
            hits += 1
    return hits / trials


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--h", type=int, default=3)
    ap.add_argument("--n-min", type=int, default=3)
    ap.add_argument("--n-max", type=int, default=7)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print(f"{'n':>4} {'hit rate':>9}")
    for n in range(args.n_min, args.n_max + 1):
        print(f"{n:>4} {hit_rate(n, args.h, args.trials, args.seed):>9.3f}")


if __name__ == "__main__":
    main()
