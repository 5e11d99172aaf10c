#!/usr/bin/env python3
"""Compare the density estimators on a family of seeded random sets.

Prints Schnirelmann, asymptotic and Banach estimates side by side with the
gap between the window scan and the nested formula.
"""

import argparse

import numpy as np

from ultracomb.intset import IntSet
from ultracomb.limits import (
    asymptotic_density_bounds,
    banach_density,
    banach_nested_tensor_formula,
    schnirelmann,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--bound", type=int, default=2048)
    ap.add_argument("--sets", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print(f"{'p':>5} {'schn':>6} {'d_low':>6} {'d_up':>6} {'bd_low':>6} {'bd_up':>6} {'gap':>7}")
    for i in range(args.sets):
        rng = np.random.default_rng([args.seed, i])
        p = float(rng.uniform(0.05, 0.95))
        A = IntSet(args.bound, rng.random(args.bound) < p)
        s, d = schnirelmann(A), asymptotic_density_bounds(A)
        bd, nested = banach_density(A), banach_nested_tensor_formula(A)
        gap = max(abs(bd.upper - nested.upper), abs(bd.lower - nested.lower))
        print(f"{p:>5.2f} {s.value:>6.3f} {d.lower:>6.3f} {d.upper:>6.3f} {bd.lower:>6.3f} {bd.upper:>6.3f} {gap:>7.4f}")


if __name__ == "__main__":
    main()
