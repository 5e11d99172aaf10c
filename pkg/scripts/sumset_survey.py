#!/usr/bin/env python3
"""Plant-and-recover survey for the general sumset detector.

Plants a configuration for each multiplicity tuple, runs the detector under a
node budget and prints recovery counts and timings.
"""

import argparse
import time

import numpy as np

from ultracomb.errors import SearchBudgetExceeded
from ultracomb.sumsets import SumsetSpec, find_general, plant_instance, verify_certificate


def parse_mult(text: str) -> tuple[int, ...]:
    return tuple(int(c) for c in text.split(","))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mult", type=parse_mult, action="append", help="multiplicity tuple such as 2,1 (repeatable)")
    ap.add_argument("--bound", type=int, default=256)
    ap.add_argument("--len", type=int, default=4, dest="length")
    ap.add_argument("--instances", type=int, default=20)
    ap.add_argument("--max-nodes", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=5)
    args = ap.parse_args()
    mults = args.mult or [(2,), (3,), (1, 1), (2, 1), (1, 1, 1), (1, 2, 2)]
    print(f"{'mult':>10} {'recovered':>10} {'total s':>8} {'worst s':>8}")
    for mult in mults:
        spec = SumsetSpec(mult)
        recovered, times = 0, []
        for i in range(args.instances):
            A, _ = plant_instance(spec, args.bound, args.length, np.random.default_rng([args.seed, i]))
            start = time.perf_counter()
            try:
                cert = find_general(A, spec, args.length, max_nodes=args.max_nodes)
            except SearchBudgetExceeded:
                cert = None
            times.append(time.perf_counter() - start)
            recovered += cert is not None and verify_certificate(A, cert).passed
        label = ",".join(map(str, mult))
        print(f"{label:>10} {recovered:>5}/{args.instances:<4} {sum(times):>8.2f} {max(times):>8.2f}")


if __name__ == "__main__":
    main()
