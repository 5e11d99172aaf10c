#!/usr/bin/env python3
"""Recompute the frozen oracle values in tests/data/oracles.json.

Every value here comes from code that shares nothing with the package:
scipy quadrature for integrals and plain Python loops for window and ratio
scans.  Run after changing an oracle definition, then review the diff.
"""

import argparse
import json
import math
from pathlib import Path

from scipy import integrate

OUT = Path(__file__).resolve().parent.parent / "tests" / "data" / "oracles.json"

# (name, N, membership rule over 1..N-1)
SETS = {
    "mod4_01_2048": (2048, lambda n: n % 4 in (0, 1)),
    "evens_2048": (2048, lambda n: n % 2 == 0),
    "interval_1000_1031_in_4096": (4096, lambda n: 1000 <= n < 1032),
    "odds_1000": (1000, lambda n: n % 2 == 1),
    "log2_even_4096": (4096, lambda n: n >= 1 and int(math.log2(n)) % 2 == 0),
}


def window_scan(members, N, n_max):
    """min_n max_x / max_n min_x of |A ∩ [x+1, x+n]| / n with windows inside [1, N)."""
    upper, lower = math.inf, -math.inf
    for n in range(1, n_max + 1):
        counts = [sum(members[x + 1 : x + n + 1]) for x in range(0, N - n)]
        upper = min(upper, max(counts) / n)
        lower = max(lower, min(counts) / n)
    return upper, lower


def ratio_scan(members, N):
    ratios, c = [], 0
    for n in range(1, N):
        c += members[n]
        ratios.append(c / n)
    half = (N - 1) // 2
    return {
        "schnirelmann": min(ratios),
        "suffix_min": min(ratios[half - 1 :]),
        "suffix_max": max(ratios[half - 1 :]),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--out", type=Path, default=OUT)
    args = ap.parse_args()

    quad = {
        "gauss": integrate.quad(lambda x: math.exp(-x * x), -math.inf, math.inf, epsabs=1e-13)[0],
        "cauchy": integrate.quad(lambda x: 1.0 / (1.0 + x * x), -math.inf, math.inf, epsabs=1e-13)[0],
        "unit_box": integrate.quad(lambda x: 1.0, 0.0, 1.0)[0],
    }
    densities = {}
    for name, (N, rule) in SETS.items():
        members = [0] + [int(rule(n)) for n in range(1, N)]
        n_max = (N - 1) // 8
        upper, lower = window_scan(members, N, n_max)
        densities[name] = {"N": N, "n_max": n_max, "banach_upper": upper, "banach_lower": lower, **ratio_scan(members, N)}
    doc = {"quad": quad, "densities": densities}
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
