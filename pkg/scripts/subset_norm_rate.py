"""Fraction of random pure q-spin instances violating the subset-norm condition.

Compares the constant sqrt(6) with sqrt(6 q), which accounts for the roughly
q |S| n^(q-1) ordered index tuples that touch a subset S.
"""

import argparse
import math

from locconc.models import check_subset_condition, gen_pure_spin


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--q", type=int, default=4)
    ap.add_argument("--instances", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print("c_tilde,violating_instances,instances,max_ratio")
    for c in (math.sqrt(6), math.sqrt(6 * args.q)):
        bad = 0
        worst = 0.0
        for i in range(args.instances):
            rep = check_subset_condition(gen_pure_spin(args.n, args.q, args.seed + i), 0.5, c)
            bad += not rep.holds
            worst = max(worst, rep.max_ratio)
        print(f"{c!r},{bad},{args.instances},{worst!r}")


if __name__ == "__main__":
    main()
