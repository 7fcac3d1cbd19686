"""Measured error of the averaged-projector power polynomial over a grid of (n, a, s).

Prints CSV: n,m,a,s,locality,measured_eps,construction_bound.
"""

import argparse
import math

from locconc.approx import plus_defaults, plus_state_approx


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ns", type=int, nargs="+", default=[16, 64, 256, 1024, 4096, 65536])
    ap.add_argument("--scales", type=float, nargs="+", default=[0.5, 1.0, 2.0])
    args = ap.parse_args()
    print("n,m,a,s,locality,measured_eps,construction_bound")
    for n in args.ns:
        m, a0, s = plus_defaults(n)
        for scale in args.scales:
            a = min(s, max(1, math.ceil(scale * a0)))
            r = plus_state_approx(n, m, a, s)
            print(f"{n},{m},{a},{s},{r.locality},{r.measured_eps!r},{r.paper_eps_bound!r}")


if __name__ == "__main__":
    main()
