#!/usr/bin/env python3
"""Table of the generalised-exponent threshold n0 over a grid of x."""
import argparse

import numpy as np

from andrica_lab.generalized import threshold_n0


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--start", type=float, default=0.5)
    ap.add_argument("--stop", type=float, default=0.95)
    ap.add_argument("--step", type=float, default=0.01)
    args = ap.parse_args()

    print(f"{'x':>6} {'b':>10} {'n0':>22} {'ln crossing':>12}  always")
    for x in np.arange(args.start, args.stop + args.step / 2, args.step):
        x = round(float(x), 10)  # arange drift moves n0 at large thresholds
        a = threshold_n0(x)
        n0 = "> 2^63" if a.n0 is None else str(a.n0)
        lc = "" if a.log_crossing is None else f"{a.log_crossing:.6f}"
        print(f"{x:6.3f} {a.b:10.6f} {n0:>22} {lc:>12}  {a.always_holds}")


if __name__ == "__main__":
    main()
