#!/usr/bin/env python3
"""g_bar / ln n and h_bar * sqrt(n / ln n) at powers of ten."""
import argparse
import math

from andrica_lab.gaps import RunningAccumulator, gap_chunks
from andrica_lab.sieve import nth_prime


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-exp", type=int, default=6, help="largest n = 10^max_exp")
    args = ap.parse_args()

    targets = {10**e for e in range(1, args.max_exp + 1)}
    acc = RunningAccumulator()
    print(f"{'n':>10} {'p_(n+1)':>12} {'g_bar/ln n':>11} {'h_bar*sqrt(n/ln n)':>19}")
    for chunk in gap_chunks(nth_prime(10**args.max_exp + 1)):
        block = acc.fold(chunk)
        for i, n in enumerate(block.n.tolist()):
            if n in targets:
                ln = math.log(n)
                print(f"{n:>10} {int(block.q[i]):>12} {block.g_bar[i] / ln:>11.5f} "
                      f"{block.h_bar[i] * math.sqrt(n / ln):>19.5f}")


if __name__ == "__main__":
    main()
