"""Fiber sizes over the identity for cycles, with timing and worst membership residual."""

import argparse
import time

from mldegree.cyclefiber import enumerate_fiber, fiber_count_formula


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=11)
    args = ap.parse_args()
    print(f"{'n':>3} {'count':>7} {'formula':>8} {'max residual':>13} {'seconds':>8}")
    for n in range(4, args.max_n + 1):
        t = time.perf_counter()
        pts = enumerate_fiber(n)
        dt = time.perf_counter() - t
        worst = max(p.residual for p in pts)
        print(f"{n:>3} {len(pts):>7} {fiber_count_formula(n):>8} {worst:>13.2e} {dt:>8.2f}")


if __name__ == "__main__":
    main()
