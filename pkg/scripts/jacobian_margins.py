"""Smallest singular value of the smoothness Jacobian over each regular fiber orbit."""

import argparse

import numpy as np

from mldegree.cyclefiber import enumerate_fiber, jacobian_regularity
from mldegree.graphs import cycle_graph


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=8)
    args = ap.parse_args()
    for n in range(4, args.max_n + 1):
        g = cycle_graph(n)
        for p in enumerate_fiber(n):
            # one representative per orbit
            if not p.regular or p.signs != (1,) * n:
                continue
            chk = jacobian_regularity(np.asarray(p.matrix, dtype=complex), g)
            x = complex(p.x)
            print(f"n={n} {p.family:<8} x={x.real:+.6f}{x.imag:+.6f}j "
                  f"sigma_min={chk.min_singular_value:.3e} regular={chk.regular}")


if __name__ == "__main__":
    main()
