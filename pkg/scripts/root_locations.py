"""CSV of the roots of P_n next to the cosine closed form."""

import argparse
import csv
import sys

from mldegree.exactpoly import cosine_roots, pn, poly_roots_numeric


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=20)
    args = ap.parse_args()
    w = csv.writer(sys.stdout)
    w.writerow(["n", "k", "numeric_re", "numeric_im", "closed_form", "abs_error"])
    for n in range(2, args.max_n + 1):
        got = sorted(poly_roots_numeric(pn(n)), key=lambda z: z.real)
        for k, (z, c) in enumerate(zip(got, cosine_roots(n))):
            w.writerow([n, k, repr(z.real), repr(z.imag), repr(c), f"{abs(z - c):.3e}"])


if __name__ == "__main__":
    main()
