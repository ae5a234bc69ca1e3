"""Partial triple-product L-values over a range of prime cuts, against the tail bound."""

import argparse
from fractions import Fraction

import mpmath

from triplel.cli import ingest_newform, partial_lvalue, tail_bound


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("newforms", nargs="+")
    ap.add_argument("--s", default="2")
    ap.add_argument("--cuts", type=int, nargs="+", default=[10, 20, 50, 100])
    ap.add_argument("--prec", type=int, default=128)
    args = ap.parse_args()
    forms = [ingest_newform(p) for p in args.newforms]
    forms = forms * 3 if len(forms) == 1 else forms
    s = Fraction(args.s)
    with mpmath.workprec(args.prec):
        for P in args.cuts:
            value, used = partial_lvalue(forms, s, P)
            print(f"P={P:4d} primes={len(used):3d} L_P={mpmath.nstr(value.real, 20)} "
                  f"log-tail<={mpmath.nstr(tail_bound(P, s), 6)}")


if __name__ == "__main__":
    main()
