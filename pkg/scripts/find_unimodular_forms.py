"""List positive-definite unimodular ternary forms whose reductions mod p match a support pattern.

Pattern letters per entry (b11, b12, b13, b22, b23, b33): 'u' unit mod p, 'p' divisible by p.
"""

import argparse
import itertools
import json

from triplel.siegel import det, is_positive_definite, sym_from_six

PATTERNS = {"1": "upppup", "2": "puupup"}


def matches(six, pattern, p):
    return all((x % p != 0) == (c == "u") for x, c in zip(six, pattern))


def search(pattern: str, p: int, bound: int, limit: int):
    out = []
    rng = range(-bound, bound + 1)
    for six in itertools.product(range(1, bound + 1), rng, rng, range(1, bound + 1), rng, range(1, bound + 1)):
        if not matches(six, pattern, p):
            continue
        B = sym_from_six(six)
        if det(B) == 1 and is_positive_definite(B):
            out.append(list(six))
            if len(out) >= limit:
                break
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--phi", choices=sorted(PATTERNS), default="1")
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--bound", type=int, default=7)
    ap.add_argument("--limit", type=int, default=12)
    args = ap.parse_args()
    print(json.dumps(search(PATTERNS[args.phi], args.p, args.bound, args.limit)))


if __name__ == "__main__":
    main()
