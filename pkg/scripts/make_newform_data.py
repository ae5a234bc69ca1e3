"""Write newform JSON files used by the CLI examples.

11a: a_p = p - #{(x, y) mod p : y^2 + y = x^3 - x^2 - 10x - 20}, weight 2, level 11.
delta: tau(p) from q prod (1 - q^n)^24, weight 12, level 1.
"""

import argparse
import json
from pathlib import Path

from triplel.localfield import is_prime


def ap_11a(p: int) -> int:
    count = 0
    squares = {}
    for y in range(p):
        v = (y * y + y) % p
        squares[v] = squares.get(v, 0) + 1
    for x in range(p):
        count += squares.get((x ** 3 - x ** 2 - 10 * x - 20) % p, 0)
    return p - count


def tau_table(bound: int) -> list:
    coeffs = [0] * (bound + 1)
    coeffs[0] = 1
    for n in range(1, bound + 1):
        for _ in range(24):
            for i in range(bound, n - 1, -1):
                coeffs[i] -= coeffs[i - n]
    return [0] + coeffs[:bound]  # tau(n) = coefficient of q^(n-1) in prod (1 - q^n)^24


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--bound", type=int, default=200)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    primes = [p for p in range(2, args.bound + 1) if is_prime(p)]
    e11 = {"label": "11a", "k": 2, "N": 11, "chi": "trivial",
           "ap": [[p, ap_11a(p)] for p in primes if p != 11]}
    tau = tau_table(args.bound)
    delta = {"label": "delta", "k": 12, "N": 1, "chi": "trivial", "ap": [[p, tau[p]] for p in primes]}
    toy = {"label": "toy", "k": 2, "N": 11, "chi": "trivial", "ap": [[2, -2]]}
    for name, doc in (("11a.json", e11), ("delta.json", delta), ("toy.json", toy)):
        (out / name).write_text(json.dumps(doc) + "\n")
        print(f"wrote {out / name}")


if __name__ == "__main__":
    main()
