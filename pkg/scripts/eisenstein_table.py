"""Fourier coefficients of the degree-three Siegel Eisenstein series built from both test functions.

For each coefficient the (2 pi i)-exponent and the rational remainder are listed separately.
"""

import argparse
import json

from triplel.cli import DEFAULT_BS
from triplel.siegel import eis_fourier_assemble, sym_from_six
from triplel.zeta import build_phi


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ell", type=int, default=4)
    ap.add_argument("--q", type=int, default=3)
    args = ap.parse_args()
    out = []
    for variant in (1, 2):
        Phi = build_phi(variant, args.q)
        for six in DEFAULT_BS:
            val = eis_fourier_assemble(args.ell, sym_from_six(six), (args.q, Phi))
            row = {"phi": variant, "B": list(six), "value": val.serialize()}
            if not val.is_zero():
                E, rest = val.split_two_pi_i()
                row.update(two_pi_i_exponent=str(E), remainder=rest.serialize())
            out.append(row)
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
