"""Dense theta sweep of the sqrt-CNOT intermediate map next to its closed form."""

import argparse
import math

import numpy as np

from redmap import reporting as rp
from redmap import scenarios as sc


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=400)
    ap.add_argument("--out", default="results/sqrtcnot_dense.csv")
    args = ap.parse_args()
    rows = []
    for theta in np.linspace(0.0, math.pi / 2, args.n):
        rep = sc.scenario_sqrtcnot(float(theta))
        lo, hi = rep.pair
        ref = sc.sqrtcnot_closed_form(float(theta))
        rows.append((float(theta), float(lo), float(hi), float(ref[0]), float(ref[1]), rep.verdict))
    header = ("theta", "lambda_minus", "lambda_plus", "closed_minus", "closed_plus", "verdict")
    print(rp.atomic_write(args.out, rp.to_csv(header, rows)))
    print(f"worst residual {max(max(abs(r[1] - r[3]), abs(r[2] - r[4])) for r in rows):.2e}")


if __name__ == "__main__":
    main()
