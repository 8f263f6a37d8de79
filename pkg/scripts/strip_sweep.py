#!/usr/bin/env python3
"""Tabulate Lambda_mu against the sin^2 test-function bound and locate sigma."""
import argparse
import csv
import sys

import numpy as np

from payne_lab import strip_mode as sm


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mu-max", type=float, default=10.0)
    ap.add_argument("--samples", type=int, default=201)
    ap.add_argument("--variational", type=int, default=0,
                    help="also solve the finite-difference quotient with this many intervals")
    args = ap.parse_args()

    w = csv.writer(sys.stdout, lineterminator="\n")
    cols = ["mu", "Lambda_mu", "upper_bound"] + (["variational"] if args.variational else [])
    w.writerow(cols)
    for mu in np.linspace(0.0, args.mu_max, args.samples):
        row = [mu, sm.smallest_lambda(mu).lambda_mu, sm.upper_bound_mu(mu)]
        if args.variational:
            row.append(sm.variational_lambda_mu(mu, args.variational))
        w.writerow([repr(float(v)) for v in row])
    mu_star, sigma = sm.minimize_sigma()
    print(f"# mu* = {mu_star:.8f}  sigma = {sigma:.8f}  8sqrt2/3 = {sm.SIGMA_BOUND:.8f}",
          file=sys.stderr)


if __name__ == "__main__":
    main()
