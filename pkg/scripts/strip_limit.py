#!/usr/bin/env python3
"""Lambda/lambda on [0,1] x [0,k] for growing k, next to the strip constant sigma.

Optionally also prints the discrete quotient of the cut-off strip mode, the
test function used to push the ratio of long rectangles toward sigma.
"""
import argparse
import logging

from payne_lab import inequality_lab as il


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--aspects", type=float, nargs="+", default=[1, 2, 4, 8, 16, 32])
    ap.add_argument("--divisions", type=int, nargs=3, default=[16, 24, 32],
                    help="grid levels as fractions of the short side")
    ap.add_argument("--cutoff", type=int, nargs="*", default=[8],
                    help="periods k for the cut-off test function")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    res = il.strip_limit_experiment(args.aspects, il.rectangle_levels(args.divisions))
    print(f"sigma = {res.sigma:.7f} (mu* = {res.mu_star:.5f})")
    print(f"{'k':>6} {'lambda':>12} {'Lambda':>12} {'ratio':>9} {'sigma-ratio':>12}")
    for r in res.rows:
        print(f"{r.aspect:6g} {r.lam:12.6f} {r.Lam:12.6f} {r.ratio:9.5f} {res.sigma - r.ratio:12.5f}")
    print(f"non-increasing: {res.non_increasing}  non-decreasing: {res.non_decreasing}")
    for k in args.cutoff:
        out = il.cutoff_quotient(k)
        print(f"cutoff k={k}: quotient/lambda = {out['quotient_over_lambda']:.5f}, "
              f"discrete Lambda/lambda = {out['discrete_ratio']:.5f}, Lambda_mu = {out['Lambda_mu']:.5f}")


if __name__ == "__main__":
    main()
