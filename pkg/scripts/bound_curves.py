#!/usr/bin/env python3
"""Data for the plot of 4 - 2T against the thin-domain bound, with their crossing."""
import argparse
import csv
import sys

import numpy as np

from payne_lab import inequality_lab as il


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--span", type=float, default=2.0, help="T range as a multiple of T*")
    args = ap.parse_args()

    T_star, C = il.crossing_point(args.n)
    print(f"# n = {args.n}: T* = {T_star:.6e}, C_n = {C:.8f}", file=sys.stderr)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["T", "improved_bound", "thin_bound", "effective"])
    for p in il.bound_curve(np.linspace(0.0, args.span * T_star, args.samples), args.n):
        w.writerow([repr(p.T), repr(p.improved_bound), repr(p.thin_bound), repr(p.effective)])


if __name__ == "__main__":
    main()
