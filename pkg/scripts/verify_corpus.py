#!/usr/bin/env python3
"""Run every inequality check on the seeded polygon corpus; CSV to stdout."""
import argparse
import csv
import logging
import sys
import time

from payne_lab.corpus import DEFAULT_SEED, standard_corpus
from payne_lab.inequality_lab import verify_polygon


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--random", type=int, default=10, help="number of random hulls")
    args = ap.parse_args()
    logging.basicConfig(level=logging.ERROR)

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["polygon", "vertices", "lambda", "Lambda", "ratio", "T", "check", "lhs", "rhs",
                "tolerance", "pass"])
    n_fail = 0
    t0 = time.perf_counter()
    for poly in standard_corpus(args.seed, args.random):
        v = verify_polygon(poly)
        for r in v.reports:
            n_fail += not r.passed
            w.writerow([poly.name, len(poly.vertices), repr(v.lam.value), repr(v.Lam.value),
                        repr(v.ratio), repr(v.T.value), r.name, repr(r.lhs), repr(r.rhs),
                        repr(r.tolerance), str(r.passed).lower()])
    print(f"# {n_fail} failed checks, {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    sys.exit(1 if n_fail else 0)


if __name__ == "__main__":
    main()
