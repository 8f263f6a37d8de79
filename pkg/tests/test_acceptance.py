"""Acceptance criteria, one test each, printed as PASS/FAIL lines.

Run ``pytest tests/test_acceptance.py -v -s`` or ``python3 tests/test_acceptance.py``.
Each criterion checks its numbers and its runtime budget.
"""
from __future__ import annotations

import math
import sys
import time

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from payne_lab import eigensolver as es
from payne_lab import inequality_lab as il
from payne_lab import strip_mode as sm
from payne_lab.convex_geometry import ConvexPolygon
from payne_lab.corpus import standard_corpus

CRITERIA = {}


def criterion(number, title, budget):
    def wrap(fn):
        CRITERIA[number] = (title, budget, fn)
        return fn
    return wrap


@criterion(1, "strip axial root equals 4", 1.0)
def c1():
    r = sm.smallest_lambda(0.0)
    err = abs(r.lambda_mu - 4.0)
    return err <= 1e-10, f"Lambda_0 = {r.lambda_mu!r}, |err| = {err:.2e} (tol 1e-10)"


@criterion(2, "strip minimum sigma", 5.0)
def c2():
    mu_star, sigma = sm.minimize_sigma()
    gap = sm.SIGMA_BOUND - sigma
    ok = 3.7569 <= sigma <= 3.7571 and gap > 0.01
    return ok, f"sigma = {sigma:.7f} at mu* = {mu_star:.5f}; 8sqrt2/3 - sigma = {gap:.4f} (> 0.01)"


@criterion(3, "test-function bound on Lambda_mu", 10.0)
def c3():
    mus = np.linspace(0.0, 10.0, 101)
    excess = max(sm.smallest_lambda(m).lambda_mu - sm.upper_bound_mu(m) for m in mus)
    at = sm.upper_bound_mu(sm.MU_STAR_BOUND)
    val_err = abs(at - 8 * math.sqrt(2) / 3)
    res = minimize_scalar(sm.upper_bound_mu, bounds=(0, 4), method="bounded",
                          options={"xatol": 1e-12})
    is_min = res.fun >= at - 1e-12 and abs(res.x - sm.MU_STAR_BOUND) < 1e-5
    ok = excess <= 1e-9 and val_err <= 1e-12 and is_min
    return ok, (f"max(Lambda_mu - bound) = {excess:.3e} (<= 1e-9); bound(mu*) - 8sqrt2/3 = "
                f"{val_err:.1e}; numeric argmin {res.x:.8f} vs {sm.MU_STAR_BOUND:.8f}")


@criterion(4, "root finder vs variational quotient", 30.0)
def c4():
    rel = {m: abs(sm.smallest_lambda(m).lambda_mu - sm.variational_lambda_mu(m, 256))
           / sm.smallest_lambda(m).lambda_mu for m in (0.5, 1.0, 2.0)}
    return max(rel.values()) <= 0.01, "rel. diff " + ", ".join(
        f"mu={m:g}: {v:.2e}" for m, v in rel.items()) + " (<= 1e-2)"


@criterion(5, "Dirichlet solver accuracy", 60.0)
def c5():
    out, ok = [], True
    for poly, exact in ((ConvexPolygon.rectangle(1, 1), 2 * math.pi**2),
                        (ConvexPolygon.rectangle(1, 2), 5 * math.pi**2 / 4)):
        s = es.refine_study(poly, "dirichlet", es.default_levels(poly))
        rel = abs(s.extrapolated - exact) / exact
        ok &= rel <= 2e-3 and 1.7 <= s.observed_order <= 2.3
        out.append(f"{poly.name}: {s.extrapolated:.6f} rel {rel:.1e}, order {s.observed_order:.3f}")
    return ok, "; ".join(out)


@criterion(6, "1D buckling anchor on (0, pi)", 5.0)
def c6():
    lam, y, v = es.buckling_interval(math.pi, 256)
    ref = (1 - np.cos(2 * y)) / 2
    corr = float(np.dot(v, ref) / (np.linalg.norm(v) * np.linalg.norm(ref)))
    rel = abs(lam - 4) / 4
    return rel <= 5e-3 and corr > 0.999, f"Lambda = {lam:.6f} rel {rel:.1e} (<= 5e-3); corr {corr:.8f}"


CORPUS_CHECKS = ("payne", "improved_payne", "u_squared_identity", "log_concavity",
                 "curvature_bound", "width_lambda")


@criterion(7, "inequality suite on the polygon corpus", 600.0)
def c7():
    corpus = standard_corpus()
    failed, extra_failed = [], []
    for poly in corpus:
        v = il.verify_polygon(poly)
        for r in v.reports:
            if not r.passed:
                (failed if r.name in CORPUS_CHECKS else extra_failed).append(f"{poly.name}:{r.name}")
    ok = len(corpus) >= 20 and not failed
    return ok, (f"{len(corpus)} polygons, {len(CORPUS_CHECKS)} required checks each; "
                f"failures: {failed or 'none'}; rayleigh chain failures: {extra_failed or 'none'}")


@criterion(8, "strip-limit experiment on 1 x k rectangles", 600.0)
def c8():
    res = il.strip_limit_experiment((1, 2, 4, 8, 16))
    below = all(r.ratio < 4 for r in res.rows if r.aspect >= 2)
    near = res.final_gap <= 0.1
    ok = below and res.non_increasing and near
    ratios = ", ".join(f"k={int(r.aspect)}: {r.ratio:.4f}" for r in res.rows)
    return ok, (f"{ratios}; below 4: {below}; non-increasing (0.02): {res.non_increasing}; "
                f"|ratio(16) - sigma| = {res.final_gap:.4f} (<= 0.1)")


@criterion(9, "bound-curve crossing for n = 2", 1.0)
def c9():
    T, C = il.crossing_point(2)
    ok = abs(T / 1.3773e-6 - 1) <= 0.02 and abs(C - 3.999997) <= 1e-5
    return ok, f"T* = {T:.6e} (1.3773e-6 +-2%), C = {C:.8f} (3.999997 +-1e-5)"


@criterion(10, "large-dimension constant", 1.0)
def c10():
    out, ok = [], True
    for n in (5, 10, 100):
        _, c = il.minimize_estimatenu(0.0, 1.0 / (3 * n))
        err = abs(c - il.large_dimension_constant(n))
        ok &= err <= 1e-8 and c < 4
        out.append(f"n={n}: {c:.10f} err {err:.1e}")
    return ok, "; ".join(out)


def evaluate(number):
    title, budget, fn = CRITERIA[number]
    t0 = time.perf_counter()
    ok, detail = fn()
    dt = time.perf_counter() - t0
    in_time = dt < budget
    status = "PASS" if ok and in_time else "FAIL"
    line = f"[{status}] criterion {number:2d} ({title}): {detail}; {dt:.2f}s (< {budget:g}s)"
    return ok and in_time, line


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    ok, line = evaluate(number)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(n) for n in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
