import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from payne_lab import eigensolver as es
from payne_lab import inequality_lab as il
from payne_lab.convex_geometry import ConvexPolygon, thinness
from payne_lab.errors import InputError, MismatchedDomain, NoCrossing
from payne_lab.reports import InequalityReport, reports_to_csv, reports_to_json


# -- closed-form bounds ----------------------------------------------------------

def test_thin_bound_at_zero_is_8sqrt2_over_3():
    assert il.thin_bound(0.0) == pytest.approx(8 * math.sqrt(2) / 3, abs=1e-15)


@given(st.floats(0, 1), st.floats(0, 1))
def test_thin_bound_monotone(a, b):
    lo, hi = sorted((a, b))
    assert il.thin_bound(lo) <= il.thin_bound(hi)


def test_crossing_point_n2():
    T, C = il.crossing_point(2)
    assert T == pytest.approx(1.3773e-6, rel=2e-2)
    assert C == pytest.approx(3.999997, abs=1e-5)
    assert il.thin_bound(T) == pytest.approx(il.improved_factor(T), abs=1e-12)


@pytest.mark.parametrize("n", [2, 3, 5, 10])
def test_crossing_constant_below_four(n):
    T, C = il.crossing_point(n)
    assert 0 < T and C < 4


def test_crossing_bad_bracket():
    with pytest.raises(NoCrossing):
        il.crossing_point(2, bracket=(0.1, 0.5))
    with pytest.raises(InputError):
        il.crossing_point(1)


def test_effective_bound_below_four():
    pts = il.bound_curve(np.linspace(0, 1e-3, 50))
    assert max(p.effective for p in pts) < 4.0


@pytest.mark.parametrize("n", [5, 10, 100])
def test_large_dimension_constant(n):
    alpha, c = il.minimize_estimatenu(0.0, 1.0 / (3 * n))
    assert c == pytest.approx(il.large_dimension_constant(n), abs=1e-8)
    assert c < 4
    # minimizer is the positive root of the stationarity condition
    assert alpha == pytest.approx((4 / 3) * (math.sqrt(2 - 4 / n) - 1), abs=1e-5)


def test_large_dimension_constant_degenerates_at_four():
    # n = 4 is the threshold: the optimum sits at alpha = 0 and gives exactly 4
    assert il.large_dimension_constant(4) == pytest.approx(4.0, abs=1e-15)
    assert il.minimize_estimatenu(0.0, 1 / 12)[1] == pytest.approx(4.0, abs=1e-8)


def test_estimatenu_alpha_to_zero_limit():
    assert il.estimatenu_bound(1.0, 0.1, 1e-12, 0.2) == pytest.approx(3.8, abs=1e-10)


@given(st.floats(0, 0.4), st.floats(0, 1), st.floats(1e-3, 20))
def test_estimatenu_minimum_never_above_limit(T, g, alpha):
    _, c = il.minimize_estimatenu(T, g)
    assert c <= il.improved_factor(T) + 1e-12
    assert c <= il.estimatenu_bound(1.0, T, alpha, g) + 1e-9


def test_estimatenu_rejects_bad_inputs():
    with pytest.raises(InputError):
        il.estimatenu_bound(1.0, 0.0, 0.0, 0.5)
    with pytest.raises(InputError):
        il.estimatenu_bound(1.0, 0.0, 1.0, 1.5)


def test_cylinder_bound():
    assert il.cylinder_bound(1.0, math.inf) == pytest.approx(8 * math.sqrt(2) / 3)
    with pytest.raises(InputError):
        il.cylinder_bound(-1.0, 1.0)


# -- eigenvalue checks -------------------------------------------------------------

@pytest.fixture(scope="module")
def square_run():
    sq = ConvexPolygon.rectangle(1, 1, name="square")
    lv = es.default_levels(sq, (16, 32, 64))
    sd, rd = es.refine_study(sq, "dirichlet", lv, keep_results=True)
    sb, rb = es.refine_study(sq, "buckling", lv, keep_results=True)
    return sq, es.extrapolated_result(sd, rd[-1]), es.extrapolated_result(sb, rb[-1]), rd[-1]


def test_payne_and_improved_on_square(square_run):
    sq, lam, Lam, _ = square_run
    T = thinness(math.sqrt(2), lam.value)
    p, q = il.check_payne(lam, Lam), il.check_improved(lam, Lam, T)
    assert p.passed and q.passed
    assert q.rhs < p.rhs
    assert p.tolerance > 0 and q.metadata["T"] == pytest.approx(0.25, rel=1e-3)


def test_mismatched_domain(square_run):
    _, lam, _, _ = square_run
    other = es.buckling_lambda(es.rasterize(ConvexPolygon.rectangle(1, 2), 1 / 16))
    with pytest.raises(MismatchedDomain):
        il.check_payne(lam, other)


def test_violation_reported_not_raised(square_run):
    _, lam, Lam, _ = square_run
    r = il.check_payne(lam, Lam, tolerance=0.0)
    fake = InequalityReport("payne", 5 * lam.value, 4 * lam.value)
    assert r.passed and not fake.passed and fake.margin < 0


def test_u_squared_identity_on_square(square_run):
    _, _, _, fine = square_run
    rep = il.check_u_squared_identity(fine.domain, fine.vector, fine.value)
    assert rep.passed and rep.lhs < 5e-3


def test_rayleigh_chain(square_run):
    _, lam, Lam, fine = square_run
    lo, hi = il.check_rayleigh_chain(fine.domain, fine.vector, lam, Lam, 0.25)
    assert lo.passed and hi.passed
    assert lo.rhs == hi.lhs


def test_rayleigh_of_u2_above_discrete_buckling(square_run):
    _, _, _, fine = square_run
    q = il.rayleigh_u_squared(fine.domain, fine.vector)
    assert q >= es.buckling_lambda(fine.domain).value


def test_oscillating_bound_at_zero_mu_is_rayleigh(square_run):
    _, _, _, fine = square_run
    dom, u = fine.domain, fine.vector
    assert il.oscillating_bound(dom, u, fine.value, 0.0, (1.0, 0.0)) == pytest.approx(
        il.rayleigh_u_squared(dom, u))
    mu, val = il.best_oscillating_bound(dom, u, fine.value, (1.0, 0.0))
    assert val <= il.rayleigh_u_squared(dom, u) + 1e-9
    with pytest.raises(InputError):
        il.oscillating_bound(dom, u, fine.value, 1.0, (1.0, 1.0))


def test_gradient_fraction_in_unit_interval(square_run):
    _, _, _, fine = square_run
    g = il.gradient_fraction(fine.domain, fine.vector, fine.value, (0.0, 1.0))
    # for the square the two directions share lambda int u^4 / 3 equally
    assert 0 < g < 1
    assert g == pytest.approx(1 / 6, rel=0.02)


def test_curvature_bound_on_square(square_run):
    _, _, _, fine = square_run
    rep = il.check_curvature_bound(fine.domain, fine.vector)
    assert rep.passed and rep.metadata["nodes"] > 0


def test_verify_polygon_triangle():
    v = il.verify_polygon(ConvexPolygon.equilateral_triangle(1.0))
    names = [r.name for r in v.reports]
    assert names == ["payne", "improved_payne", "u_squared_identity", "rayleigh_u2_lower",
                     "rayleigh_u2_upper", "log_concavity", "curvature_bound", "width_lambda"]
    assert v.passed, [str(r) for r in v.reports if not r.passed]
    assert v.ratio < 4 - 2 * v.T.value


# -- strip limit -----------------------------------------------------------------

def test_strip_limit_small_sweep():
    res = il.strip_limit_experiment((1, 2, 4), sigma=(0.5833, 3.7570678))
    assert [r.aspect for r in res.rows] == [1, 2, 4]
    assert all(r.ratio < 4 for r in res.rows)
    assert res.rows[0].ratio == pytest.approx(2.6518, abs=2e-3)
    assert res.non_decreasing


def test_strip_limit_rejects_unsorted():
    with pytest.raises(InputError):
        il.strip_limit_experiment((2, 1))


def test_cutoff_quotient_approaches_strip_value():
    out = il.cutoff_quotient(3, divisions=16)
    # the cut-off periodic mode is an admissible test function for the discrete pencil
    assert out["quotient_over_lambda"] >= out["discrete_ratio"] - 1e-9
    assert out["quotient_over_lambda"] < 4


def test_cutoff_quotient_k8_sanity_upper_bound():
    out = il.cutoff_quotient(8)
    assert out["discrete_ratio"] <= out["quotient_over_lambda"] < 4
    assert abs(out["quotient_over_lambda"] - out["Lambda_mu"]) < 0.01


# -- serialization ------------------------------------------------------------------

def test_report_serialization_roundtrip():
    import csv, io, json
    reps = [InequalityReport("a", 1.0, 2.0, 0.0, {"x": np.float64(1.5)}),
            InequalityReport("b", 3.0, 2.0)]
    data = json.loads(reports_to_json(reps))
    assert data[0]["pass"] is True and data[1]["pass"] is False
    assert data[0]["metadata"]["x"] == 1.5
    rows = list(csv.reader(io.StringIO(reports_to_csv(reps))))
    assert rows[0] == ["name", "lhs", "rhs", "margin", "pass"]
    assert rows[2] == ["b", "3.0", "2.0", "-1.0", "false"]


def test_nan_report_fails():
    assert not InequalityReport("x", float("nan"), 1.0).passed
