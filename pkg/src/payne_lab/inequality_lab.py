"""Bound formulas and their numerical verification.

Every check returns an :class:`~payne_lab.reports.InequalityReport` of the
form ``lhs <= rhs (+ tolerance)``. PDE-backed tolerances are three times the
Richardson error estimate of the extrapolated eigenvalues involved.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import eigensolver as es
from . import strip_mode
from .convex_geometry import (ConvexPolygon, ThinnessTerm, diameter, min_width,
                              summarize, thinness, width_lambda_sandwich)
from .errors import InputError, MismatchedDomain, NoCrossing
from .reports import InequalityReport

log = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
THIN_CONSTANT = 8.0 * SQRT2 / 3.0
TOL_FACTOR = 3.0
CROSSING_BRACKET = (1e-12, 0.5)


# ---------------------------------------------------------------------------
# closed-form bounds


def improved_factor(T: float) -> float:
    return 4.0 - 2.0 * T


def thin_bound(T: float, n: int = 2) -> float:
    """``(8/3) sqrt(2) (1 + 2^(5/6) (n-1)^(-1/3) T^(1/3))^3``."""
    if T < 0:
        raise InputError("T must be nonnegative")
    if n < 2:
        raise InputError("n must be >= 2")
    return THIN_CONSTANT * (1.0 + 2.0 ** (5.0 / 6.0) * (n - 1) ** (-1.0 / 3.0) * T ** (1.0 / 3.0)) ** 3


@dataclass(frozen=True)
class BoundCurvePoint:
    T: float
    improved_bound: float
    thin_bound: float

    @property
    def effective(self) -> float:
        return min(self.improved_bound, self.thin_bound)


def bound_curve(Ts: Sequence[float], n: int = 2) -> list[BoundCurvePoint]:
    return [BoundCurvePoint(T=float(T), improved_bound=float(improved_factor(T)),
                            thin_bound=float(thin_bound(T, n))) for T in Ts]


def crossing_point(n: int = 2, tol: float = 1e-20,
                   bracket: tuple[float, float] = CROSSING_BRACKET) -> tuple[float, float]:
    """``(T_star, 4 - 2 T_star)`` where the two bound curves cross."""
    if n < 2:
        raise InputError("n must be >= 2")

    def g(T):
        return improved_factor(T) - thin_bound(T, n)

    a, b = bracket
    if (g(a) > 0) == (g(b) > 0):
        raise NoCrossing(f"bounds do not cross in {bracket} for n={n}")
    T = brentq(g, a, b, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500)
    return float(T), improved_factor(T)


def estimatenu_bound(lam: float, T: float, alpha: float, gradient_fraction: float) -> float:
    """Oscillating-test-function bound on ``Lambda`` for a given ``alpha > 0``.

    ``gradient_fraction`` is ``int u^2 (grad u . nu)^2 / (lambda int u^4)``.
    """
    if not alpha > 0:
        raise InputError("alpha must be positive")
    if not 0.0 <= gradient_fraction <= 1.0:
        raise InputError("gradient_fraction must lie in [0, 1]")
    d = 4.0 + 3.0 * alpha
    return ((16.0 - 8.0 * T + 8.0 * alpha + 3.0 * alpha**2) / d
            + 48.0 * alpha * gradient_fraction / d) * lam


def minimize_estimatenu(T: float, gradient_fraction: float, alpha_max: float = 100.0,
                        xatol: float = 1e-12) -> tuple[float, float]:
    """Minimize the coefficient of ``lambda`` over ``alpha``; returns ``(alpha, coeff)``.

    ``alpha -> 0`` is allowed as the limit, where the coefficient is ``4 - 2T``.
    """
    res = minimize_scalar(lambda a: estimatenu_bound(1.0, T, a, gradient_fraction),
                          bounds=(1e-15, alpha_max), method="bounded",
                          options={"xatol": xatol, "maxiter": 1000})
    alpha, coeff = float(res.x), float(res.fun)
    limit = improved_factor(T)
    if limit <= coeff:
        return 0.0, limit
    return alpha, coeff


def large_dimension_constant(n: int) -> float:
    """``(8/3)(sqrt(2 - 4/n) + 2/n)``, valid for ``n >= 5``."""
    return 8.0 / 3.0 * (math.sqrt(2.0 - 4.0 / n) + 2.0 / n)


def cylinder_bound(lambda_A: float, l: float) -> float:
    """``(8/3) sqrt(2) (lambda_A + sqrt(2) pi^2 / l^2)`` for ``A x (0, l)``."""
    if not (lambda_A > 0 and l > 0):
        raise InputError("lambda_A and l must be positive")
    return THIN_CONSTANT * (lambda_A + SQRT2 * math.pi**2 / l**2)


# ---------------------------------------------------------------------------
# eigenvalue-level checks


def _same_polygon(a, b) -> bool:
    if a is None or b is None:
        return a is b
    return a is b or (a.vertices.shape == b.vertices.shape
                      and np.array_equal(a.vertices, b.vertices))


def _tol(*terms) -> float:
    """``TOL_FACTOR * sum(coef * err)`` over (coef, EigenResult) pairs."""
    total = 0.0
    for coef, r in terms:
        if r.error_estimate is not None:
            total += abs(coef) * r.error_estimate
    return TOL_FACTOR * total


def _eigen_meta(lam, Lam):
    return {"h": lam.h, "lambda": lam.value, "Lambda": Lam.value, "ratio": Lam.value / lam.value,
            "lambda_label": lam.label, "Lambda_label": Lam.label,
            "lambda_err": lam.error_estimate, "Lambda_err": Lam.error_estimate,
            "tol_factor": TOL_FACTOR}


def check_payne(lam: es.EigenResult, Lam: es.EigenResult,
                tolerance: float | None = None) -> InequalityReport:
    """``Lambda <= 4 lambda``."""
    if not _same_polygon(lam.polygon, Lam.polygon):
        raise MismatchedDomain("lambda and Lambda come from different polygons")
    tol = _tol((1, Lam), (4, lam)) if tolerance is None else tolerance
    return InequalityReport("payne", Lam.value, 4.0 * lam.value, tol, _eigen_meta(lam, Lam))


def check_improved(lam: es.EigenResult, Lam: es.EigenResult, T: ThinnessTerm | float,
                   tolerance: float | None = None) -> InequalityReport:
    """``Lambda <= (4 - 2T) lambda``."""
    if not _same_polygon(lam.polygon, Lam.polygon):
        raise MismatchedDomain("lambda and Lambda come from different polygons")
    Tv = T.value if isinstance(T, ThinnessTerm) else float(T)
    c = improved_factor(Tv)
    tol = _tol((1, Lam), (c, lam)) if tolerance is None else tolerance
    meta = _eigen_meta(lam, Lam)
    meta["T"] = Tv
    return InequalityReport("improved_payne", Lam.value, c * lam.value, tol, meta)


# ---------------------------------------------------------------------------
# eigenfunction-level quantities


def _grad_parts(dom: es.DiscreteDomain, f: np.ndarray):
    """Forward-difference squared gradients summed per axis; they add up to
    ``f.K.f`` exactly."""
    out = []
    for di, dj in es._AXES:
        nb = es._neighbor(dom, di, dj)
        fp = np.where(nb >= 0, f[np.maximum(nb, 0)], 0.0)
        d = fp - f
        # edges leaving through the low side (neighbour outside, f inside)
        nm = es._neighbor(dom, -di, -dj)
        low = np.where(nm < 0, f, 0.0)
        out.append(float(np.sum(d**2) + np.sum(low**2)))
    return out


def gradient_fraction(dom: es.DiscreteDomain, u: np.ndarray, lam: float, nu) -> float:
    """``int u^2 (grad u . nu)^2 / (lambda int u^4)`` with central gradients."""
    g = es.discrete_gradient(dom, u) @ np.asarray(nu, dtype=float)
    return float(np.sum(u**2 * g**2) / (lam * np.sum(u**4)))


def check_u_squared_identity(dom: es.DiscreteDomain, u: np.ndarray, lam: float,
                             rel_tol: float = 0.02) -> InequalityReport:
    """``lambda int u^4 = 3 int u^2 |grad u|^2`` up to ``rel_tol``.

    Reported as ``|lhs/rhs - 1| <= rel_tol``.
    """
    g = es.discrete_gradient(dom, u)
    lhs = lam * dom.integrate(u**4)
    rhs = 3.0 * dom.integrate(u**2 * np.sum(g**2, axis=1))
    dev = abs(lhs / rhs - 1.0)
    return InequalityReport("u_squared_identity", dev, rel_tol, 0.0,
                            {"h": dom.h, "lambda_int_u4": lhs, "three_int_u2_grad2": rhs})


def rayleigh_u_squared(dom: es.DiscreteDomain, u: np.ndarray, ops: es.Operators | None = None) -> float:
    """Discrete buckling quotient ``int (Lap u^2)^2 / int |grad u^2|^2``."""
    ops = es.assemble(dom) if ops is None else ops
    w = np.asarray(u, dtype=float) ** 2
    return float(w @ (ops.B @ w)) / float(w @ (ops.K @ w))


def check_rayleigh_chain(dom, u, lam: es.EigenResult, Lam: es.EigenResult, T: float,
                         ops: es.Operators | None = None,
                         tolerance: float | None = None) -> tuple[InequalityReport, InequalityReport]:
    """``Lambda <= R(u^2)`` and ``R(u^2) <= (4 - 2T) lambda``."""
    q = rayleigh_u_squared(dom, u, ops)
    lower_tol = _tol((1, Lam)) if tolerance is None else tolerance
    upper_tol = _tol((improved_factor(T), lam)) if tolerance is None else tolerance
    meta = {"h": dom.h, "rayleigh_u2": q, "T": T}
    return (InequalityReport("rayleigh_u2_lower", Lam.value, q, lower_tol, meta),
            InequalityReport("rayleigh_u2_upper", q, improved_factor(T) * lam.value, upper_tol, meta))


def oscillating_bound(dom: es.DiscreteDomain, u: np.ndarray, lam: float, mu: float, nu,
                      ops: es.Operators | None = None) -> float:
    """Oscillating test-function bound on ``Lambda`` with ``h = u^2``.

    ``mu + (int (Lap h)^2 + mu int |grad h|^2) / (int |grad h|^2 + mu int h^2)
    + 4 mu int (grad h . nu)^2 / (int |grad h|^2 + mu int h^2)``.
    """
    if not mu >= 0:
        raise InputError("mu must be nonnegative")
    nu = np.asarray(nu, dtype=float)
    if abs(np.linalg.norm(nu) - 1.0) > 1e-12:
        raise InputError("nu must be a unit vector")
    ops = es.assemble(dom) if ops is None else ops
    w = np.asarray(u, dtype=float) ** 2
    lap2 = float(w @ (ops.B @ w))
    grad2 = float(w @ (ops.K @ w))
    mass = dom.integrate(w**2)
    gx, gy = _grad_parts(dom, w)
    gc = es.discrete_gradient(dom, w)
    gxy = float(np.sum(gc[:, 0] * gc[:, 1])) * dom.h**2
    dir2 = nu[0] ** 2 * gx + nu[1] ** 2 * gy + 2 * nu[0] * nu[1] * gxy
    den = grad2 + mu * mass
    return mu + (lap2 + mu * grad2) / den + 4.0 * mu * dir2 / den


def best_oscillating_bound(dom, u, lam, nu, ops=None, alpha_max: float = 4.0) -> tuple[float, float]:
    """Minimize :func:`oscillating_bound` over ``mu = alpha lambda``; returns ``(mu, value)``."""
    ops = es.assemble(dom) if ops is None else ops
    res = minimize_scalar(lambda a: oscillating_bound(dom, u, lam, a * lam, nu, ops),
                          bounds=(0.0, alpha_max), method="bounded", options={"xatol": 1e-6})
    # the bounded search never evaluates the endpoint, where oscillation is switched off
    at_zero = oscillating_bound(dom, u, lam, 0.0, nu, ops)
    if at_zero <= res.fun:
        return 0.0, at_zero
    return float(res.x) * lam, float(res.fun)


def tangential_concavity(dom: es.DiscreteDomain, u: np.ndarray, margin: float | None = None):
    """``H_u |grad u| / u = -<D^2u tau, tau> / u`` at qualifying nodes.

    ``tau`` is the unit tangent to the level set. Nodes closer than
    ``margin`` (default :func:`~payne_lab.eigensolver.pointwise_margin`) to
    the boundary, and nodes with
    ``|grad u| < 1e-6 max |grad u|``, are skipped. Returns ``(values, node_ids,
    n_skipped_flat)``.
    """
    margin = es.pointwise_margin(dom) if margin is None else margin
    mask = es.interior_mask(dom, margin)
    g = es.discrete_gradient(dom, u)
    gn = np.linalg.norm(g, axis=1)
    flat = gn < 1e-6 * gn.max()
    n_flat = int(np.sum(mask & flat))
    mask &= ~flat
    ids = np.flatnonzero(mask)
    H = es.grid_hessian(dom, np.asarray(u, dtype=float), mask)
    tau = np.c_[-g[ids, 1], g[ids, 0]] / gn[ids, None]
    tt = np.einsum("ki,kij,kj->k", tau, H, tau)
    return -tt / u[ids], ids, n_flat


def check_curvature_bound(dom: es.DiscreteDomain, u: np.ndarray, D: float | None = None,
                          tolerance: float = 0.0, margin: float | None = None) -> InequalityReport:
    """Level-set curvature ``H_u >= (pi^2/D^2) u/|grad u|`` at every qualifying node.

    Equivalent to ``pi^2/D^2 <= H_u |grad u| / u``; the minimum of the right
    side over nodes is reported.
    """
    if D is None:
        D = diameter(dom.polygon)
    vals, ids, n_flat = tangential_concavity(dom, u, margin)
    k = int(np.argmin(vals))
    worst = dom.coordinates()[ids[k]]
    return InequalityReport("curvature_bound", math.pi**2 / D**2, float(vals[k]), tolerance,
                            {"h": dom.h, "nodes": int(len(ids)), "skipped_flat": n_flat,
                             "worst_node": [float(worst[0]), float(worst[1])]})


# ---------------------------------------------------------------------------
# full verification of one polygon


@dataclass
class PolygonVerification:
    polygon: ConvexPolygon
    geometry: object
    dirichlet: es.ConvergenceStudy
    buckling: es.ConvergenceStudy
    lam: es.EigenResult
    Lam: es.EigenResult
    T: ThinnessTerm
    reports: list[InequalityReport] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    @property
    def ratio(self) -> float:
        return self.Lam.value / self.lam.value


def _level_tolerance(values: Sequence[float]) -> float:
    """``TOL_FACTOR`` times the change of a grid quantity between the two finest levels."""
    return TOL_FACTOR * abs(values[-1] - values[-2])


def verify_polygon(poly: ConvexPolygon, levels: Sequence[float] | None = None,
                   tol: float = es.EIGEN_TOL) -> PolygonVerification:
    """Geometry, both eigenvalue studies and every inequality check."""
    levels = es.default_levels(poly) if levels is None else levels
    geo = summarize(poly)
    sd, rd = es.refine_study(poly, "dirichlet", levels, tol=tol, keep_results=True)
    sb, rb = es.refine_study(poly, "buckling", levels, tol=tol, keep_results=True)
    lam = es.extrapolated_result(sd, rd[-1])
    Lam = es.extrapolated_result(sb, rb[-1])
    T = thinness(geo.diameter, lam.value, 2)
    reports = [check_payne(lam, Lam), check_improved(lam, Lam, T)]

    # eigenfunction checks on the finest grid, tolerances from the level-to-level drift
    fine = rd[-1]
    dom, u = fine.domain, fine.vector
    ops = es.assemble(dom)
    reports.append(check_u_squared_identity(dom, u, fine.value))
    reports.extend(check_rayleigh_chain(dom, u, lam, Lam, T.value, ops))
    lc = [es.log_concavity_check(r.domain, r.vector, geo.diameter).rhs for r in rd]
    rep = es.log_concavity_check(dom, u, geo.diameter, tolerance=_level_tolerance(lc))
    reports.append(rep)
    cb = [check_curvature_bound(r.domain, r.vector, geo.diameter).rhs for r in rd]
    reports.append(check_curvature_bound(dom, u, geo.diameter, tolerance=_level_tolerance(cb)))
    reports.append(width_lambda_sandwich(poly, lam.value, tolerance=_tol((geo.min_width**2, lam))))
    for r in reports:
        r.metadata.setdefault("polygon", poly.name or repr(poly))
    return PolygonVerification(poly, geo, sd, sb, lam, Lam, T, reports)


# ---------------------------------------------------------------------------
# strip limit


@dataclass(frozen=True)
class StripLimitRow:
    aspect: float
    lam: float
    Lam: float
    ratio: float
    lam_err: float
    Lam_err: float


@dataclass
class StripLimitResult:
    rows: list[StripLimitRow]
    sigma: float
    mu_star: float
    monotone_tol: float = 0.02

    @property
    def ratios(self) -> list[float]:
        return [r.ratio for r in self.rows]

    @property
    def non_increasing(self) -> bool:
        rs = self.ratios
        return all(b <= a + self.monotone_tol for a, b in zip(rs, rs[1:]))

    @property
    def non_decreasing(self) -> bool:
        rs = self.ratios
        return all(b >= a - self.monotone_tol for a, b in zip(rs, rs[1:]))

    @property
    def final_gap(self) -> float:
        return abs(self.rows[-1].ratio - self.sigma)


def rectangle_levels(divisions: Sequence[int] = (16, 24, 32)) -> Callable[[ConvexPolygon], list[float]]:
    def policy(poly):
        return es.default_levels(poly, divisions)
    return policy


def strip_limit_experiment(aspects: Sequence[float] = (1, 2, 4, 8, 16),
                           h_policy: Callable[[ConvexPolygon], Sequence[float]] | None = None,
                           sigma: tuple[float, float] | None = None) -> StripLimitResult:
    """``Lambda/lambda`` on ``[0, 1] x [0, k]`` for each aspect ``k``.

    Every value is extrapolated from a ConvergenceStudy. The trend is reported
    through ``non_increasing`` / ``non_decreasing``; neither is enforced here.
    """
    aspects = list(aspects)
    if any(k < 1 for k in aspects) or aspects != sorted(aspects):
        raise InputError("aspects must be >= 1 and increasing")
    h_policy = rectangle_levels() if h_policy is None else h_policy
    mu_star, sig = strip_mode.minimize_sigma() if sigma is None else sigma
    rows = []
    for k in aspects:
        poly = ConvexPolygon.rectangle(1.0, float(k))
        lv = h_policy(poly)
        sd = es.refine_study(poly, "dirichlet", lv)
        sb = es.refine_study(poly, "buckling", lv)
        rows.append(StripLimitRow(aspect=float(k), lam=sd.extrapolated, Lam=sb.extrapolated,
                                  ratio=sb.extrapolated / sd.extrapolated,
                                  lam_err=sd.error_estimate, Lam_err=sb.error_estimate))
        log.info("aspect %g: ratio %.6f", k, rows[-1].ratio)
    return StripLimitResult(rows=rows, sigma=sig, mu_star=mu_star)


def _smooth_step(s):
    """C-infinity step: 0 for s <= 0, 1 for s >= 1."""
    s = np.clip(s, 0.0, 1.0)
    f = np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
    g = np.where(s < 1, np.exp(-1.0 / np.where(s < 1, 1.0 - s, 1.0)), 0.0)
    return f / (f + g)


def cutoff_quotient(k: int, mu: float | None = None, divisions: int = 24) -> dict:
    """Discrete buckling quotient of the periodic strip mode times a cutoff.

    The rectangle is ``(0, pi) x (-k L, k L)`` with ``L = pi / sqrt(mu)``; the
    test function is ``h(x) cos(sqrt(mu) y) phi(y)`` with ``phi = 1`` for
    ``|y| <= (k-1) L`` and supported in ``|y| < k L``. Returns the quotient
    divided by the discrete ``lambda`` of the same grid, next to
    ``Lambda_mu`` and the discrete ``Lambda/lambda``.
    """
    if mu is None:
        mu = strip_mode.minimize_sigma()[0]
    lam_mu = strip_mode.smallest_lambda(mu).lambda_mu
    L = math.pi / math.sqrt(mu)
    poly = ConvexPolygon.from_points([(0, -k * L), (math.pi, -k * L), (math.pi, k * L), (0, k * L)],
                                     name=f"cutoff_k{k}")
    dom = es.rasterize(poly, math.pi / divisions)
    xy = dom.coordinates()
    prof = strip_mode.StripEigenfunction(mu, lam_mu, "mixed")
    phi = _smooth_step((k * L - np.abs(xy[:, 1])) / L)
    v = prof(xy[:, 0]) * np.cos(math.sqrt(mu) * xy[:, 1]) * phi
    ops = es.assemble(dom)
    q = float(v @ (ops.B @ v)) / float(v @ (ops.K @ v))
    lam = es.dirichlet_lambda(dom).value
    Lam = es.buckling_lambda(dom).value
    return {"k": k, "mu": mu, "Lambda_mu": lam_mu, "quotient_over_lambda": q / lam,
            "discrete_ratio": Lam / lam, "h": dom.h}
