"""One-dimensional reduced buckling problems on the strip R x (0, pi).

A buckling mode of the form ``h(y) cos(sqrt(mu) x)`` exists on the strip
iff ``Lambda`` is a root of a transcendental characteristic equation in
``(mu, Lambda)``. For ``mu = 0`` the mode is constant in ``x`` and the
equation reduces to the "axial" residual, whose smallest positive root is 4.
Letting ``mu`` vary lowers the smallest root; its minimum over ``mu`` is
``sigma ~ 3.7570``, strictly below 4.

Two independent routes to ``Lambda_mu`` are provided: root isolation on the
characteristic equation (:func:`smallest_lambda`) and a finite-difference
generalized eigenproblem for the variational form
(:func:`variational_lambda_mu`).
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.linalg
from scipy.optimize import minimize_scalar

from .errors import DegenerateNormalization, InputError, NoRootInBracket, SingularPencil

log = logging.getLogger(__name__)

ROOT_TOL = 1e-12
SCAN_START = 1e-3
SCAN_STEP = 1e-2
# sqrt(mu)*pi beyond which cosh/sinh are evaluated in rescaled form
_OVERFLOW_ARG = 700.0
_AXIAL_LIMIT_ARG = 1e-6
MU_STAR_BOUND = 4.0 * (math.sqrt(2.0) - 1.0) / 3.0
SIGMA_BOUND = 8.0 * math.sqrt(2.0) / 3.0


@dataclass(frozen=True)
class StripModeResult:
    mu: float
    lambda_mu: float
    # residual divided by the magnitude of its coefficients, see residual_scale
    residual_at_root: float
    bracket: tuple[float, float]


@dataclass(frozen=True)
class StripEigenfunction:
    mu: float
    lam: float
    kind: Literal["axial", "mixed"]

    def __call__(self, y):
        return eval_eigenfunction(self, y)


def _check_mu(mu):
    if not (mu >= 0.0) or not math.isfinite(mu):
        raise InputError(f"mu must be a finite nonnegative number, got {mu!r}")


def residual_axial(Lambda: float) -> float:
    """``2(cos(t) - 1) + t sin(t)`` with ``t = sqrt(Lambda) pi``."""
    if not Lambda > 0:
        raise InputError(f"Lambda must be positive, got {Lambda!r}")
    t = math.sqrt(Lambda) * math.pi
    return 2.0 * (math.cos(t) - 1.0) + t * math.sin(t)


def residual_mixed(mu: float, Lambda: float, *, rescaled: bool | None = None) -> float:
    """Characteristic function of the mixed strip mode.

    ``2 a b (cosh(a pi) cos(b pi) - 1) + (Lambda - 2 mu) sinh(a pi) sin(b pi)``
    with ``a = sqrt(mu)``, ``b = sqrt(Lambda - mu)``.

    With ``rescaled`` (automatic once ``a pi`` would overflow) the whole
    expression is divided by ``cosh(a pi)``; the zero set is unchanged.
    """
    if not mu > 0:
        raise InputError("residual_mixed needs mu > 0; use residual_axial for mu = 0")
    if Lambda < mu:
        raise InputError(f"Lambda={Lambda!r} must be >= mu={mu!r}")
    a = math.sqrt(mu)
    b = math.sqrt(Lambda - mu)
    ap, bp = a * math.pi, b * math.pi
    if rescaled is None:
        rescaled = ap > _OVERFLOW_ARG
    if rescaled:
        # cosh -> 1, sinh -> tanh, the constant -1 -> -sech
        sech = 2.0 * math.exp(-ap) / (1.0 + math.exp(-2.0 * ap))
        return (2.0 * a * b * (math.cos(bp) - sech)
                + (Lambda - 2.0 * mu) * math.tanh(ap) * math.sin(bp))
    return (2.0 * a * b * (math.cosh(ap) * math.cos(bp) - 1.0)
            + (Lambda - 2.0 * mu) * math.sinh(ap) * math.sin(bp))


def residual_scale(mu: float, Lambda: float) -> float:
    """Magnitude of the coefficients multiplying the oscillating factors.

    Used to report a dimensionless residual; matches the scaling convention
    of :func:`residual_mixed` (rescaled when that one is).
    """
    if mu == 0.0:
        return 2.0 + math.sqrt(Lambda) * math.pi
    a = math.sqrt(mu)
    b = math.sqrt(max(Lambda - mu, 0.0))
    ap = a * math.pi
    if ap > _OVERFLOW_ARG:
        return 2.0 * a * b + abs(Lambda - 2.0 * mu)
    return 2.0 * a * b * (math.cosh(ap) + 1.0) + abs(Lambda - 2.0 * mu) * math.sinh(ap)


def upper_bound_mu(mu: float) -> float:
    """Rayleigh quotient of the test function ``sin(y)**2``: ``mu + (16+4mu)/(4+3mu)``."""
    _check_mu(mu)
    return mu + (16.0 + 4.0 * mu) / (4.0 + 3.0 * mu)


def eval_eigenfunction(f: StripEigenfunction, y):
    """Closed-form strip eigenfunction ``w`` (axial) or ``h`` (mixed) at ``y``.

    Not normalized. Accepts scalars or arrays.
    """
    y = np.asarray(y, dtype=float)
    if f.kind == "axial":
        s = math.sqrt(f.lam)
        t = s * math.pi
        out = (-(t - math.sin(t)) * (1.0 - np.cos(s * y))
               + (1.0 - math.cos(t)) * (s * y - np.sin(s * y)))
        return out if out.ndim else float(out)
    if f.kind != "mixed":
        raise InputError(f"unknown eigenfunction kind {f.kind!r}")
    if not f.mu > 0 or f.lam <= f.mu:
        raise InputError("mixed eigenfunction needs mu > 0 and lambda > mu")
    a = math.sqrt(f.mu)
    b = math.sqrt(f.lam - f.mu)
    ap, bp = a * math.pi, b * math.pi
    if ap > _OVERFLOW_ARG:
        raise DegenerateNormalization(f"sqrt(mu)*pi = {ap:.1f} overflows the closed form")
    den1 = math.cosh(ap) - math.cos(bp)
    den2 = b * math.sinh(ap) - a * math.sin(bp)
    eps = np.finfo(float).eps
    if abs(den1) < 64 * eps * math.cosh(ap) or abs(den2) < 64 * eps * (b * math.cosh(ap) + a):
        raise DegenerateNormalization(
            f"closed-form denominators vanish at mu={f.mu!r}, lambda={f.lam!r}")
    out = (-(np.cosh(a * y) - np.cos(b * y)) / den1
           + (b * np.sinh(a * y) - a * np.sin(b * y)) / den2)
    return out if out.ndim else float(out)


def _nontrivial(mu, lam):
    """Whether the closed-form mode at a root is not identically zero.

    The mixed form is rescaled so its ``cos(sqrt(lam - mu) y)`` coefficient is
    1; the raw form is tiny for large ``mu`` because of exact cancellation.
    """
    y = np.linspace(0.0, np.pi, 64)
    if math.sqrt(mu) * math.pi < _AXIAL_LIMIT_ARG:
        # the mixed normalization degenerates as mu -> 0; the mode tends to the axial one
        vals = eval_eigenfunction(StripEigenfunction(mu, lam, "axial"), y)
    else:
        ap = math.sqrt(mu) * math.pi
        if ap > _OVERFLOW_ARG:
            # closed form unavailable; lam > mu already excludes the trivial root
            return True
        try:
            vals = eval_eigenfunction(StripEigenfunction(mu, lam, "mixed"), y)
        except DegenerateNormalization:
            return False
        vals = vals * (math.cosh(ap) - math.cos(math.sqrt(lam - mu) * math.pi))
    return bool(np.all(np.isfinite(vals)) and np.max(np.abs(vals)) >= 1e-8)


def _bisect(g, lo, hi, tol):
    glo = g(lo)
    for _ in range(400):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        gm = g(mid)
        if gm == 0.0:
            return mid, mid
        if (gm < 0.0) == (glo < 0.0):
            lo, glo = mid, gm
        else:
            hi = mid
    return lo, hi


def smallest_lambda(mu: float, scan_step: float = SCAN_STEP, tol: float = ROOT_TOL,
                    scan_start: float = SCAN_START) -> StripModeResult:
    """Smallest ``Lambda > mu`` carrying a nontrivial strip mode.

    The characteristic function vanishes trivially at ``Lambda = mu`` (and to
    fourth order at 0 in the axial case), and has infinitely many roots above.
    We scan upward from ``mu + scan_start`` in steps of ``scan_step``, bisect
    the first sign change down to width ``tol`` and keep the root only if the
    closed-form eigenfunction is not identically zero.

    Raises NoRootInBracket if nothing is found below the ``sin(y)**2``
    test-function bound plus one step.
    """
    _check_mu(mu)
    if not (scan_step > 0 and tol > 0 and scan_start > 0):
        raise InputError("scan_step, tol and scan_start must be positive")
    if mu == 0.0:
        def g(L):
            return residual_axial(L)
    else:
        rescaled = math.sqrt(mu) * math.pi > _OVERFLOW_ARG

        def g(L):
            return residual_mixed(mu, L, rescaled=rescaled)

    ceiling = upper_bound_mu(mu) + scan_step
    lo = mu + scan_start
    if lo >= ceiling:
        raise NoRootInBracket(f"scan start {lo:.6g} is above the bound ceiling {ceiling:.6g}")
    glo = g(lo)
    k = 1
    while True:
        hi = min(mu + scan_start + k * scan_step, ceiling)
        ghi = g(hi)
        if glo == 0.0 or (glo < 0.0) != (ghi < 0.0):
            a, b = (lo, lo) if glo == 0.0 else _bisect(g, lo, hi, tol)
            root = 0.5 * (a + b)
            if _nontrivial(mu, root):
                res = g(root) / residual_scale(mu, root)
                return StripModeResult(mu=mu, lambda_mu=root, residual_at_root=res,
                                       bracket=(a, b))
            log.debug("discarding trivial root %.6g at mu=%.6g", root, mu)
        if hi >= ceiling:
            raise NoRootInBracket(
                f"no sign change in ({mu + scan_start:.6g}, {ceiling:.6g}] for mu={mu!r}; "
                f"scan_step={scan_step!r} may be too coarse")
        lo, glo = hi, ghi
        k += 1


def minimize_sigma(tol: float = 1e-8, mu_max: float = 4.0, n_scan: int = 64,
                   scan_step: float = SCAN_STEP) -> tuple[float, float]:
    """Return ``(mu_star, sigma)`` minimizing ``mu -> Lambda_mu`` on ``[0, mu_max]``.

    A coarse grid locates the basin; a bounded scalar minimizer then refines
    ``mu`` to ``tol``. A warning is emitted if the grid shows more than one
    local minimum, since unimodality is only an assumption.
    """
    if not tol > 0:
        raise InputError("tol must be positive")
    grid = np.linspace(0.0, mu_max, n_scan)
    vals = np.array([smallest_lambda(m, scan_step=scan_step).lambda_mu for m in grid])
    interior_minima = [i for i in range(1, n_scan - 1)
                       if vals[i] <= vals[i - 1] and vals[i] <= vals[i + 1]]
    if len(interior_minima) > 1:
        warnings.warn(f"mu -> Lambda_mu shows {len(interior_minima)} local minima on the "
                      "pre-scan grid; golden-section result may be a local minimum",
                      RuntimeWarning, stacklevel=2)
    i = int(np.argmin(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, n_scan - 1)]
    res = minimize_scalar(lambda m: smallest_lambda(m, scan_step=scan_step).lambda_mu,
                          bounds=(lo, hi), method="bounded",
                          options={"xatol": tol, "maxiter": 500})
    mu_star = float(res.x)
    sigma = smallest_lambda(mu_star, scan_step=scan_step).lambda_mu
    if vals[i] < sigma:
        mu_star, sigma = float(grid[i]), float(vals[i])
    return mu_star, sigma


def variational_lambda_mu(mu: float, n_grid: int = 256) -> float:
    """Finite-difference minimum of the strip Rayleigh quotient.

    Minimizes ``mu + (int h''^2 + mu int h'^2) / (int h'^2 + mu int h^2)``
    over clamped grid functions on ``(0, pi)`` with ``n_grid`` intervals.
    """
    from .eigensolver import interval_operators

    _check_mu(mu)
    if n_grid < 16:
        raise InputError("n_grid must be >= 16")
    B, K, M = (m.toarray() for m in interval_operators(n_grid, math.pi))
    num = B + mu * K
    den = K + mu * M
    try:
        scipy.linalg.cholesky(den, lower=True)
    except np.linalg.LinAlgError as exc:
        raise SingularPencil("denominator form is not positive definite") from exc
    w = scipy.linalg.eigh(num, den, eigvals_only=True, subset_by_index=[0, 0])
    return float(mu + w[0])
