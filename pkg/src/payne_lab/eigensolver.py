"""Finite-difference Dirichlet and clamped-buckling eigenvalues.

Domains are convex polygons rasterized onto a uniform grid; a node is an
unknown iff it lies inside the polygon with margin ``h/2``. Every
non-interior node carries the value 0.

Operators (all integrals are midpoint sums times ``h**2``):

* ``K``  5-point ``-Laplacian``; ``u.K.u = int |grad u|^2``.
* ``L``  Laplacian evaluated at the interior nodes *and* at the first ring of
  exterior ("boundary") nodes. On boundary nodes the out-of-domain neighbour
  along each axis is a ghost mirroring the interior neighbour, which encodes
  ``d_nu v = 0``.
* ``B = L^T W L`` with weight 1 on interior rows and 1/2 on boundary rows;
  ``v.B.v = int (Lap v)^2``. On grid-aligned edges this is the classic
  13-point clamped-plate stencil.

``L`` has integer entries, so ``B`` and ``K`` are assembled in exact
arithmetic before scaling and are symmetric bit for bit.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Literal, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .convex_geometry import ConvexPolygon, min_width, diameter
from .errors import IndefinitePencil, InputError, NoConvergence, NonPositiveU, TooCoarse
from .reports import InequalityReport

log = logging.getLogger(__name__)

EIGEN_TOL = 1e-10
MAX_ITER = 10_000
MIN_NODES = 25


# --------------------------------------------------------------------------
# 1D interval


def interval_operators(n: int, length: float = math.pi):
    """Clamped/Dirichlet operators on ``(0, length)`` with ``n`` intervals.

    Returns sparse ``(B, K, M)`` on the ``n - 1`` interior nodes:
    ``v.B.v ~ int v''^2`` (ghost reflection at both ends, half weight on the
    end rows), ``v.K.v ~ int v'^2``, ``v.M.v ~ int v^2``.
    """
    if n < 4:
        raise InputError("need at least 4 intervals")
    dx = length / n
    m = n - 1
    K = sp.diags([-np.ones(m - 1), 2 * np.ones(m), -np.ones(m - 1)], [-1, 0, 1], format="csr")
    # rows: end node 0, interior 1..m, end node n
    rows = sp.lil_matrix((m + 2, m))
    rows[0, 0] = 2.0
    rows[m + 1, m - 1] = 2.0
    rows[1:m + 1, :] = -K
    Lrow = rows.tocsr()
    w = np.ones(m + 2)
    w[0] = w[-1] = 0.5
    B = (Lrow.T @ sp.diags(w) @ Lrow).tocsr()
    return B / dx**3, K / dx, sp.identity(m, format="csr") * dx


def buckling_interval(length: float = math.pi, n: int = 256):
    """Smallest clamped buckling eigenpair on an interval.

    Returns ``(Lambda, y, v)`` with ``y`` the interior nodes and ``v``
    normalized to ``int v'^2 = 1`` and positive mean.
    """
    import scipy.linalg

    B, K, _ = interval_operators(n, length)
    w, V = scipy.linalg.eigh(B.toarray(), K.toarray(), subset_by_index=[0, 0])
    v = V[:, 0]
    if v.sum() < 0:
        v = -v
    y = np.arange(1, n) * (length / n)
    return float(w[0]), y, v


# --------------------------------------------------------------------------
# 2D rasterization


@dataclass(frozen=True, eq=False)
class DiscreteDomain:
    polygon: ConvexPolygon
    h: float
    origin: tuple[float, float]
    shape: tuple[int, int]          # (nx, ny) grid nodes including bbox edges
    # index[i, j] = unknown number of node (origin + (i, j) h), -1 if not interior
    index: np.ndarray = field(repr=False)
    nodes: np.ndarray = field(repr=False)   # (n_unknowns, 2) integer grid coordinates

    @property
    def n_unknowns(self) -> int:
        return len(self.nodes)

    def coordinates(self) -> np.ndarray:
        return np.asarray(self.origin) + self.h * self.nodes

    def grid_values(self, f: np.ndarray, fill: float = 0.0) -> np.ndarray:
        """Scatter a vector on unknowns into an ``(nx, ny)`` array."""
        g = np.full(self.shape, fill, dtype=float)
        g[self.nodes[:, 0], self.nodes[:, 1]] = f
        return g

    def integrate(self, f) -> float:
        return float(np.sum(f) * self.h**2)

    def boundary_distance(self) -> np.ndarray:
        """Distance from each unknown to the polygon boundary."""
        return self.polygon.inner_distance(self.coordinates())


def rasterize(poly: ConvexPolygon, h: float) -> DiscreteDomain:
    """Conservative rasterization of ``poly`` with spacing ``h``.

    The grid is anchored one spacing below-left of the bounding box. Raises
    TooCoarse when ``h > min_width/8`` or fewer than 25 nodes are interior.
    """
    if not h > 0:
        raise InputError("h must be positive")
    # one spare node beyond the bounding box so every boundary-ring node is on the grid
    lo = poly.vertices.min(axis=0) - h
    hi = poly.vertices.max(axis=0) + h
    nx = int(math.floor((hi[0] - lo[0]) / h + 1e-9)) + 1
    ny = int(math.floor((hi[1] - lo[1]) / h + 1e-9)) + 1
    I, J = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    pts = np.stack([lo[0] + h * I.ravel(), lo[1] + h * J.ravel()], axis=1)
    inside = (poly.inner_distance(pts) > 0.5 * h).reshape(nx, ny)
    count = int(inside.sum())
    w = min_width(poly)
    if count < MIN_NODES or h > w / 8.0 * (1 + 1e-12):
        raise TooCoarse(f"h={h:g} leaves {count} interior nodes (min width {w:g}); "
                        f"need >= {MIN_NODES} nodes and h <= w/8")
    index = np.full((nx, ny), -1, dtype=np.int64)
    # row-major over grid rows (y), then x
    order = np.argwhere(inside.T)[:, ::-1]
    index[order[:, 0], order[:, 1]] = np.arange(count)
    return DiscreteDomain(polygon=poly, h=float(h), origin=(float(lo[0]), float(lo[1])),
                          shape=(nx, ny), index=index, nodes=order)


# --------------------------------------------------------------------------
# 2D operators

_AXES = ((1, 0), (0, 1))


def _neighbor(dom, di, dj):
    """Index of the neighbour of each unknown in direction (di, dj), -1 outside."""
    i = dom.nodes[:, 0] + di
    j = dom.nodes[:, 1] + dj
    ok = (i >= 0) & (i < dom.shape[0]) & (j >= 0) & (j < dom.shape[1])
    out = np.full(len(i), -1, dtype=np.int64)
    out[ok] = dom.index[i[ok], j[ok]]
    return out


def stiffness_integer(dom: DiscreteDomain) -> sp.csr_matrix:
    """Integer 5-point ``-Laplacian`` stencil (4 on the diagonal)."""
    n = dom.n_unknowns
    rows, cols, vals = [np.arange(n)], [np.arange(n)], [np.full(n, 4.0)]
    for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        nb = _neighbor(dom, di, dj)
        ok = nb >= 0
        rows.append(np.arange(n)[ok])
        cols.append(nb[ok])
        vals.append(-np.ones(ok.sum()))
    K = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(n, n))
    return K


def boundary_laplacian_rows(dom: DiscreteDomain):
    """Integer Laplacian rows at the ring of exterior nodes touching the domain.

    Along each axis, a boundary node with exactly one interior neighbour sees
    a ghost equal to that neighbour, contributing ``2 v``.
    """
    nx, ny = dom.shape
    inside = dom.index >= 0
    pad = np.zeros((nx + 2, ny + 2), dtype=bool)
    pad[1:-1, 1:-1] = inside
    ring = (~pad[1:-1, 1:-1]) & (pad[2:, 1:-1] | pad[:-2, 1:-1] | pad[1:-1, 2:] | pad[1:-1, :-2])
    bnodes = np.argwhere(ring)
    rows, cols, vals = [], [], []
    idx = np.full((nx + 2, ny + 2), -1, dtype=np.int64)
    idx[1:-1, 1:-1] = dom.index
    for r, (i, j) in enumerate(bnodes):
        for di, dj in _AXES:
            p = idx[i + 1 - di, j + 1 - dj]
            q = idx[i + 1 + di, j + 1 + dj]
            if p >= 0 and q >= 0:
                rows += [r, r]
                cols += [p, q]
                vals += [1.0, 1.0]
            elif p >= 0 or q >= 0:
                rows.append(r)
                cols.append(p if p >= 0 else q)
                vals.append(2.0)
    Lb = sp.csr_matrix((vals, (rows, cols)), shape=(len(bnodes), dom.n_unknowns))
    Lb.sum_duplicates()
    return Lb, bnodes


@dataclass(frozen=True, eq=False)
class Operators:
    """Scaled operators of a DiscreteDomain; see module docstring."""
    K: sp.csr_matrix        # v.K.v = int |grad v|^2
    B: sp.csr_matrix        # v.B.v = int (Lap v)^2
    M: sp.csr_matrix        # v.M.v = int v^2
    L: sp.csr_matrix        # Laplacian at interior rows, then boundary rows
    weights: np.ndarray     # quadrature weight of each row of L


def assemble(dom: DiscreteDomain) -> Operators:
    h = dom.h
    Kint = stiffness_integer(dom)
    Lb, _ = boundary_laplacian_rows(dom)
    Lint = sp.vstack([-Kint, Lb]).tocsr()
    w = np.concatenate([np.ones(dom.n_unknowns), 0.5 * np.ones(Lb.shape[0])])
    Bint = (Lint.T @ sp.diags(w) @ Lint).tocsr()
    n = dom.n_unknowns
    # quadratic forms including the h^2 quadrature factor
    return Operators(K=Kint.tocsr(), B=Bint / h**2, M=sp.identity(n, format="csr") * h**2,
                     L=Lint / h**2, weights=w * h**2)


# --------------------------------------------------------------------------
# eigen solves


@dataclass(frozen=True, eq=False)
class EigenResult:
    value: float
    vector: np.ndarray = field(repr=False)   # unit discrete L2 norm, positive sum
    iterations: int
    residual_norm: float
    h: float
    kind: str = "dirichlet"
    domain: DiscreteDomain | None = field(default=None, repr=False)
    polygon: ConvexPolygon | None = field(default=None, repr=False)
    # extrapolated runs carry their error estimate here; raw single-level runs do not
    error_estimate: float | None = None
    label: str = "raw"


def _spd_factor(A: sp.spmatrix, what: str):
    """Sparse LU with symmetric ordering and diagonal pivots.

    For a symmetric matrix the pivots are those of an LDL^T factorization, so
    a nonpositive pivot means the assembled operator is not SPD.
    """
    lu = spla.splu(A.tocsc(), permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                   options={"SymmetricMode": True})
    piv = lu.U.diagonal()
    if np.any(piv <= 0) or not np.all(np.isfinite(piv)):
        raise IndefinitePencil(f"{what}: nonpositive pivot in a matrix assembled as SPD")
    return lu


def _inverse_iteration(solve, A, M, x0, tol, max_iter):
    """Inverse power iteration for ``A x = lam M x`` using ``solve = A^{-1}``."""
    x = x0 / math.sqrt(x0 @ (M @ x0))
    lam_old = np.inf
    for it in range(1, max_iter + 1):
        y = solve(M @ x)
        x = y / math.sqrt(y @ (M @ y))
        lam = float(x @ (A @ x))
        if abs(lam - lam_old) <= tol * abs(lam):
            return lam, x, it
        lam_old = lam
    raise NoConvergence(f"inverse iteration did not reach tol={tol:g} in {max_iter} steps")


def _smallest_pair(A, M, what, tol, method, max_iter):
    lu = _spd_factor(A, what)
    n = A.shape[0]
    x0 = np.ones(n)
    if method == "inverse":
        return _inverse_iteration(lu.solve, A, M, x0, tol, max_iter)
    if method != "lanczos":
        raise InputError(f"unknown method {method!r}")
    calls = [0]

    def op(b):
        calls[0] += 1
        return lu.solve(b)

    OPinv = spla.LinearOperator((n, n), matvec=op, dtype=float)
    try:
        w, V = spla.eigsh(A, k=1, M=M, sigma=0.0, which="LM", OPinv=OPinv, v0=x0,
                          tol=tol, maxiter=max_iter)
    except spla.ArpackNoConvergence as exc:
        raise NoConvergence(f"{what}: Lanczos did not converge") from exc
    return float(w[0]), V[:, 0], calls[0]


def _finish(value, x, iters, A, M, dom, kind):
    x = x / math.sqrt(dom.integrate(x * x))
    if x.sum() < 0:
        x = -x
    r = A @ x - value * (M @ x)
    res = float(np.linalg.norm(r) / (abs(value) * np.linalg.norm(M @ x)))
    return EigenResult(value=value, vector=x, iterations=iters, residual_norm=res,
                       h=dom.h, kind=kind, domain=dom, polygon=dom.polygon)


def dirichlet_lambda(dom: DiscreteDomain, tol: float = EIGEN_TOL, method: str = "lanczos",
                     max_iter: int = MAX_ITER) -> EigenResult:
    """Smallest eigenvalue of the 5-point Dirichlet Laplacian on ``dom``."""
    K = stiffness_integer(dom).tocsr()
    M = sp.identity(dom.n_unknowns, format="csr") * dom.h**2
    lam, x, it = _smallest_pair(K, M, "dirichlet", tol, method, max_iter)
    return _finish(lam, x, it, K, M, dom, "dirichlet")


def buckling_lambda(dom: DiscreteDomain, tol: float = EIGEN_TOL, method: str = "lanczos",
                    max_iter: int = MAX_ITER) -> EigenResult:
    """Smallest eigenvalue of the clamped pencil ``B v = Lambda K v``."""
    w = min_width(dom.polygon)
    if dom.h > w / 16.0 * (1 + 1e-12):
        raise TooCoarse(f"buckling needs h <= w/16 = {w / 16:g}, got {dom.h:g}")
    ops = assemble(dom)
    lam, x, it = _smallest_pair(ops.B, ops.K, "buckling", tol, method, max_iter)
    return _finish(lam, x, it, ops.B, ops.K, dom, "buckling")


# --------------------------------------------------------------------------
# mesh refinement


@dataclass(frozen=True)
class ConvergenceStudy:
    levels: list[tuple[float, float]]      # (h, value), decreasing h
    extrapolated: float
    observed_order: float                  # from the finest triple; nan if undefined
    orders: list[float]
    error_estimate: float                  # |extrapolated - finest|
    kind: str = "dirichlet"

    @property
    def low_order(self) -> bool:
        return not (self.observed_order >= 1.0)


def richardson(levels: Sequence[tuple[float, float]], order: float = 2.0) -> float:
    (hc, vc), (hf, vf) = levels[-2], levels[-1]
    r = (hc / hf) ** order
    return vf + (vf - vc) / (r - 1.0)


def observed_order(triple: Sequence[tuple[float, float]]) -> float:
    """Order ``p`` solving ``(v1-v2)/(v2-v3) = (h1^p - h2^p)/(h2^p - h3^p)``.

    Reduces to ``log(d1/d2)/log(r)`` for a constant ratio; solved by bisection
    otherwise. nan when the differences change sign.
    """
    (h1, v1), (h2, v2), (h3, v3) = triple
    d1, d2 = v1 - v2, v2 - v3
    if d1 == 0 or d2 == 0 or (d1 > 0) != (d2 > 0):
        return float("nan")
    target = d1 / d2

    def g(p):
        return (h1**p - h2**p) / (h2**p - h3**p) - target

    lo, hi = 1e-3, 12.0
    if g(lo) * g(hi) > 0:
        return float("nan")
    from scipy.optimize import brentq
    return float(brentq(g, lo, hi, xtol=1e-10))


SolverFn = Callable[[DiscreteDomain], EigenResult]


def refine_study(poly: ConvexPolygon, which: Literal["dirichlet", "buckling"],
                 levels: Sequence[float], tol: float = EIGEN_TOL,
                 keep_results: bool = False):
    """Solve on each grid spacing and Richardson-extrapolate at order 2.

    Returns a ConvergenceStudy, or ``(study, results)`` with ``keep_results``.
    """
    hs = sorted((float(h) for h in levels), reverse=True)
    if len(hs) < 3:
        raise InputError("refine_study needs at least 3 levels")
    solver = {"dirichlet": dirichlet_lambda, "buckling": buckling_lambda}[which]
    results = [solver(rasterize(poly, h), tol=tol) for h in hs]
    pts = [(r.h, r.value) for r in results]
    orders = [observed_order(pts[i:i + 3]) for i in range(len(pts) - 2)]
    ext = richardson(pts)
    study = ConvergenceStudy(levels=pts, extrapolated=ext, observed_order=orders[-1],
                             orders=orders, error_estimate=abs(ext - pts[-1][1]), kind=which)
    if study.low_order:
        log.warning("%s study on %s: observed order %.3g < 1", which, poly, study.observed_order)
    return (study, results) if keep_results else study


def extrapolated_result(study: ConvergenceStudy, finest: EigenResult) -> EigenResult:
    """EigenResult carrying the extrapolated value and the finest-level vector."""
    return EigenResult(value=study.extrapolated, vector=finest.vector,
                       iterations=finest.iterations, residual_norm=finest.residual_norm,
                       h=finest.h, kind=study.kind, domain=finest.domain,
                       polygon=finest.polygon, error_estimate=study.error_estimate,
                       label="extrapolated")


def default_levels(poly: ConvexPolygon, divisions: Sequence[int] = (32, 64, 128)) -> list[float]:
    w = min_width(poly)
    return [w / d for d in divisions]


# --------------------------------------------------------------------------
# derived quantities on grid functions


def discrete_gradient(dom: DiscreteDomain, f: np.ndarray) -> np.ndarray:
    """``(n, 2)`` gradient: central differences where both neighbours are
    interior, one-sided (against the zero extension) otherwise."""
    h = dom.h
    f = np.asarray(f, dtype=float)
    out = np.empty((dom.n_unknowns, 2))
    for ax, (di, dj) in enumerate(_AXES):
        p = _neighbor(dom, di, dj)
        m = _neighbor(dom, -di, -dj)
        fp = np.where(p >= 0, f[np.maximum(p, 0)], 0.0)
        fm = np.where(m >= 0, f[np.maximum(m, 0)], 0.0)
        both = (p >= 0) & (m >= 0)
        only_p = (p >= 0) & (m < 0)
        g = np.where(both, (fp - fm) / (2 * h), 0.0)
        g = np.where(only_p, (fp - f) / h, g)
        g = np.where((p < 0) & (m >= 0), (f - fm) / h, g)
        g = np.where((p < 0) & (m < 0), (fp - fm) / (2 * h), g)
        out[:, ax] = g
    return out


POINTWISE_MARGIN_INRADIUS = 0.35


def pointwise_margin(dom: DiscreteDomain) -> float:
    """Boundary exclusion for pointwise derivative checks on grid functions.

    ``max(3h, 0.35 r)`` with ``r`` the inradius. On edges that are not grid
    aligned the inner rasterization leaves a staircase boundary layer whose
    second differences blow up like ``1/h^2`` at any fixed multiple of ``h``;
    at a fixed physical distance they converge.
    """
    from .convex_geometry import inradius

    return max(3 * dom.h, POINTWISE_MARGIN_INRADIUS * inradius(dom.polygon)[0])


def interior_mask(dom: DiscreteDomain, margin: float) -> np.ndarray:
    """Unknowns at distance >= margin from the polygon boundary whose eight
    grid neighbours are unknowns too."""
    ok = dom.boundary_distance() >= margin
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            ok &= _neighbor(dom, di, dj) >= 0
    return ok


def grid_hessian(dom: DiscreteDomain, f: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Central second differences of ``f`` at masked unknowns, ``(k, 2, 2)``."""
    h = dom.h
    idx = np.flatnonzero(mask)

    def at(di, dj):
        return f[_neighbor(dom, di, dj)[idx]]

    c = f[idx]
    fxx = (at(1, 0) - 2 * c + at(-1, 0)) / h**2
    fyy = (at(0, 1) - 2 * c + at(0, -1)) / h**2
    fxy = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * h**2)
    H = np.empty((len(idx), 2, 2))
    H[:, 0, 0], H[:, 1, 1] = fxx, fyy
    H[:, 0, 1] = H[:, 1, 0] = fxy
    return H


def log_concavity_check(dom: DiscreteDomain, u: np.ndarray, D: float | None = None,
                        tolerance: float = 0.0, margin: float | None = None) -> InequalityReport:
    """Check ``-D^2 log u >= pi^2/D^2`` away from the boundary.

    Nodes closer than ``margin`` (default :func:`pointwise_margin`) to the
    boundary are skipped. Reported as
    ``pi^2/D^2 <= min_node lambda_min(-D^2 log u)``.
    """
    if D is None:
        D = diameter(dom.polygon)
    margin = pointwise_margin(dom) if margin is None else margin
    mask = interior_mask(dom, margin)
    u = np.asarray(u, dtype=float)
    # the Hessian stencil reads the 8 neighbours as well
    need = mask.copy()
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            nb = _neighbor(dom, di, dj)[mask]
            need[nb] = True
    if np.any(u[need] <= 0):
        raise NonPositiveU("u must be positive at the evaluated nodes")
    logu = np.zeros_like(u)
    logu[need] = np.log(u[need])
    H = grid_hessian(dom, logu, mask)
    mins = np.linalg.eigvalsh(-H)[:, 0]
    k = int(np.argmin(mins))
    worst = dom.coordinates()[np.flatnonzero(mask)[k]]
    return InequalityReport(
        name="log_concavity", lhs=math.pi**2 / D**2, rhs=float(mins[k]), tolerance=tolerance,
        metadata={"h": dom.h, "nodes": int(mask.sum()), "margin": margin,
                  "worst_node": [float(worst[0]), float(worst[1])]})
