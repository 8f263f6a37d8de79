"""Convex polygons and the geometric quantities entering the bounds.

Only polygons are handled. For a polygon the symmetric support function
``h(nu) + h(-nu)`` is piecewise of the form ``|c . nu|`` between consecutive
edge normals, and its minimum over the circle is attained at an edge normal,
so the minimal width is exact as a minimum over edges.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

from .errors import DegenerateWidth, NotConvex, NotUnit, PolygonError, PolygonParseError
from .reports import InequalityReport

_REL_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ConvexPolygon:
    """Counter-clockwise convex polygon; build with :meth:`from_points`."""

    vertices: np.ndarray
    name: str = ""

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @classmethod
    def from_points(cls, points: Iterable, name: str = "") -> "ConvexPolygon":
        """Validate an ordered vertex list.

        Duplicate and collinear vertices are dropped (tolerance relative to
        the diameter), orientation is made counter-clockwise, and a reflex
        vertex raises NotConvex naming it.
        """
        pts = np.asarray(list(points), dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise PolygonError("vertices must be an (n, 2) array")
        if not np.all(np.isfinite(pts)):
            raise PolygonError("vertices must be finite")
        if len(pts) < 3:
            raise PolygonError("a polygon needs at least 3 vertices")
        scale = float(np.max(np.linalg.norm(pts[:, None] - pts[None], axis=-1)))
        if scale == 0:
            raise PolygonError("all vertices coincide")
        eps = _REL_TOL * scale
        # duplicates, keeping original indices for error messages
        keep = [0]
        for i in range(1, len(pts)):
            if np.linalg.norm(pts[i] - pts[keep[-1]]) > eps:
                keep.append(i)
        if len(keep) > 1 and np.linalg.norm(pts[keep[-1]] - pts[keep[0]]) <= eps:
            keep.pop()
        idx = np.array(keep)
        if _signed_area(pts[idx]) < 0:
            idx = idx[::-1]
        # collinear removal to a fixed point
        changed = True
        while changed and len(idx) >= 3:
            changed = False
            for k in range(len(idx)):
                a, b, c = pts[idx[k - 1]], pts[idx[k]], pts[idx[(k + 1) % len(idx)]]
                if abs(_cross(b - a, c - b)) <= eps * max(np.linalg.norm(c - a), eps):
                    idx = np.delete(idx, k)
                    changed = True
                    break
        if len(idx) < 3:
            raise PolygonError("polygon has zero area")
        v = pts[idx]
        for k in range(len(v)):
            a, b, c = v[k - 1], v[k], v[(k + 1) % len(v)]
            if _cross(b - a, c - b) < 0:
                i = int(idx[k])
                raise NotConvex(f"reflex vertex #{i} at ({b[0]:g}, {b[1]:g})",
                                vertex_index=i, vertex=tuple(b))
        # a star-shaped winding (turning number > 1) has only left turns too
        turning = sum(_angle(v[k] - v[k - 1], v[(k + 1) % len(v)] - v[k]) for k in range(len(v)))
        if abs(turning - 2 * math.pi) > 1e-6:
            raise NotConvex("vertex list winds more than once around the interior")
        return cls(v, name=name)

    # -- constructors -----------------------------------------------------

    @classmethod
    def rectangle(cls, a: float, b: float, name: str = "") -> "ConvexPolygon":
        """``[0, a] x [0, b]``."""
        return cls.from_points([(0, 0), (a, 0), (a, b), (0, b)], name=name or f"rect_{a:g}x{b:g}")

    @classmethod
    def regular(cls, n: int, circumradius: float = 1.0, phase: float = 0.0,
                name: str = "") -> "ConvexPolygon":
        t = phase + 2 * np.pi * np.arange(n) / n
        return cls.from_points(np.c_[circumradius * np.cos(t), circumradius * np.sin(t)],
                               name=name or f"regular_{n}")

    @classmethod
    def equilateral_triangle(cls, side: float = 1.0) -> "ConvexPolygon":
        return cls.from_points([(0, 0), (side, 0), (side / 2, side * math.sqrt(3) / 2)],
                               name=f"equilateral_{side:g}")

    @classmethod
    def hull(cls, points, name: str = "") -> "ConvexPolygon":
        """Convex hull of a point cloud."""
        pts = np.asarray(points, dtype=float)
        hull = ConvexHull(pts)
        return cls.from_points(pts[hull.vertices], name=name)

    # -- transforms -------------------------------------------------------

    def scaled(self, t: float) -> "ConvexPolygon":
        return ConvexPolygon(self.vertices * t, name=self.name)

    def rotated(self, angle: float, center=(0.0, 0.0)) -> "ConvexPolygon":
        c, s = math.cos(angle), math.sin(angle)
        R = np.array([[c, -s], [s, c]])
        ctr = np.asarray(center, dtype=float)
        return ConvexPolygon((self.vertices - ctr) @ R.T + ctr, name=self.name)

    def translated(self, shift) -> "ConvexPolygon":
        return ConvexPolygon(self.vertices + np.asarray(shift, dtype=float), name=self.name)

    # -- edge data --------------------------------------------------------

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Start points and edge vectors."""
        return self.vertices, np.roll(self.vertices, -1, axis=0) - self.vertices

    def inward_normals(self) -> np.ndarray:
        _, e = self.edges()
        n = np.c_[-e[:, 1], e[:, 0]]
        return n / np.linalg.norm(n, axis=1, keepdims=True)

    def inner_distance(self, pts) -> np.ndarray:
        """Signed distance to the nearest edge line, positive inside.

        Equals the distance to the boundary for points inside.
        """
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        n = self.inward_normals()
        d = np.einsum("pkc,kc->pk", pts[:, None, :] - self.vertices[None, :, :], n)
        return d.min(axis=1)

    def contains(self, pts, margin: float = 0.0) -> np.ndarray:
        return self.inner_distance(pts) > margin

    @property
    def area(self) -> float:
        return _signed_area(self.vertices)

    def __repr__(self):
        label = self.name or f"{len(self.vertices)}-gon"
        return f"ConvexPolygon({label})"


def _cross(a, b):
    return a[0] * b[1] - a[1] * b[0]


def _angle(a, b):
    return math.atan2(_cross(a, b), float(np.dot(a, b)))


def _signed_area(v):
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


# -- polygon files ----------------------------------------------------------


def parse_polygon(text: str, name: str = "") -> ConvexPolygon:
    """Parse ``x y`` lines; ``#`` starts a comment."""
    pts = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise PolygonParseError(f"expected 'x y', got {raw.strip()!r}", lineno)
        try:
            x, y = float(parts[0]), float(parts[1])
        except ValueError:
            raise PolygonParseError(f"not a number in {raw.strip()!r}", lineno) from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise PolygonParseError("non-finite coordinate", lineno)
        pts.append((x, y))
    if len(pts) < 3:
        raise PolygonParseError(f"need at least 3 vertices, found {len(pts)}")
    return ConvexPolygon.from_points(pts, name=name)


def load_polygon(path) -> ConvexPolygon:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise PolygonParseError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_polygon(text, name=path.stem)


def format_polygon(poly: ConvexPolygon) -> str:
    lines = [f"# {poly.name}"] if poly.name else []
    lines += [f"{float(x)!r} {float(y)!r}" for x, y in poly.vertices]
    return "\n".join(lines) + "\n"


# -- quantities ---------------------------------------------------------------


@dataclass(frozen=True)
class GeometrySummary:
    diameter: float
    min_width: float
    inradius: float
    area: float


@dataclass(frozen=True)
class ThinnessTerm:
    value: float
    dimension: int


def support(poly: ConvexPolygon, nu) -> float:
    """``max_x x . nu`` over the polygon; ``nu`` must be a unit vector."""
    nu = np.asarray(nu, dtype=float)
    if nu.shape != (2,) or abs(np.linalg.norm(nu) - 1.0) > 1e-12:
        raise NotUnit(f"direction {nu!r} is not a unit 2-vector")
    return float(np.max(poly.vertices @ nu))


def diameter(poly: ConvexPolygon) -> float:
    v = poly.vertices
    return float(np.max(np.linalg.norm(v[:, None] - v[None], axis=-1)))


def width_in_direction(poly: ConvexPolygon, nu) -> float:
    return support(poly, nu) + support(poly, -np.asarray(nu, dtype=float))


def min_width(poly: ConvexPolygon) -> float:
    """Minimum over edge normals of ``h(nu) + h(-nu)``."""
    proj = poly.vertices @ poly.inward_normals().T       # (V, E)
    w = float(np.min(proj.max(axis=0) - proj.min(axis=0)))
    if w <= _REL_TOL * diameter(poly):
        raise DegenerateWidth(f"polygon is numerically flat (width {w:g})")
    return w


def min_width_direction(poly: ConvexPolygon) -> np.ndarray:
    n = poly.inward_normals()
    proj = poly.vertices @ n.T
    return n[int(np.argmin(proj.max(axis=0) - proj.min(axis=0)))]


def inradius(poly: ConvexPolygon) -> tuple[float, np.ndarray]:
    """Chebyshev center by linear programming: max r s.t. n_k.(c - v_k) >= r."""
    n = poly.inward_normals()
    b = np.einsum("kc,kc->k", n, poly.vertices)
    # -n.c + r <= -n.v
    A_ub = np.c_[-n, np.ones(len(n))]
    res = linprog(c=[0.0, 0.0, -1.0], A_ub=A_ub, b_ub=-b,
                  bounds=[(None, None), (None, None), (0, None)], method="highs")
    if not res.success:
        raise PolygonError(f"inradius LP failed: {res.message}")
    return float(res.x[2]), np.array(res.x[:2])


def summarize(poly: ConvexPolygon) -> GeometrySummary:
    return GeometrySummary(diameter=diameter(poly), min_width=min_width(poly),
                           inradius=inradius(poly)[0], area=poly.area)


def thinness(D: float, lam: float, n: int = 2) -> ThinnessTerm:
    """``(n-1) pi^2 / (D^2 lambda)``."""
    if not (D > 0 and lam > 0):
        raise PolygonError("D and lambda must be positive")
    if n < 2:
        raise PolygonError("dimension must be >= 2")
    return ThinnessTerm(value=(n - 1) * math.pi**2 / (D**2 * lam), dimension=n)


def width_lambda_sandwich(poly: ConvexPolygon, lam: float, tolerance: float = 0.0) -> InequalityReport:
    """Strip comparison ``lambda >= pi^2 / w^2``, reported as ``pi^2 <= w^2 lambda``."""
    w = min_width(poly)
    return InequalityReport(name="width_lambda", lhs=math.pi**2, rhs=w**2 * lam,
                            tolerance=tolerance,
                            metadata={"min_width": w, "w2_lambda": w**2 * lam})
