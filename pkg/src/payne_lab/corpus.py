"""A fixed, seeded corpus of convex polygons for the verification suite."""
from __future__ import annotations

import math

import numpy as np

from .convex_geometry import ConvexPolygon

DEFAULT_SEED = 20240611


def random_hull(rng: np.random.Generator, n_vertices: int, name: str = "") -> ConvexPolygon:
    """Convex polygon with exactly ``n_vertices`` vertices.

    Angles are drawn on an ellipse with random axes and rotation, so every
    sample point is extreme; a minimum angular gap keeps edges from being
    nearly collinear.
    """
    while True:
        t = np.sort(rng.uniform(0.0, 2 * np.pi, n_vertices))
        gaps = np.diff(np.r_[t, t[0] + 2 * np.pi])
        if gaps.min() > 0.15 and gaps.max() < np.pi - 0.1:
            break
    a, b = 1.0, rng.uniform(0.35, 1.0)
    phi = rng.uniform(0.0, np.pi)
    pts = np.c_[a * np.cos(t), b * np.sin(t)]
    c, s = math.cos(phi), math.sin(phi)
    pts = pts @ np.array([[c, s], [-s, c]])
    poly = ConvexPolygon.hull(pts, name=name or f"hull{n_vertices}")
    assert len(poly.vertices) == n_vertices
    return poly


def standard_corpus(seed: int = DEFAULT_SEED, n_random: int = 10) -> list[ConvexPolygon]:
    """Squares, 1 x k rectangles up to k = 16, triangles, regular polygons and
    ``n_random`` random hulls with 5 to 12 vertices."""
    P = ConvexPolygon
    polys = [
        P.rectangle(1, 1, name="square"),
        P.from_points(P.rectangle(2.5, 2.5).rotated(math.pi / 6).vertices, name="square_rot30"),
        P.rectangle(1, 2, name="rect_1x2"),
        P.rectangle(1, 4, name="rect_1x4"),
        P.rectangle(1, 8, name="rect_1x8"),
        P.rectangle(1, 16, name="rect_1x16"),
        P.from_points(P.rectangle(1, 3).rotated(0.4).vertices, name="rect_1x3_rot"),
        P.equilateral_triangle(1.0),
        P.from_points([(0, 0), (1, 0), (0, 1)], name="right_isosceles"),
        P.from_points([(0, 0), (2, 0), (0, 1)], name="right_2x1"),
        P.regular(5, name="pentagon"),
        P.regular(6, name="hexagon"),
    ]
    rng = np.random.default_rng(seed)
    counts = np.resize(np.arange(5, 13), n_random)
    for i, m in enumerate(counts):
        polys.append(random_hull(rng, int(m), name=f"hull{i:02d}_{m}v"))
    return polys
