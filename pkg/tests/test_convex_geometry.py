import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from payne_lab import convex_geometry as cg
from payne_lab.convex_geometry import ConvexPolygon
from payne_lab.errors import (DegenerateWidth, NotConvex, NotUnit, PolygonError,
                              PolygonParseError)

point_clouds = arrays(np.float64, st.tuples(st.integers(5, 30), st.just(2)),
                      elements=st.floats(-10, 10, allow_nan=False, width=32))


def hull_or_skip(pts):
    try:
        poly = ConvexPolygon.hull(pts)
        assume(cg.min_width(poly) > 1e-3 * cg.diameter(poly))
        return poly
    except Exception:
        assume(False)


def brute_width(poly, n=20000):
    t = np.linspace(0, np.pi, n, endpoint=False)
    nus = np.c_[np.cos(t), np.sin(t)]
    proj = poly.vertices @ nus.T
    return float(np.min(proj.max(0) - proj.min(0)))


def test_square_quantities(square):
    g = cg.summarize(square)
    assert g.diameter == pytest.approx(math.sqrt(2))
    assert g.min_width == pytest.approx(1.0)
    assert g.inradius == pytest.approx(0.5)
    assert g.area == pytest.approx(1.0)
    assert np.allclose(cg.inradius(square)[1], [0.5, 0.5])


def test_equilateral_triangle():
    t = ConvexPolygon.equilateral_triangle(2.0)
    assert cg.min_width(t) == pytest.approx(math.sqrt(3))
    assert cg.inradius(t)[0] == pytest.approx(2.0 / (2 * math.sqrt(3)))
    assert cg.diameter(t) == pytest.approx(2.0)


def test_orientation_normalized():
    cw = ConvexPolygon.from_points([(0, 0), (0, 1), (1, 1), (1, 0)])
    assert cw.area > 0


def test_collinear_and_duplicate_vertices_dropped():
    p = ConvexPolygon.from_points([(0, 0), (0.5, 0), (1, 0), (1, 0), (1, 1), (0, 1), (0, 0)])
    assert len(p.vertices) == 4


def test_reflex_vertex_named():
    with pytest.raises(NotConvex) as exc:
        ConvexPolygon.from_points([(0, 0), (2, 0), (1, 0.3), (1, 2)])
    assert exc.value.vertex_index == 2
    assert "(1, 0.3)" in str(exc.value)


def test_star_winding_rejected():
    t = 4 * np.pi * np.arange(5) / 5
    with pytest.raises(NotConvex):
        ConvexPolygon.from_points(np.c_[np.cos(t), np.sin(t)])


@pytest.mark.parametrize("pts", [[(0, 0), (1, 1)], [(0, 0), (1, 1), (2, 2)], [(1, 1)] * 4])
def test_degenerate_rejected(pts):
    with pytest.raises(PolygonError):
        ConvexPolygon.from_points(pts)


def test_vertices_read_only(square):
    with pytest.raises(ValueError):
        square.vertices[0, 0] = 5.0


def test_support_requires_unit(square):
    with pytest.raises(NotUnit):
        cg.support(square, (1.0, 1.0))
    assert cg.support(square, (0.0, 1.0)) == 1.0


def test_thin_polygon_degenerate_width():
    with pytest.raises(DegenerateWidth):
        cg.min_width(ConvexPolygon(np.array([[0, 0], [1, 0], [1, 1e-14], [0, 1e-14]])))


def test_parse_roundtrip_and_comments():
    text = "# tri\n0 0   # origin\n\n1,0\n0 1\n"
    p = cg.parse_polygon(text)
    assert len(p.vertices) == 3
    q = cg.parse_polygon(cg.format_polygon(p))
    assert np.array_equal(p.vertices, q.vertices)


@pytest.mark.parametrize("text,line", [("0 0\n1 0\nx 1\n", 3), ("0 0\n1 0 3\n0 1\n", 2),
                                       ("0 0\n1 nan\n0 1\n", 2)])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(PolygonParseError) as exc:
        cg.parse_polygon(text)
    assert exc.value.lineno == line
    assert str(exc.value).startswith(f"line {line}:")


def test_load_missing_file(tmp_path):
    with pytest.raises(PolygonParseError):
        cg.load_polygon(tmp_path / "nope.txt")


def test_width_lambda_sandwich_report(square):
    r = cg.width_lambda_sandwich(square, 2 * math.pi**2)
    assert r.passed and r.rhs == pytest.approx(2 * math.pi**2)


@given(point_clouds)
@settings(max_examples=200)
def test_ordering_inradius_width_diameter(pts):
    # 2r <= w <= D on every convex body
    poly = hull_or_skip(pts)
    g = cg.summarize(poly)
    assert 2 * g.inradius <= g.min_width * (1 + 1e-9)
    assert g.min_width <= g.diameter * (1 + 1e-12)
    assert g.area <= g.diameter * g.min_width * (1 + 1e-9)


@given(point_clouds)
@settings(max_examples=100)
def test_min_width_matches_brute_force(pts):
    poly = hull_or_skip(pts)
    w = cg.min_width(poly)
    assert w <= brute_width(poly) + 1e-12
    # direction sampling overshoots by at most D * (angular step)
    assert brute_width(poly) <= w + cg.diameter(poly) * np.pi / 20000


@given(point_clouds, st.floats(0, 2 * np.pi))
def test_support_matches_brute_force(pts, theta):
    poly = hull_or_skip(pts)
    nu = np.array([math.cos(theta), math.sin(theta)])
    nu /= np.linalg.norm(nu)
    assert cg.support(poly, nu) == pytest.approx(float(np.max(pts @ nu)), abs=1e-9)


@given(point_clouds, st.floats(0.1, 10.0))
def test_scaling(pts, t):
    poly = hull_or_skip(pts)
    a, b = cg.summarize(poly), cg.summarize(poly.scaled(t))
    assert b.diameter == pytest.approx(t * a.diameter, rel=1e-10)
    assert b.min_width == pytest.approx(t * a.min_width, rel=1e-10)
    assert b.inradius == pytest.approx(t * a.inradius, rel=1e-6)
    assert b.area == pytest.approx(t**2 * a.area, rel=1e-10)


@given(point_clouds, st.floats(0, 2 * np.pi), st.tuples(st.floats(-5, 5), st.floats(-5, 5)))
def test_rigid_motion_invariance(pts, angle, shift):
    poly = hull_or_skip(pts)
    moved = poly.rotated(angle).translated(shift)
    a, b = cg.summarize(poly), cg.summarize(moved)
    assert b.diameter == pytest.approx(a.diameter, rel=1e-10)
    assert b.min_width == pytest.approx(a.min_width, rel=1e-9)
    assert b.inradius == pytest.approx(a.inradius, rel=1e-6, abs=1e-9)


@given(point_clouds)
def test_inradius_center_is_inside(pts):
    poly = hull_or_skip(pts)
    r, c = cg.inradius(poly)
    assert poly.inner_distance(c)[0] == pytest.approx(r, rel=1e-6, abs=1e-9)


def test_thinness_value():
    T = cg.thinness(math.sqrt(2), 2 * math.pi**2, 2)
    assert T.value == pytest.approx(0.25)
