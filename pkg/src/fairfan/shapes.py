"""Built-in test polygons."""

from __future__ import annotations

import math

from .geometry import ConvexPolygon, validate_polygon

HEXAGON_VERTICES = [(0.0, 0.0), (10.0, 0.0), (11.0, 7.0), (1.0, 12.0), (-4.0, 10.0), (-4.0, 4.0)]
TRIANGLE_VERTICES = [(0.0, 0.0), (10.0, 0.0), (5.0, 9.01042)]


def ellipse_polygon(a: float, b: float, m: int, center: tuple[float, float] = (0.0, 0.0)) -> ConvexPolygon:
    """Inscribed m-gon with vertices at equal parameter steps (a cos t, b sin t)."""
    cx, cy = center
    return validate_polygon([(cx + a * math.cos(2 * math.pi * k / m), cy + b * math.sin(2 * math.pi * k / m))
                             for k in range(m)])


def ellipse12() -> ConvexPolygon:
    """12-gon approximating the ellipse with semi-axes 8 and 5."""
    return ellipse_polygon(8.0, 5.0, 12)


def hexagon() -> ConvexPolygon:
    return validate_polygon(HEXAGON_VERTICES)


def triangle() -> ConvexPolygon:
    """Isosceles triangle with a perfect exterior 6-fan origin above its apex."""
    return validate_polygon(TRIANGLE_VERTICES)


def unit_square() -> ConvexPolygon:
    return validate_polygon([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])


BUILTIN = {
    "ellipse12": ellipse12,
    "hexagon": hexagon,
    "triangle": triangle,
    "square": unit_square,
}
