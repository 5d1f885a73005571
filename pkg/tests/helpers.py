"""Random inputs and brute-force oracles shared by the test modules."""

from __future__ import annotations

import math

import numpy as np
from hypothesis import strategies as st

from fairfan.geometry import ConvexPolygon, validate_polygon


def random_convex(rng: np.random.Generator, m: int | None = None, lo: int = 3, hi: int = 9) -> ConvexPolygon:
    """Vertices at sorted random angles on a random ellipse, then rotated and shifted."""
    if m is None:
        m = int(rng.integers(lo, hi + 1))
    while True:
        t = np.sort(rng.uniform(0.0, 2 * math.pi, m))
        gaps = np.diff(np.concatenate((t, [t[0] + 2 * math.pi])))
        if gaps.min() > 0.15 and gaps.max() < math.pi - 0.1:
            break
    a, b = rng.uniform(1.0, 6.0, 2)
    phi = rng.uniform(0.0, 2 * math.pi)
    c, s = math.cos(phi), math.sin(phi)
    pts = np.column_stack((a * np.cos(t), b * np.sin(t))) @ np.array([[c, s], [-s, c]])
    return validate_polygon(pts + rng.uniform(-5.0, 5.0, 2))


def random_interior(rng: np.random.Generator, poly: ConvexPolygon, inset: float = 0.9):
    w = rng.dirichlet(np.ones(poly.m))
    c = np.array(poly.centroid)
    q = c + inset * (w @ poly.vertices - c)
    return float(q[0]), float(q[1])


def random_exterior(rng: np.random.Generator, poly: ConvexPolygon):
    """A point 0.2 to 3 diameters outside, in a random direction from the centroid."""
    c = np.array(poly.centroid)
    ang = rng.uniform(0.0, 2 * math.pi)
    d = np.array([math.cos(ang), math.sin(ang)])
    reach = float(np.max((poly.vertices - c) @ d))
    q = c + d * (reach + rng.uniform(0.2, 3.0) * poly.scale)
    return float(q[0]), float(q[1])


def random_boundary(rng: np.random.Generator, poly: ConvexPolygon):
    """A point inside an edge, away from its endpoints."""
    i = int(rng.integers(poly.m))
    t = rng.uniform(0.1, 0.9)
    q = poly.vertices[i] + t * poly.edges[i]
    return float(q[0]), float(q[1])


def similarity(rng: np.random.Generator):
    phi = rng.uniform(0.0, 2 * math.pi)
    s = rng.uniform(0.3, 4.0)
    mat = s * np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])
    return mat, rng.uniform(-20.0, 20.0, 2), phi, s


def ray_chord_oracle(poly: ConvexPolygon, origin, angle: float, steps: int = 200000) -> float:
    """Chord length by marching along the ray and testing containment."""
    from fairfan.geometry import edge_signed_distances

    d = np.array([math.cos(angle), math.sin(angle)])
    far = 3.0 * poly.scale + math.dist(origin, poly.centroid)
    ts = np.linspace(0.0, far, steps)
    pts = np.asarray(origin) + ts[:, None] * d
    rel = pts[:, None, :] - poly.vertices[None, :, :]
    inside = ((rel * poly.inward_normals[None, :, :]).sum(axis=2) >= 0.0).all(axis=1)
    return float(inside.sum()) * (ts[1] - ts[0])


@st.composite
def convex_polygons(draw, lo: int = 3, hi: int = 9):
    seed = draw(st.integers(0, 2**32 - 1))
    m = draw(st.integers(lo, hi))
    return random_convex(np.random.default_rng(seed), m)


seeds = st.integers(0, 2**32 - 1)
