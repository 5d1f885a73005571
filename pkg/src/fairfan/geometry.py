"""Convex polygon kernel.

Everything here works on small dense numpy arrays.  Tolerances are relative
to the polygon diameter, so the kernel is scale free.

The two sweep tables (:class:`RadialTable`, :class:`TangentTable`) are the
performance-critical part of the package: they invert "swept area" into
"ray direction" in closed form, vectorised over many target areas at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import (
    ApexOnVertex,
    DegenerateEdge,
    NotConvex,
    PointNotInRegion,
    TooFewVertices,
)

TWO_PI = 2.0 * math.pi

EPS_CONV = 1e-9
EPS_CLS = 1e-9
EPS_PAR = 1e-12

INTERIOR = "interior"
BOUNDARY = "boundary"
EXTERIOR = "exterior"


class Point(NamedTuple):
    x: float
    y: float


class Ray(NamedTuple):
    origin: Point
    angle: float


def normalize_angle(theta: float) -> float:
    """Map an angle to [0, 2*pi)."""
    t = math.fmod(theta, TWO_PI)
    if t < 0.0:
        t += TWO_PI
    if t >= TWO_PI:
        t = 0.0
    return t


def _cross(ax, ay, bx, by):
    return ax * by - ay * bx


def shoelace(points: np.ndarray) -> float:
    """Signed area of a closed vertex chain (positive when CCW)."""
    x = points[:, 0]
    y = points[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def chain_length(points: np.ndarray) -> float:
    d = np.roll(points, -1, axis=0) - points
    return float(np.hypot(d[:, 0], d[:, 1]).sum())


@dataclass(frozen=True, eq=False)
class ConvexPolygon:
    """A validated, counter-clockwise convex polygon.

    Build instances through :func:`validate_polygon`; the constructor does
    not re-check anything.
    """

    vertices: np.ndarray
    area: float
    perimeter: float
    reversed_input: bool = False

    @property
    def m(self) -> int:
        return len(self.vertices)

    @cached_property
    def edges(self) -> np.ndarray:
        return np.roll(self.vertices, -1, axis=0) - self.vertices

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        return np.hypot(self.edges[:, 0], self.edges[:, 1])

    @cached_property
    def arc_offsets(self) -> np.ndarray:
        """Boundary arclength from vertex 0 to each vertex, CCW."""
        return np.concatenate(([0.0], np.cumsum(self.edge_lengths)[:-1]))

    @cached_property
    def inward_normals(self) -> np.ndarray:
        e = self.edges / self.edge_lengths[:, None]
        return np.column_stack((-e[:, 1], e[:, 0]))

    @cached_property
    def diameter(self) -> float:
        v = self.vertices
        d = v[:, None, :] - v[None, :, :]
        return float(np.sqrt((d ** 2).sum(axis=2)).max())

    @property
    def scale(self) -> float:
        return self.diameter

    @cached_property
    def centroid(self) -> Point:
        v = self.vertices
        nxt = np.roll(v, -1, axis=0)
        c = v[:, 0] * nxt[:, 1] - nxt[:, 0] * v[:, 1]
        a6 = 3.0 * c.sum()
        return Point(float(((v[:, 0] + nxt[:, 0]) * c).sum() / a6),
                     float(((v[:, 1] + nxt[:, 1]) * c).sum() / a6))

    @cached_property
    def bbox(self) -> tuple[float, float, float, float]:
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        return float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])

    def points(self) -> list[Point]:
        return [Point(float(x), float(y)) for x, y in self.vertices]

    def transformed(self, matrix: np.ndarray, offset: Sequence[float]) -> "ConvexPolygon":
        """Image under x -> matrix @ x + offset (matrix a similarity)."""
        v = self.vertices @ np.asarray(matrix, dtype=float).T + np.asarray(offset, dtype=float)
        return validate_polygon(v)

    def __repr__(self) -> str:
        return f"ConvexPolygon(m={self.m}, area={self.area:.6g})"


def validate_polygon(raw_vertices: Iterable[Sequence[float]]) -> ConvexPolygon:
    """Check and normalise a vertex list into a :class:`ConvexPolygon`.

    Clockwise input is reversed and flagged via ``reversed_input``.
    """
    v = np.array([[float(p[0]), float(p[1])] for p in raw_vertices], dtype=float)
    if len(v) < 3:
        raise TooFewVertices(f"need at least 3 vertices, got {len(v)}")
    if not np.all(np.isfinite(v)):
        raise TooFewVertices("vertex coordinates must be finite")
    m = len(v)
    d = v[:, None, :] - v[None, :, :]
    scale = float(np.sqrt((d ** 2).sum(axis=2)).max())
    if scale == 0.0:
        raise DegenerateEdge("all vertices coincide")
    edges = np.roll(v, -1, axis=0) - v
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    short = np.nonzero(lengths <= EPS_CLS * scale)[0]
    if len(short):
        i = int(short[0])
        raise DegenerateEdge(f"vertices {i} and {(i + 1) % m} coincide")

    reversed_input = False
    if shoelace(v) < 0.0:
        v = v[::-1].copy()
        edges = np.roll(v, -1, axis=0) - v
        reversed_input = True

    prev = np.roll(edges, 1, axis=0)
    turn = prev[:, 0] * edges[:, 1] - prev[:, 1] * edges[:, 0]
    tol = EPS_CONV * scale * scale
    for i in range(m):
        if turn[i] <= tol:
            triple = ((i - 1) % m, i, (i + 1) % m)
            kind = "collinear" if turn[i] > -tol else "reflex"
            raise NotConvex(f"{kind} vertex triple {triple}", triple)
    # all left turns but wound more than once (a star)
    ang = np.arctan2(turn, (prev * edges).sum(axis=1)).sum()
    if abs(ang - TWO_PI) > 1e-6:
        raise NotConvex("vertex chain winds more than once", None)

    lengths = np.hypot(edges[:, 0], edges[:, 1])
    v.setflags(write=False)
    return ConvexPolygon(v, shoelace(v), float(lengths.sum()), reversed_input)


def area(polygon: ConvexPolygon) -> float:
    return polygon.area


def perimeter(polygon: ConvexPolygon) -> float:
    return polygon.perimeter


def edge_signed_distances(polygon: ConvexPolygon, p: Sequence[float]) -> np.ndarray:
    """Signed distance of ``p`` to every edge line, positive on the inner side."""
    rel = np.asarray(p, dtype=float) - polygon.vertices
    return (rel * polygon.inward_normals).sum(axis=1)


def classify_point(polygon: ConvexPolygon, p: Sequence[float], eps: float = EPS_CLS) -> str:
    dmin = float(edge_signed_distances(polygon, p).min())
    band = eps * polygon.scale
    if dmin > band:
        return INTERIOR
    if dmin >= -band:
        return BOUNDARY
    return EXTERIOR


def chord_length(polygon: ConvexPolygon, ray: Ray) -> float:
    """Length of the intersection of a ray with the polygon (Cyrus-Beck)."""
    o = np.asarray(ray.origin, dtype=float)
    d = np.array([math.cos(ray.angle), math.sin(ray.angle)])
    nrm = polygon.inward_normals
    dist = ((o - polygon.vertices) * nrm).sum(axis=1)
    rate = nrm @ d
    t0, t1 = 0.0, math.inf
    tiny = EPS_CLS * polygon.scale
    for k in range(polygon.m):
        if abs(rate[k]) < 1e-15:
            if dist[k] < -tiny:
                return 0.0
            continue
        t = -dist[k] / rate[k]
        if rate[k] > 0:
            t0 = max(t0, t)
        else:
            t1 = min(t1, t)
    length = t1 - t0
    if not math.isfinite(length) or length <= tiny:
        return 0.0
    return length


def boundary_distance_extremes(polygon: ConvexPolygon, p: Sequence[float]) -> tuple[float, float]:
    """(nearest edge distance, farthest vertex distance) for a point in the region."""
    if classify_point(polygon, p) == EXTERIOR:
        raise PointNotInRegion(f"point {tuple(p)} lies outside the polygon")
    q = np.asarray(p, dtype=float)
    d_max = float(np.hypot(*(polygon.vertices - q).T).max())
    d_min = float(segment_distances(polygon, q).min())
    return d_min, d_max


def segment_distances(polygon: ConvexPolygon, q: np.ndarray) -> np.ndarray:
    """Euclidean distance from ``q`` to every edge segment."""
    rel = q - polygon.vertices
    e = polygon.edges
    t = np.clip((rel * e).sum(axis=1) / (polygon.edge_lengths ** 2), 0.0, 1.0)
    foot = rel - t[:, None] * e
    return np.hypot(foot[:, 0], foot[:, 1])


def edge_extension_intersections(polygon: ConvexPolygon) -> list[Point]:
    """Exterior meeting points of the supporting lines of pairs of edges."""
    v = polygon.vertices
    e = polygon.edges
    lengths = polygon.edge_lengths
    band = EPS_CLS * polygon.scale
    out: list[Point] = []
    m = polygon.m
    for i in range(m):
        for j in range(i + 1, m):
            den = _cross(e[i, 0], e[i, 1], e[j, 0], e[j, 1])
            if abs(den) <= EPS_PAR * lengths[i] * lengths[j]:
                continue
            w = v[j] - v[i]
            t = _cross(w[0], w[1], e[j, 0], e[j, 1]) / den
            x = v[i] + t * e[i]
            if classify_point(polygon, x) != EXTERIOR:
                continue
            if any(math.hypot(x[0] - q.x, x[1] - q.y) <= band for q in out):
                continue
            out.append(Point(float(x[0]), float(x[1])))
    return out


def clip_halfplane(points: np.ndarray, origin: Sequence[float], direction: Sequence[float]) -> np.ndarray:
    """Keep the part of a convex polygon left of the directed line (origin, direction)."""
    if len(points) == 0:
        return points
    ox, oy = origin
    dx, dy = direction
    side = dx * (points[:, 1] - oy) - dy * (points[:, 0] - ox)
    if np.all(side >= 0.0):
        return points
    if np.all(side <= 0.0):
        return points[:0]
    out = []
    m = len(points)
    for i in range(m):
        j = (i + 1) % m
        si, sj = side[i], side[j]
        if si >= 0.0:
            out.append(points[i])
        if (si > 0.0 and sj < 0.0) or (si < 0.0 and sj > 0.0):
            t = si / (si - sj)
            out.append(points[i] + t * (points[j] - points[i]))
    return np.array(out) if out else points[:0]


def dedupe_chain(points: np.ndarray, tol: float) -> np.ndarray:
    """Drop consecutive (cyclic) vertices closer than ``tol``."""
    if len(points) == 0:
        return points
    keep = [points[0]]
    for q in points[1:]:
        if math.hypot(q[0] - keep[-1][0], q[1] - keep[-1][1]) > tol:
            keep.append(q)
    while len(keep) > 1 and math.hypot(keep[0][0] - keep[-1][0], keep[0][1] - keep[-1][1]) <= tol:
        keep.pop()
    return np.array(keep)


def is_convex_chain(points: np.ndarray, scale: float, eps: float = 1e-9) -> bool:
    """True for a CCW chain with no reflex turn (collinear turns allowed)."""
    if len(points) < 3:
        return False
    e = np.roll(points, -1, axis=0) - points
    prev = np.roll(e, 1, axis=0)
    turn = prev[:, 0] * e[:, 1] - prev[:, 1] * e[:, 0]
    return bool(np.all(turn >= -eps * scale * scale)) and shoelace(points) > 0.0


# ---------------------------------------------------------------------------
# sweep tables


class Hits(NamedTuple):
    """Per-ray quantities returned by the sweep tables (arrays)."""

    angle: np.ndarray
    chord: np.ndarray
    far_s: np.ndarray
    near_s: np.ndarray | None


@dataclass(frozen=True, eq=False)
class SectorTable:
    """Angular sectors of a polygon seen from an apex.

    ``vertex_angles`` are unwrapped and increasing, ``cumulative_areas`` the
    area swept from the first angle, ``boundary_arclengths`` the length of
    boundary chain swept (far chain for exterior apexes).
    """

    apex: Point
    kind: str
    vertex_angles: np.ndarray
    cumulative_areas: np.ndarray
    boundary_arclengths: np.ndarray
    apex_on_vertex: bool

    @property
    def total_area(self) -> float:
        return float(self.cumulative_areas[-1])


@dataclass(frozen=True, eq=False)
class RadialTable(SectorTable):
    """Apex inside the polygon or on its boundary.

    Within a sector the ray hits a single edge and the swept area is linear
    in the edge parameter of the hit point.
    """

    start: np.ndarray = field(default=None)   # sector start vertices (k, 2)
    span: np.ndarray = field(default=None)    # sector edge vectors (k, 2)
    sector_areas: np.ndarray = field(default=None)
    sector_lengths: np.ndarray = field(default=None)
    closed: bool = True

    def solve(self, areas: np.ndarray) -> Hits:
        """Rays whose swept area from the start direction equals ``areas``.

        ``areas`` must lie in [0, total_area].
        """
        a = np.asarray(areas, dtype=float)
        cum = self.cumulative_areas
        j = np.clip(np.searchsorted(cum, a, side="right") - 1, 0, len(self.sector_areas) - 1)
        sa = self.sector_areas[j]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(sa > 0.0, (a - cum[j]) / sa, 0.0)
        t = np.clip(t, 0.0, 1.0)
        w = self.start[j]
        hx = w[..., 0] + t * self.span[j, 0]
        hy = w[..., 1] + t * self.span[j, 1]
        px, py = self.apex
        rx, ry = hx - px, hy - py
        wx, wy = w[..., 0] - px, w[..., 1] - py
        ang = self.vertex_angles[j] + np.arctan2(wx * ry - wy * rx, wx * rx + wy * ry)
        chord = np.hypot(rx, ry)
        s = self.boundary_arclengths[j] + t * self.sector_lengths[j]
        return Hits(ang, chord, s, None)

    def area_at_angle(self, theta: np.ndarray) -> np.ndarray:
        """Swept area from the start direction to ``theta`` (closed tables only)."""
        phi = self.vertex_angles
        th = phi[0] + np.mod(np.asarray(theta, dtype=float) - phi[0], TWO_PI)
        j = np.clip(np.searchsorted(phi, th, side="right") - 1, 0, len(self.sector_areas) - 1)
        dx, dy = np.cos(th), np.sin(th)
        w = self.start[j]
        px, py = self.apex
        num = (px - w[..., 0]) * dy - (py - w[..., 1]) * dx
        den = self.span[j, 0] * dy - self.span[j, 1] * dx
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(den != 0.0, num / den, 0.0)
        t = np.clip(t, 0.0, 1.0)
        return self.cumulative_areas[j] + t * self.sector_areas[j]


@dataclass(frozen=True, eq=False)
class TangentTable(SectorTable):
    """Apex strictly outside the polygon.

    Directions are parametrised by u = tan(angle - ref) where ref bisects the
    viewing wedge.  Each sector has one entry (near) edge and one exit (far)
    edge, and the swept area inverts through a quadratic in u.
    """

    ref: float = 0.0
    u: np.ndarray = field(default=None)             # sector boundaries (k+1,)
    far_x0: np.ndarray = field(default=None)        # far hit abscissa at sector start
    near_x0: np.ndarray = field(default=None)
    far_g: np.ndarray = field(default=None)         # x(u0+v) = x0 / (1 + g v)
    near_g: np.ndarray = field(default=None)
    far_edge: np.ndarray = field(default=None)
    near_edge: np.ndarray = field(default=None)
    far_len: float = 0.0
    near_len: float = 0.0
    start_chord: float = 0.0
    end_chord: float = 0.0
    # per-edge chain coordinates (arclength at CCW edge start), frame data
    far_offset: np.ndarray = field(default=None)
    near_offset: np.ndarray = field(default=None)
    frame_vertices: np.ndarray = field(default=None)
    edge_lengths: np.ndarray = field(default=None)

    def _sector_area(self, j, v):
        xf = self.far_x0[j]
        xn = self.near_x0[j]
        return 0.5 * v * (xf * xf / (1.0 + self.far_g[j] * v) - xn * xn / (1.0 + self.near_g[j] * v))

    def solve(self, areas: np.ndarray) -> Hits:
        a = np.asarray(areas, dtype=float)
        cum = self.cumulative_areas
        nsec = len(self.far_x0)
        j = np.clip(np.searchsorted(cum, a, side="right") - 1, 0, nsec - 1)
        T = a - cum[j]
        Xf = self.far_x0[j] ** 2
        Xn = self.near_x0[j] ** 2
        gf = self.far_g[j]
        gn = self.near_g[j]
        qa = 0.5 * (Xf * gn - Xn * gf) - T * gf * gn
        qb = 0.5 * (Xf - Xn) - T * (gf + gn)
        disc = np.maximum(qb * qb + 4.0 * qa * T, 0.0)
        den = qb + np.sqrt(disc)
        width = self.u[j + 1] - self.u[j]
        with np.errstate(divide="ignore", invalid="ignore"):
            v = np.where(den > 0.0, 2.0 * T / den, width)
        v = np.where(T <= 0.0, 0.0, np.clip(v, 0.0, width))
        # one Newton polish step
        xf = self.far_x0[j] / (1.0 + gf * v)
        xn = self.near_x0[j] / (1.0 + gn * v)
        slope = 0.5 * (xf * xf - xn * xn)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(slope > 0.0, (self._sector_area(j, v) - T) / slope, 0.0)
        v = np.clip(v - step, 0.0, width)
        v = np.where(a >= cum[-1], width, np.where(T <= 0.0, 0.0, v))
        return self._hits(j, v)

    def _hits(self, j, v) -> Hits:
        u = self.u[j] + v
        xf = self.far_x0[j] / (1.0 + self.far_g[j] * v)
        xn = self.near_x0[j] / (1.0 + self.near_g[j] * v)
        root = np.sqrt(1.0 + u * u)
        chord = (xf - xn) * root
        fv = self.frame_vertices
        fe = self.far_edge[j]
        ne = self.near_edge[j]
        m = len(fv)
        # edge parameter of each hit, measured from the CCW start vertex
        af = fv[fe]
        bf = fv[(fe + 1) % m]
        an = fv[ne]
        bn = fv[(ne + 1) % m]
        tf = _param_on(af, bf, xf, xf * u)
        tn = _param_on(an, bn, xn, xn * u)
        far_s = self.far_offset[fe] + tf * self.edge_lengths[fe]
        near_s = self.near_offset[ne] + tn * self.edge_lengths[ne]
        return Hits(self.ref + np.arctan(u), chord, far_s, near_s)

    def chord_at(self, j: int, v: float) -> float:
        u = self.u[j] + v
        xf = self.far_x0[j] / (1.0 + self.far_g[j] * v)
        xn = self.near_x0[j] / (1.0 + self.near_g[j] * v)
        return float((xf - xn) * math.sqrt(1.0 + u * u))


def _param_on(a, b, x, y):
    ex = b[..., 0] - a[..., 0]
    ey = b[..., 1] - a[..., 1]
    t = ((x - a[..., 0]) * ex + (y - a[..., 1]) * ey) / (ex * ex + ey * ey)
    return np.clip(t, 0.0, 1.0)


def sector_table(polygon: ConvexPolygon, apex: Sequence[float], *,
                 allow_vertex_apex: bool = False) -> SectorTable:
    """Build the angular sector table of ``polygon`` as seen from ``apex``.

    Boundary apexes are snapped onto the boundary.  An apex on a vertex
    raises :class:`ApexOnVertex` unless ``allow_vertex_apex`` is set.
    """
    kind = classify_point(polygon, apex)
    if kind == INTERIOR:
        return _radial_interior(polygon, Point(float(apex[0]), float(apex[1])))
    if kind == BOUNDARY:
        return _radial_boundary(polygon, apex, allow_vertex_apex)
    return _tangent_table(polygon, Point(float(apex[0]), float(apex[1])), allow_vertex_apex)


def _radial_from_chain(polygon, apex, order, closed, on_vertex, kind) -> RadialTable:
    v = polygon.vertices
    W = v[order]
    px, py = apex
    rel = W - np.array([px, py])
    start = W[:-1]
    span = W[1:] - W[:-1]
    cr = rel[:-1, 0] * rel[1:, 1] - rel[:-1, 1] * rel[1:, 0]
    sector_areas = np.maximum(0.5 * cr, 0.0)
    cum = np.concatenate(([0.0], np.cumsum(sector_areas)))
    dots = (rel[:-1] * rel[1:]).sum(axis=1)
    steps = np.arctan2(cr, dots)
    phi0 = normalize_angle(math.atan2(rel[0, 1], rel[0, 0]))
    phi = phi0 + np.concatenate(([0.0], np.cumsum(steps)))
    seclen = np.hypot(span[:, 0], span[:, 1])
    s = np.concatenate(([0.0], np.cumsum(seclen)))
    return RadialTable(
        apex=Point(float(px), float(py)), kind=kind, vertex_angles=phi,
        cumulative_areas=cum, boundary_arclengths=s, apex_on_vertex=on_vertex,
        start=start, span=span, sector_areas=sector_areas, sector_lengths=seclen,
        closed=closed,
    )


def _radial_interior(polygon: ConvexPolygon, apex: Point) -> RadialTable:
    rel = polygon.vertices - np.array(apex)
    ang = np.mod(np.arctan2(rel[:, 1], rel[:, 0]), TWO_PI)
    k = int(np.argmin(ang))
    m = polygon.m
    order = [(k + i) % m for i in range(m + 1)]
    return _radial_from_chain(polygon, apex, order, True, False, INTERIOR)


def snap_to_boundary(polygon: ConvexPolygon, p: Sequence[float]) -> tuple[Point, int, float]:
    """Nearest boundary point, its edge index and edge parameter."""
    q = np.asarray(p, dtype=float)
    dist = segment_distances(polygon, q)
    k = int(np.argmin(dist))
    e = polygon.edges[k]
    t = float(np.clip(np.dot(q - polygon.vertices[k], e) / np.dot(e, e), 0.0, 1.0))
    x = polygon.vertices[k] + t * e
    return Point(float(x[0]), float(x[1])), k, t


def _radial_boundary(polygon: ConvexPolygon, p, allow_vertex_apex: bool) -> RadialTable:
    m = polygon.m
    apex, k, t = snap_to_boundary(polygon, p)
    band = EPS_CLS * polygon.scale
    tl = t * polygon.edge_lengths[k]
    on_vertex = False
    if tl <= band:
        # apex on vertex k: sweep k+1 .. k-1
        on_vertex = True
        apex = Point(*map(float, polygon.vertices[k]))
        order = [(k + 1 + i) % m for i in range(m - 1)]
    elif polygon.edge_lengths[k] - tl <= band:
        on_vertex = True
        k1 = (k + 1) % m
        apex = Point(*map(float, polygon.vertices[k1]))
        order = [(k1 + 1 + i) % m for i in range(m - 1)]
    else:
        order = [(k + 1 + i) % m for i in range(m)]
    if on_vertex and not allow_vertex_apex:
        raise ApexOnVertex(f"apex {tuple(apex)} coincides with a polygon vertex")
    return _radial_from_chain(polygon, apex, order, False, on_vertex, BOUNDARY)


def _tangent_table(polygon: ConvexPolygon, apex: Point, allow_vertex_apex: bool) -> TangentTable:
    v = polygon.vertices
    m = polygon.m
    P = np.array(apex)
    c = np.array(polygon.centroid) - P
    c_ang = math.atan2(c[1], c[0])
    rel = v - P
    psi = np.arctan2(rel[:, 1] * math.cos(c_ang) - rel[:, 0] * math.sin(c_ang),
                     rel[:, 0] * math.cos(c_ang) + rel[:, 1] * math.sin(c_ang))
    ref = c_ang + 0.5 * (float(psi.min()) + float(psi.max()))
    cr, sr = math.cos(ref), math.sin(ref)
    fx = rel[:, 0] * cr + rel[:, 1] * sr
    fy = -rel[:, 0] * sr + rel[:, 1] * cr
    fv = np.column_stack((fx, fy))
    uv = fy / fx
    dist = np.hypot(fx, fy)
    band = EPS_CLS * polygon.scale

    order = np.argsort(uv, kind="stable")
    # group vertices seen along (numerically) the same direction
    groups: list[list[int]] = [[int(order[0])]]
    for idx in order[1:]:
        idx = int(idx)
        lead = groups[-1][0]
        # perpendicular distance of vertex idx to the ray through the group lead
        perp = abs(fx[lead] * fy[idx] - fy[lead] * fx[idx]) / dist[lead]
        if perp <= band:
            groups[-1].append(idx)
        else:
            groups.append([idx])
    if len(groups) < 2:
        raise ApexOnVertex("degenerate view of the polygon from the apex")

    def anchors(group):
        far = max(group, key=lambda i: dist[i])
        near = min(group, key=lambda i: dist[i])
        return far, near

    fs, ns = anchors(groups[0])
    fe_, ne_ = anchors(groups[-1])
    lengths = polygon.edge_lengths

    def chain_offsets(a, b):
        off = np.full(m, np.nan)
        acc = 0.0
        i = a
        while i != b:
            off[i] = acc
            acc += lengths[i]
            i = (i + 1) % m
        return off, acc

    far_offset, far_len = chain_offsets(fs, fe_)
    near_offset, near_len = chain_offsets(ne_, ns)
    start_chord = float(dist[fs] - dist[ns])
    end_chord = float(dist[fe_] - dist[ne_])

    u_bounds = np.array([uv[g[0]] for g in groups])
    nsec = len(u_bounds) - 1
    umid = 0.5 * (u_bounds[:-1] + u_bounds[1:])
    # crossing edges of each mid ray: y - u x changes sign along the edge
    sA = fy[None, :] - umid[:, None] * fx[None, :]
    sB = np.roll(sA, -1, axis=1)
    crosses = sA * sB < 0.0
    tx = fx[None, :] + (np.roll(fx, -1)[None, :] - fx[None, :]) * sA / np.where(crosses, sA - sB, 1.0)
    tx = np.where(crosses, tx, np.nan)
    far_edge = np.nanargmax(tx, axis=1)
    near_edge = np.nanargmin(tx, axis=1)

    def line_terms(edge_idx):
        a = fv[edge_idx]
        b = fv[(edge_idx + 1) % m]
        nx = b[:, 1] - a[:, 1]
        ny = -(b[:, 0] - a[:, 0])
        cc = nx * a[:, 0] + ny * a[:, 1]
        den = nx + ny * u_bounds[:-1]
        x0 = cc / den
        g = ny / den
        return x0, g

    far_x0, far_g = line_terms(far_edge)
    near_x0, near_g = line_terms(near_edge)
    width = u_bounds[1:] - u_bounds[:-1]
    sec = 0.5 * width * (far_x0 ** 2 / (1.0 + far_g * width) - near_x0 ** 2 / (1.0 + near_g * width))
    cum = np.concatenate(([0.0], np.cumsum(np.maximum(sec, 0.0))))

    # far-chain arclength at each sector boundary
    a0 = fv[far_edge]
    b0 = fv[(far_edge + 1) % m]
    tf = _param_on(a0, b0, far_x0, far_x0 * u_bounds[:-1])
    arcs = np.concatenate((far_offset[far_edge] + tf * lengths[far_edge], [far_len]))
    arcs[0] = 0.0

    on_vertex = False
    if not allow_vertex_apex and float(dist.min()) <= band:
        raise ApexOnVertex("apex coincides with a polygon vertex")

    return TangentTable(
        apex=apex, kind=EXTERIOR, vertex_angles=ref + np.arctan(u_bounds),
        cumulative_areas=cum, boundary_arclengths=arcs, apex_on_vertex=on_vertex,
        ref=ref, u=u_bounds, far_x0=far_x0, near_x0=near_x0, far_g=far_g, near_g=near_g,
        far_edge=far_edge, near_edge=near_edge, far_len=float(far_len), near_len=float(near_len),
        start_chord=start_chord, end_chord=end_chord, far_offset=far_offset,
        near_offset=near_offset, frame_vertices=fv, edge_lengths=lengths,
    )
