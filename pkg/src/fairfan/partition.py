"""Equal-area (or prescribed-fraction) convex fan partitions.

Rays are placed by inverting the sweep tables of :mod:`fairfan.geometry`
in closed form.  Piece polygons are then cut out independently by
half-plane clipping, so areas reported on a :class:`FanPartition` are a
genuine check on the ray placement rather than a restatement of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import BadFractions, MalformedFan, PointInside, PointNotInterior
from .geometry import (
    BOUNDARY,
    EXTERIOR,
    INTERIOR,
    TWO_PI,
    ConvexPolygon,
    Point,
    RadialTable,
    SectorTable,
    chain_length,
    classify_point,
    clip_halfplane,
    dedupe_chain,
    normalize_angle,
    sector_table,
    shoelace,
)

EPS_ANG = 1e-9
EPS_AREA = 1e-9

INFINITY = "infinity"

Fractions = Union[int, Sequence[float]]


class _Infeasible:
    """Marker returned when no convex fan exists for the requested layout."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Infeasible"

    def __bool__(self) -> bool:
        return False


Infeasible = _Infeasible()


@dataclass(frozen=True)
class Fan:
    """Rays from a common origin, or parallel lines for a fan at infinity.

    ``ray_angles`` are in sweep order and normalised to [0, 2*pi).  For a
    fan at infinity ``direction`` holds the common line angle and
    ``offsets`` the signed distances of the lines along its right-hand
    normal, so pieces run left to right when looking along ``direction``.
    """

    kind: str
    origin: Point | None
    ray_angles: tuple[float, ...]
    direction: float | None = None
    offsets: tuple[float, ...] = ()

    @property
    def n_rays(self) -> int:
        return len(self.offsets) if self.kind == INFINITY else len(self.ray_angles)

    def gaps(self) -> list[float]:
        """Angular gaps between successive rays (interior fans include the wrap)."""
        a = self.ray_angles
        if len(a) < 2:
            return []
        out = [(a[i + 1] - a[i]) % TWO_PI for i in range(len(a) - 1)]
        if self.kind == INTERIOR:
            out.append((a[0] - a[-1]) % TWO_PI)
        return out

    def is_convex(self, eps: float = EPS_ANG) -> bool:
        if self.kind == INFINITY:
            return True
        return all(g <= math.pi + eps for g in self.gaps())


@dataclass(frozen=True)
class Piece:
    vertices: tuple[Point, ...]
    area: float
    perimeter: float


@dataclass(frozen=True)
class FanPartition:
    fan: Fan
    pieces: tuple[Piece, ...]
    target_fractions: tuple[float, ...]

    @property
    def areas(self) -> list[float]:
        return [p.area for p in self.pieces]

    @property
    def perimeters(self) -> list[float]:
        return [p.perimeter for p in self.pieces]

    @property
    def n(self) -> int:
        return len(self.pieces)


def as_fractions(fractions: Fractions) -> np.ndarray:
    """Validate a fraction vector; an integer n means n equal parts."""
    if isinstance(fractions, (int, np.integer)):
        n = int(fractions)
        if n < 1:
            raise BadFractions(f"n must be positive, got {n}")
        return np.full(n, 1.0 / n)
    f = np.asarray(list(fractions), dtype=float)
    if f.ndim != 1 or len(f) == 0:
        raise BadFractions("fractions must be a non-empty list")
    if not np.all(np.isfinite(f)) or np.any(f <= 0.0):
        raise BadFractions("fractions must be positive")
    if abs(f.sum() - 1.0) > 1e-9:
        raise BadFractions(f"fractions sum to {f.sum():.12g}, expected 1")
    return f / f.sum()


def partial_sums(f: np.ndarray) -> np.ndarray:
    """[0, f1, f1+f2, ..., 1] with the last entry pinned to exactly 1."""
    c = np.concatenate(([0.0], np.cumsum(f)))
    c[-1] = 1.0
    return c


# ---------------------------------------------------------------------------
# fast perimeter profiles (no piece polygons)


def radial_profile(table: RadialTable, offsets: np.ndarray, cum: np.ndarray):
    """Interior-apex fans for a batch of first-ray sweep offsets.

    ``cum`` holds the n ray positions relative to the first ray, as areas
    (starting with 0).  Returns unwrapped ray angles, angular gaps and piece
    perimeters, each of shape (len(offsets), n).
    """
    A = table.total_area
    per = table.boundary_arclengths[-1]
    a = np.asarray(offsets, dtype=float)[:, None] + cum[None, :]
    wrap = np.floor(a / A)
    h = table.solve(a - wrap * A)
    ang = h.angle + TWO_PI * wrap
    s = h.far_s + per * wrap
    r = h.chord
    ang_next = np.concatenate((ang[:, 1:], ang[:, :1] + TWO_PI), axis=1)
    s_next = np.concatenate((s[:, 1:], s[:, :1] + per), axis=1)
    r_next = np.concatenate((r[:, 1:], r[:, :1]), axis=1)
    return ang, ang_next - ang, r + r_next + (s_next - s)


def open_profile(table: SectorTable, cum_full: np.ndarray):
    """Fan from a boundary or exterior apex: all n+1 sweep positions incl. both ends.

    Returns the n-1 inner ray angles and the n piece perimeters.
    """
    A = table.total_area
    h = table.solve(cum_full * A)
    c = h.chord
    fs = h.far_s
    per = c[:-1] + c[1:] + (fs[1:] - fs[:-1])
    if h.near_s is not None:
        ns = h.near_s
        per = per + (ns[:-1] - ns[1:])
    return h.angle[1:-1], per


# ---------------------------------------------------------------------------
# public constructions


def _finish(polygon: ConvexPolygon, fan: Fan, f: np.ndarray) -> FanPartition:
    pieces = tuple(pieces_of(polygon, fan))
    return FanPartition(fan, pieces, tuple(float(x) for x in f))


def exterior_fan(polygon: ConvexPolygon, p: Sequence[float], fractions: Fractions) -> FanPartition:
    """The unique fan of n-1 rays from an exterior or boundary point."""
    f = as_fractions(fractions)
    kind = classify_point(polygon, p)
    if kind == INTERIOR:
        raise PointInside(f"point {tuple(p)} is interior; use interior_fan")
    table = sector_table(polygon, p, allow_vertex_apex=True)
    if len(f) == 1:
        angles = ()
    else:
        ang, _ = open_profile(table, partial_sums(f))
        angles = tuple(normalize_angle(float(a)) for a in ang)
    fan = Fan(kind, table.apex, angles)
    return _finish(polygon, fan, f)


def interior_fan(polygon: ConvexPolygon, p: Sequence[float], fractions: Fractions,
                 theta: float):
    """Fan of n rays from an interior point with the first ray at ``theta``.

    Returns :data:`Infeasible` when some wedge would open wider than pi.
    """
    f = as_fractions(fractions)
    if classify_point(polygon, p) != INTERIOR:
        raise PointNotInterior(f"point {tuple(p)} is not interior")
    table = sector_table(polygon, p)
    origin = table.apex
    if len(f) == 1:
        fan = Fan(INTERIOR, origin, (normalize_angle(theta),))
        return _finish(polygon, fan, f)
    s0 = table.area_at_angle(np.array([theta]))
    cum = partial_sums(f)[:-1] * table.total_area
    ang, gaps, _ = radial_profile(table, s0, cum)
    if np.any(gaps[0] > math.pi + EPS_ANG):
        return Infeasible
    angles = [normalize_angle(float(a)) for a in ang[0]]
    angles[0] = normalize_angle(theta)
    fan = Fan(INTERIOR, origin, tuple(angles))
    return _finish(polygon, fan, f)


def fan_from_offset(polygon: ConvexPolygon, table: RadialTable, offset: float,
                    f: np.ndarray) -> FanPartition:
    """Interior fan whose first ray sits at sweep area ``offset``."""
    cum = partial_sums(f)[:-1] * table.total_area
    ang, _, _ = radial_profile(table, np.array([offset]), cum)
    fan = Fan(INTERIOR, table.apex, tuple(normalize_angle(float(a)) for a in ang[0]))
    return _finish(polygon, fan, f)


def _slab_area_below(polygon: ConvexPolygon, nrm: np.ndarray, d: np.ndarray, off: float) -> float:
    # nrm is the right-hand normal of d, so its low side lies left of d
    pts = clip_halfplane(polygon.vertices, off * nrm, d)
    return shoelace(pts) if len(pts) >= 3 else 0.0


def parallel_fan(polygon: ConvexPolygon, direction: float, fractions: Fractions) -> FanPartition:
    """n-1 parallel cut lines along ``direction`` (a fan at infinity)."""
    f = as_fractions(fractions)
    d = np.array([math.cos(direction), math.sin(direction)])
    nrm = np.array([d[1], -d[0]])
    proj = polygon.vertices @ nrm
    lo0, hi0 = float(proj.min()), float(proj.max())
    A = polygon.area
    tol = 1e-12 * polygon.scale
    offsets = []
    for target in partial_sums(f)[1:-1] * A:
        lo, hi = lo0, hi0
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if _slab_area_below(polygon, nrm, d, mid) < target:
                lo = mid
            else:
                hi = mid
        offsets.append(0.5 * (lo + hi))
    fan = Fan(INFINITY, None, (), normalize_angle(direction), tuple(offsets))
    return _finish(polygon, fan, f)


def pieces_of(polygon: ConvexPolygon, fan: Fan) -> list[Piece]:
    """Cut the polygon along the fan and measure every piece."""
    v = polygon.vertices
    tol = 1e-12 * polygon.scale
    cuts: list[tuple[np.ndarray, np.ndarray] | None] = []
    if fan.kind == INFINITY:
        if fan.direction is None:
            raise MalformedFan("fan at infinity needs a direction")
        d = np.array([math.cos(fan.direction), math.sin(fan.direction)])
        nrm = np.array([d[1], -d[0]])
        if any(b <= a for a, b in zip(fan.offsets, fan.offsets[1:])):
            raise MalformedFan("parallel offsets must increase")
        lines = [(o * nrm, -d) for o in fan.offsets]
        bounds = [None] + lines + [None]
        pairs = list(zip(bounds[:-1], bounds[1:]))
    else:
        if fan.origin is None:
            raise MalformedFan("finite fan needs an origin")
        o = np.asarray(fan.origin, dtype=float)
        rays = [(o, np.array([math.cos(a), math.sin(a)])) for a in fan.ray_angles]
        if fan.kind == INTERIOR:
            if len(rays) == 1:
                pairs = [(None, None)]
            else:
                if not fan.is_convex():
                    raise MalformedFan("interior fan has a wedge wider than pi")
                pairs = [(rays[i], rays[(i + 1) % len(rays)]) for i in range(len(rays))]
        else:
            if not fan.is_convex():
                raise MalformedFan("fan has a wedge wider than pi")
            bounds = [None] + rays + [None]
            pairs = list(zip(bounds[:-1], bounds[1:]))

    out = []
    for lo, hi in pairs:
        pts = v
        if lo is not None:
            pts = clip_halfplane(pts, lo[0], lo[1])
        if hi is not None:
            pts = clip_halfplane(pts, hi[0], -hi[1])
        pts = dedupe_chain(pts, tol)
        if len(pts) < 3:
            raise MalformedFan("fan produced an empty piece")
        out.append(Piece(tuple(Point(float(x), float(y)) for x, y in pts),
                         shoelace(pts), chain_length(pts)))
    return out


def fan_partition(polygon: ConvexPolygon, p: Sequence[float], fractions: Fractions,
                  theta: float = 0.0):
    """Dispatch on the position of ``p``: interior fans need ``theta``."""
    if classify_point(polygon, p) == INTERIOR:
        return interior_fan(polygon, p, fractions, theta)
    return exterior_fan(polygon, p, fractions)


__all__ = [
    "EPS_ANG", "Fan", "FanPartition", "Infeasible", "Piece", "as_fractions",
    "exterior_fan", "fan_partition", "interior_fan", "parallel_fan", "pieces_of",
    "radial_profile", "open_profile", "partial_sums", "BOUNDARY", "EXTERIOR",
    "INTERIOR", "INFINITY",
]
