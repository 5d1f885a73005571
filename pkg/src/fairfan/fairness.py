"""Perimeter fairness of fan partitions and the fairness function F(P, n).

``F(P, n)`` is the best (smallest) max/min piece-perimeter ratio over all
convex equal-area n-fans with origin P.  From an exterior or boundary
point the fan is unique.  From an interior point the fan has one free
rotation, parametrised here by the swept area ``s`` of its first ray; for
equal pieces the layout repeats after a shift of area/n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from . import _kernels
from .errors import EmptyPartition, PointNotInterior
from .geometry import (
    BOUNDARY,
    EPS_CLS,
    EXTERIOR,
    INTERIOR,
    TWO_PI,
    ConvexPolygon,
    Point,
    RadialTable,
    TangentTable,
    boundary_distance_extremes,
    classify_point,
    normalize_angle,
    sector_table,
    segment_distances,
    snap_to_boundary,
)
from .optimize import golden_section
from .partition import (
    EPS_ANG,
    Fan,
    FanPartition,
    Fractions,
    as_fractions,
    open_profile,
    partial_sums,
    radial_profile,
)

EXACT = "exact"
SAMPLED = "sampled"
DEFAULT_SAMPLES = 32
THETA_TOL = 1e-10
SUBDIVISIONS = 8


def fairness_ratio(partition: FanPartition) -> float:
    """max piece perimeter / min piece perimeter."""
    if not partition.pieces:
        raise EmptyPartition("partition has no pieces")
    per = partition.perimeters
    lo, hi = min(per), max(per)
    if lo == hi:
        return 1.0
    return hi / lo if lo > 0.0 else math.inf


def area_weighted_deviation(partition: FanPartition) -> float:
    """|p_A / p_B - sqrt(a_A / a_B)| for the smallest (A) and largest (B) target pieces.

    With all targets equal this is |min perimeter / max perimeter - 1|.
    """
    if not partition.pieces:
        raise EmptyPartition("partition has no pieces")
    f = np.asarray(partition.target_fractions)
    per = np.asarray(partition.perimeters)
    if np.ptp(f) <= 1e-12:
        return abs(per.min() / per.max() - 1.0)
    ia = int(np.argmin(f))
    ib = int(np.argmax(f))
    return abs(per[ia] / per[ib] - math.sqrt(f[ia] / f[ib]))


# ---------------------------------------------------------------------------
# interior rotation machinery


class _Rotation:
    """Fairness of the interior fan as a function of the first-ray offset."""

    def __init__(self, table: RadialTable, f: np.ndarray):
        self.table = table
        self.A = table.total_area
        self.cum = partial_sums(f)[:-1] * self.A
        self.n = len(f)
        self.equal = bool(np.ptp(f) <= 1e-15)
        self.period = self.A / self.n if self.equal else self.A

    def values(self, s: np.ndarray, relaxed: bool = False) -> np.ndarray:
        s = np.atleast_1d(s)
        _, gaps, per = radial_profile(self.table, s, self.cum)
        v = per.max(axis=1) / per.min(axis=1)
        if not relaxed:
            v = np.where(gaps.max(axis=1) > math.pi + EPS_ANG, math.inf, v)
        return v

    def first_gap_excess(self, s: float) -> float:
        _, gaps, _ = radial_profile(self.table, np.array([s]), self.cum)
        return float(gaps[0, 0] - math.pi)

    def angles(self, s: float) -> tuple[float, ...]:
        """Normalised ray angles, rotated (equal pieces) to start at the smallest."""
        ang, _, _ = radial_profile(self.table, np.array([s]), self.cum)
        out = [normalize_angle(float(a)) for a in ang[0]]
        if self.equal:
            k = out.index(min(out))
            out = out[k:] + out[:k]
        return tuple(out)

    def events(self) -> np.ndarray:
        """Offsets (within one period) at which some ray meets a vertex."""
        vert = self.table.cumulative_areas[:-1]
        ev = np.mod(vert[:, None] - self.cum[None, :], self.period).ravel()
        ev = np.sort(ev)
        keep = np.concatenate(([True], np.diff(ev) > 1e-14 * self.A))
        return ev[keep]

    def grid_from_events(self, sub: int = SUBDIVISIONS) -> np.ndarray:
        ev = self.events()
        nxt = np.concatenate((ev[1:], [ev[0] + self.period]))
        frac = np.arange(sub) / sub
        return (ev[:, None] + (nxt - ev)[:, None] * frac[None, :]).ravel()

    def halving_roots(self, grid: np.ndarray) -> list[float]:
        """n = 2: offsets where the first wedge is exactly a half-turn."""
        g = np.append(np.sort(grid), grid.min() + self.period)
        _, gaps, _ = radial_profile(self.table, g, self.cum)
        h = gaps[:, 0] - math.pi
        roots = []
        for i in range(len(g) - 1):
            if h[i] == 0.0:
                roots.append(float(g[i]))
            elif h[i] * h[i + 1] < 0.0:
                roots.append(brentq(self.first_gap_excess, g[i], g[i + 1],
                                    xtol=1e-14 * self.A))
        return roots

    def refine_grid(self, grid: np.ndarray, tol: float, every: bool = False) -> tuple[float, float]:
        """Minimise over a cyclic grid, golden-refining every local minimum.

        With ``every`` set, each grid cell is golden-searched as well.
        """
        g = np.sort(grid)
        vals = self.values(g)
        if self.n == 2:
            roots = self.halving_roots(g)
            if not roots:
                return math.nan, math.inf
            r = np.array(roots)
            rv = self.values(r, relaxed=True)
            best = float(rv.min())
            s = min(r[rv <= best + 1e-10 * best], key=lambda c: min(self.angles(float(c))))
            return float(s), float(self.values(np.array([s]), relaxed=True)[0])
        finite = np.isfinite(vals)
        if not finite.any():
            return math.nan, math.inf
        prev = np.roll(vals, 1)
        nxt = np.roll(vals, -1)
        is_min = finite & (vals <= prev) & (vals <= nxt)
        idx = np.nonzero(is_min)[0]
        gl = np.concatenate(([g[-1] - self.period], g, [g[0] + self.period]))
        lo = gl[idx]
        hi = gl[idx + 2]
        if every:
            cells = np.nonzero(finite | np.roll(finite, -1))[0]
            lo = np.concatenate((lo, gl[cells + 1]))
            hi = np.concatenate((hi, gl[cells + 2]))
        bx, bv = golden_section(self.values, lo, hi, tol)
        xs = np.concatenate((g[finite], bx))
        vs = np.concatenate((vals[finite], bv))
        best = float(vs.min())
        cand = xs[vs <= best + 1e-10 * best]
        s = min(cand, key=lambda c: min(self.angles(float(c))))
        return float(s), float(self.values(np.array([s]))[0])


@dataclass(frozen=True)
class ThetaProfile:
    origin: Point
    n: int
    samples: tuple[tuple[float, float, bool], ...]
    events: tuple[float, ...]
    best_theta: float
    best_value: float


def theta_events(polygon: ConvexPolygon, p: Sequence[float], n: int | Fractions) -> list[float]:
    """Rotation angles (of the first ray) at which some ray passes through a vertex."""
    if classify_point(polygon, p) != INTERIOR:
        raise PointNotInterior(f"point {tuple(p)} is not interior")
    f = as_fractions(n)
    table = sector_table(polygon, p)
    rot = _Rotation(table, f)
    vert = table.cumulative_areas[:-1]
    offs = np.mod(vert[:, None] - rot.cum[None, :], rot.A).ravel()
    theta = table.solve(offs).angle
    out = sorted({round(normalize_angle(float(t)), 13) for t in theta})
    merged: list[float] = []
    for t in out:
        if not merged or t - merged[-1] > 1e-12:
            merged.append(t)
    if len(merged) > 1 and merged[0] + TWO_PI - merged[-1] <= 1e-12:
        merged.pop()
    return merged


def _interior_best(table: RadialTable, f: np.ndarray, mode: str, samples: int):
    """(best offset, best value, rotation helper) for an interior apex."""
    rot = _Rotation(table, f)
    tol_s = 1e-13 * rot.A
    if rot.n == 2:
        if mode == EXACT:
            grid = rot.grid_from_events()
        else:
            theta = TWO_PI * np.arange(samples) / samples
            grid = np.mod(table.area_at_angle(theta), rot.period)
        s, v = rot.refine_grid(grid, tol_s)
        return s, v, rot
    packed = _kernels.pack(table)
    px, py = table.apex
    if mode == EXACT:
        grid = np.sort(rot.grid_from_events())
        xs, vs = _kernels.exact_candidates(packed, px, py, rot.cum, grid, rot.period, tol_s)
        if not np.isfinite(vs).any():
            return math.nan, math.inf, rot
        best = float(vs.min())
        cand = xs[vs <= best + 1e-10 * best]
        s = float(min(cand, key=lambda c: min(rot.angles(float(c)))))
        return s, float(_kernels.rotation_value(packed, px, py, rot.cum, s, False)), rot
    s, v = _kernels.sampled_best(packed, px, py, rot.cum, int(samples), THETA_TOL)
    return float(s), float(v), rot


def evaluate(polygon: ConvexPolygon, p: Sequence[float], fractions: Fractions,
             mode: str = SAMPLED, samples: int = DEFAULT_SAMPLES):
    """Core of :func:`fairness_at_point`: (value, fan kind, apex, ray angles)."""
    f = as_fractions(fractions)
    n = len(f)
    kind = classify_point(polygon, p)
    if kind == INTERIOR:
        table = sector_table(polygon, p)
        if n == 1:
            return 1.0, INTERIOR, table.apex, (0.0,)
        s, v, rot = _interior_best(table, f, mode, samples)
        if not math.isfinite(v):
            return math.inf, INTERIOR, table.apex, ()
        return v, INTERIOR, table.apex, rot.angles(s)
    table = sector_table(polygon, p, allow_vertex_apex=True)
    if n == 1:
        return 1.0, kind, table.apex, ()
    ang, per = open_profile(table, partial_sums(f))
    lo = float(per.min())
    v = float(per.max()) / lo if lo > 0.0 else math.inf
    return v, kind, table.apex, tuple(normalize_angle(float(a)) for a in ang)


def fairness_value(polygon: ConvexPolygon, p: Sequence[float], fractions: Fractions,
                   mode: str = SAMPLED, samples: int = DEFAULT_SAMPLES) -> float:
    return evaluate(polygon, p, fractions, mode, samples)[0]


def fairness_at_point(polygon: ConvexPolygon, p: Sequence[float], n: Fractions,
                      mode: str = EXACT, samples: int = DEFAULT_SAMPLES) -> tuple[float, Fan | None]:
    """F(P, n) and a witness fan attaining it.

    ``mode`` is ``"exact"`` (every vertex event plus golden refinement) or
    ``"sampled"`` (``samples`` uniform rotations, best one refined).  The
    witness is None when no convex fan exists.
    """
    v, kind, apex, angles = evaluate(polygon, p, n, mode, samples)
    if not math.isfinite(v) and not angles:
        return v, None
    return v, Fan(kind, apex, angles)


def theta_profile(polygon: ConvexPolygon, p: Sequence[float], n: Fractions,
                  samples: int = 256) -> ThetaProfile:
    """Fairness over a uniform sweep of first-ray angles, plus the exact optimum."""
    if classify_point(polygon, p) != INTERIOR:
        raise PointNotInterior(f"point {tuple(p)} is not interior")
    f = as_fractions(n)
    table = sector_table(polygon, p)
    rot = _Rotation(table, f)
    theta = TWO_PI * np.arange(samples) / samples
    s = np.mod(table.area_at_angle(theta), rot.A)
    vals = rot.values(s) if rot.n > 1 else np.ones(samples)
    rows = tuple((float(t), float(v), bool(np.isfinite(v))) for t, v in zip(theta, vals))
    v, _, apex, angles = evaluate(polygon, p, f, EXACT)
    best_theta = angles[0] if angles else math.nan
    return ThetaProfile(apex, len(f), rows, tuple(theta_events(polygon, p, f)), best_theta, v)


# ---------------------------------------------------------------------------
# n -> infinity


def _boundary_asymptotic(polygon: ConvexPolygon, p) -> float:
    q, _, _ = snap_to_boundary(polygon, p)
    qa = np.array(q)
    band = EPS_CLS * polygon.scale
    dist = segment_distances(polygon, qa)
    others = dist[dist > band]
    d_max = float(np.hypot(*(polygon.vertices - qa).T).max())
    return d_max / float(others.min())


def _exterior_asymptotic(polygon: ConvexPolygon, table: TangentTable) -> float:
    band = EPS_CLS * polygon.scale
    if table.start_chord <= band or table.end_chord <= band:
        return math.inf
    lo = math.inf
    hi = 0.0
    tol = 1e-12
    for j in range(len(table.far_x0)):
        width = float(table.u[j + 1] - table.u[j])
        if width <= 0.0:
            continue
        # chord(v) is smooth on the sector; probe a few sub-brackets
        grid = np.linspace(0.0, width, 9)

        def chord(v, j=j):
            v = np.asarray(v)
            u = table.u[j] + v
            xf = table.far_x0[j] / (1.0 + table.far_g[j] * v)
            xn = table.near_x0[j] / (1.0 + table.near_g[j] * v)
            return (xf - xn) * np.sqrt(1.0 + u * u)

        vals = chord(grid)
        lo = min(lo, float(vals.min()))
        hi = max(hi, float(vals.max()))
        _, bmin = golden_section(chord, grid[:-1], grid[1:], tol * max(width, 1e-300))
        _, bmax = golden_section(lambda v: -chord(v), grid[:-1], grid[1:], tol * max(width, 1e-300))
        lo = min(lo, float(bmin.min()))
        hi = max(hi, float(-bmax.min()))
    if lo <= band:
        return math.inf
    return hi / lo


def asymptotic_fairness(polygon: ConvexPolygon, p: Sequence[float]) -> float:
    """The n -> infinity limit of F(P, n): max/min chord length of rays from P."""
    kind = classify_point(polygon, p)
    if kind == INTERIOR:
        d_min, d_max = boundary_distance_extremes(polygon, p)
        return d_max / d_min
    if kind == BOUNDARY:
        return _boundary_asymptotic(polygon, p)
    table = sector_table(polygon, p, allow_vertex_apex=True)
    return _exterior_asymptotic(polygon, table)


__all__ = [
    "EXACT", "SAMPLED", "ThetaProfile", "area_weighted_deviation", "asymptotic_fairness",
    "evaluate", "fairness_at_point", "fairness_ratio", "fairness_value", "theta_events",
    "theta_profile", "EXTERIOR",
]
