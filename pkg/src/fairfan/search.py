"""Locating fairest and perfect fan origins.

The plane is scanned on a grid ("terrain"), grid-level local minima are
extracted and then polished by a compass search on the exact fairness
function.  For large n the asymptotic candidate origins (vertices, edge
midpoints, exterior meeting points of edge lines, and one interior point)
seed the same polish step.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np
from scipy import ndimage

from .errors import AllInfinite, BadWindow
from .fairness import EXACT, SAMPLED, asymptotic_fairness, evaluate, fairness_value
from .geometry import (
    EXTERIOR,
    INTERIOR,
    ConvexPolygon,
    Point,
    boundary_distance_extremes,
    classify_point,
    edge_extension_intersections,
)
from .optimize import pattern_search
from .partition import (
    Fan,
    FanPartition,
    Fractions,
    as_fractions,
    pieces_of,
)

ASYMPTOTIC = "asymptotic"
NMode = Union[int, str]

GRID = "grid"
REFINED = "refined"

DEFAULT_RESOLUTION = (160, 120)
DEFAULT_SAMPLES = 32
AUTO_THRESHOLD = 30
TIE_REL = 1e-12


def is_asymptotic(n_mode: NMode) -> bool:
    return isinstance(n_mode, str) and n_mode.lower() in (ASYMPTOTIC, "inf", "infinity")


@dataclass(frozen=True, eq=False)
class Terrain:
    """Fairness values sampled at cell centres of a rectangular window.

    ``values`` has shape (rows, cols); row 0 is the lowest y.
    """

    window: tuple[float, float, float, float]
    resolution: tuple[int, int]
    n_mode: NMode
    values: np.ndarray
    theta_samples: int

    @property
    def cols(self) -> int:
        return self.resolution[0]

    @property
    def rows(self) -> int:
        return self.resolution[1]

    @property
    def cell(self) -> tuple[float, float]:
        x0, y0, x1, y1 = self.window
        return (x1 - x0) / self.cols, (y1 - y0) / self.rows

    @property
    def cell_diagonal(self) -> float:
        return math.hypot(*self.cell)

    @property
    def xs(self) -> np.ndarray:
        return cell_centres(self.window[0], self.window[2], self.cols)

    @property
    def ys(self) -> np.ndarray:
        return cell_centres(self.window[1], self.window[3], self.rows)

    def point(self, row: int, col: int) -> Point:
        return Point(float(self.xs[col]), float(self.ys[row]))


def cell_centres(lo: float, hi: float, k: int) -> np.ndarray:
    return lo + (np.arange(k) + 0.5) * ((hi - lo) / k)


@dataclass(frozen=True)
class Minimum:
    location: Point
    value: float
    kind: str
    basin_seed: tuple[int, int] | None = None


@dataclass(frozen=True)
class CandidateSet:
    """Asymptotic candidate origins, each paired with its n -> infinity fairness."""

    vertices: tuple[tuple[Point, float], ...]
    edge_midpoints: tuple[tuple[Point, float], ...]
    exterior_intersections: tuple[tuple[Point, float], ...]
    interior_minimum: tuple[Point, float]

    def all(self) -> list[tuple[str, Point, float]]:
        out = [("vertex", p, v) for p, v in self.vertices]
        out += [("midpoint", p, v) for p, v in self.edge_midpoints]
        out += [("intersection", p, v) for p, v in self.exterior_intersections]
        out.append(("interior", *self.interior_minimum))
        return out

    def points(self) -> list[Point]:
        return [p for _, p, _ in self.all()]

    def __len__(self) -> int:
        return len(self.all())


# ---------------------------------------------------------------------------
# objective


def point_value(polygon: ConvexPolygon, p: Sequence[float], n_mode: NMode,
                mode: str = EXACT, samples: int = DEFAULT_SAMPLES,
                fractions: Fractions | None = None) -> float:
    if is_asymptotic(n_mode):
        return asymptotic_fairness(polygon, p)
    return fairness_value(polygon, p, fractions if fractions is not None else n_mode, mode, samples)


# ---------------------------------------------------------------------------
# candidates


def interior_asymptotic_minimum(polygon: ConvexPolygon, starts: int = 4,
                                seed: int = 0) -> tuple[Point, float]:
    """Interior point minimising (farthest vertex distance)/(nearest edge distance)."""
    scale = polygon.scale

    def ratio(x: float, y: float) -> float:
        if classify_point(polygon, (x, y)) != INTERIOR:
            return math.inf
        d_min, d_max = boundary_distance_extremes(polygon, (x, y))
        return d_max / d_min

    c = polygon.centroid
    rng = np.random.default_rng(seed)
    origins = [c]
    for _ in range(starts):
        # jitter toward a random vertex, staying well inside
        w = rng.dirichlet(np.ones(polygon.m))
        q = 0.7 * np.array(c) + 0.3 * (w @ polygon.vertices)
        origins.append(Point(float(q[0]), float(q[1])))
    best: tuple[Point, float] | None = None
    for o in origins:
        (x, y), v, _ = pattern_search(ratio, o, scale / 4.0, 1e-9 * scale)
        cand = (Point(x, y), v)
        if best is None or (v, (x, y)) < (best[1], tuple(best[0])):
            best = cand
    return best


def asymptotic_candidates(polygon: ConvexPolygon) -> CandidateSet:
    verts = tuple((p, asymptotic_fairness(polygon, p)) for p in polygon.points())
    v = polygon.vertices
    mids = 0.5 * (v + np.roll(v, -1, axis=0))
    midpoints = tuple((Point(float(x), float(y)), asymptotic_fairness(polygon, (x, y)))
                      for x, y in mids)
    inter = tuple((p, asymptotic_fairness(polygon, p))
                  for p in edge_extension_intersections(polygon))
    return CandidateSet(verts, midpoints, inter, interior_asymptotic_minimum(polygon))


# ---------------------------------------------------------------------------
# terrain


def _scan_rows(args):
    polygon, n_mode, fractions, xs, ys, samples = args
    out = np.empty((len(ys), len(xs)))
    for i, y in enumerate(ys):
        for j, x in enumerate(xs):
            out[i, j] = point_value(polygon, (x, y), n_mode, SAMPLED, samples, fractions)
    return out


def scan_terrain(polygon: ConvexPolygon, n_mode: NMode, window: Sequence[float],
                 resolution: tuple[int, int] = DEFAULT_RESOLUTION,
                 theta_samples: int = DEFAULT_SAMPLES, *, workers: int = 1,
                 fractions: Fractions | None = None) -> Terrain:
    """Evaluate F (sampled rotation search) or its n -> infinity limit on a grid."""
    x0, y0, x1, y1 = (float(t) for t in window)
    if not (x1 > x0 and y1 > y0):
        raise BadWindow(f"window {window} has no positive extent")
    cols, rows = int(resolution[0]), int(resolution[1])
    if cols < 2 or rows < 2:
        raise BadWindow("resolution must be at least 2x2")
    if not is_asymptotic(n_mode):
        if theta_samples < 4:
            raise ValueError("theta_samples must be at least 4")
        if fractions is not None:
            as_fractions(fractions)
    xs = cell_centres(x0, x1, cols)
    ys = cell_centres(y0, y1, rows)
    workers = max(1, int(workers))
    if workers == 1:
        values = _scan_rows((polygon, n_mode, fractions, xs, ys, theta_samples))
    else:
        chunks = np.array_split(np.arange(rows), min(rows, 4 * workers))
        jobs = [(polygon, n_mode, fractions, xs, ys[c], theta_samples) for c in chunks if len(c)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = np.vstack(list(pool.map(_scan_rows, jobs)))
    values.setflags(write=False)
    return Terrain((x0, y0, x1, y1), (cols, rows), n_mode, values, theta_samples)


def local_minima(terrain: Terrain) -> list[Minimum]:
    """Cells no higher than any of their 8 neighbours (border cells skipped).

    Connected runs of such cells (necessarily equal-valued) are reported
    once, at their lowest flat index.
    """
    v = np.asarray(terrain.values, dtype=float)
    finite = np.isfinite(v)
    if not finite.any():
        raise AllInfinite("terrain has no finite values")
    rows, cols = v.shape
    is_min = np.zeros_like(finite)
    core = v[1:-1, 1:-1]
    ok = np.isfinite(core)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            nb = v[1 + di:rows - 1 + di, 1 + dj:cols - 1 + dj]
            ok &= core <= nb
    is_min[1:-1, 1:-1] = ok
    labels, count = ndimage.label(is_min, structure=np.ones((3, 3), dtype=int))
    out = []
    for k in range(1, count + 1):
        flat = np.flatnonzero(labels == k)
        i, j = divmod(int(flat.min()), cols)
        out.append(Minimum(terrain.point(i, j), float(v[i, j]), GRID, (i, j)))
    return out


def refine_minimum(polygon: ConvexPolygon, n_mode: NMode, seed: Sequence[float],
                   step: float | None = None, *, fractions: Fractions | None = None,
                   basin_seed: tuple[int, int] | None = None,
                   min_step: float | None = None,
                   bounds: Sequence[float] | None = None) -> Minimum:
    """Compass search on F (exact rotation search) started at ``seed``.

    With ``bounds`` (x0, y0, x1, y1) the search stays inside that box;
    otherwise it may follow a valley that keeps falling towards infinity.
    """
    scale = polygon.scale
    step = scale / 50.0 if step is None else float(step)
    min_step = 1e-7 * scale if min_step is None else min_step
    bx0, by0, bx1, by1 = bounds if bounds is not None else (-math.inf, -math.inf, math.inf, math.inf)

    def objective(x: float, y: float) -> float:
        if not (bx0 <= x <= bx1 and by0 <= y <= by1):
            return math.inf
        return point_value(polygon, (x, y), n_mode, EXACT, fractions=fractions)

    (x, y), v, _ = pattern_search(objective, (float(seed[0]), float(seed[1])), step, min_step)
    return Minimum(Point(x, y), v, REFINED, basin_seed)


def merge_minima(minima: Iterable[Minimum], radius: float) -> list[Minimum]:
    """Collapse minima closer than ``radius``, keeping the lowest of each cluster."""
    ordered = sorted(minima, key=lambda m: (m.value, m.location))
    kept: list[Minimum] = []
    for m in ordered:
        if all(math.dist(m.location, k.location) > radius for k in kept):
            kept.append(m)
    return kept


def _same_valley(polygon: ConvexPolygon, n_mode: NMode, a: Minimum, b: Minimum,
                 fractions: Fractions | None, prominence: float, samples: int = 9) -> bool:
    """True when F never rises more than ``prominence`` (relative) between a and b."""
    cap = max(a.value, b.value) * (1.0 + prominence)
    pa, pb = np.asarray(a.location), np.asarray(b.location)
    for t in np.linspace(0.0, 1.0, samples)[1:-1]:
        q = pa + t * (pb - pa)
        if point_value(polygon, (float(q[0]), float(q[1])), n_mode, EXACT, fractions=fractions) > cap:
            return False
    return True


def refined_minima(polygon: ConvexPolygon, terrain: Terrain, *,
                   fractions: Fractions | None = None, merge_radius: float | None = None,
                   prominence: float = 1e-3, reach: float = 4.0) -> list[Minimum]:
    """Refine every finite grid minimum of ``terrain`` and merge duplicates.

    Minima closer than ``merge_radius`` (default one cell diagonal) merge
    outright.  Minima within ``reach`` cell diagonals also merge when the
    straight path between them never climbs more than ``prominence``
    (relative) above the higher of the two: one valley, sampled twice.
    """
    step = max(terrain.cell)
    out = []
    for m in local_minima(terrain):
        r = refine_minimum(polygon, terrain.n_mode, m.location, step, fractions=fractions,
                           basin_seed=m.basin_seed, bounds=terrain.window)
        if r.value > m.value and not is_asymptotic(terrain.n_mode):
            # the exact rotation search should never lose to the sampled grid;
            # keep the grid point if it somehow does
            r = Minimum(m.location, m.value, REFINED, m.basin_seed)
        out.append(r)
    radius = terrain.cell_diagonal if merge_radius is None else merge_radius
    kept: list[Minimum] = []
    for m in merge_minima(out, radius):
        if not math.isfinite(m.value):
            kept.append(m)
            continue
        near = [k for k in kept if math.isfinite(k.value)
                and math.dist(k.location, m.location) <= reach * terrain.cell_diagonal]
        if not any(_same_valley(polygon, terrain.n_mode, k, m, fractions, prominence) for k in near):
            kept.append(m)
    return kept


def auto_window(polygon: ConvexPolygon, factor: float = 2.0) -> tuple[float, float, float, float]:
    x0, y0, x1, y1 = polygon.bbox
    cx, cy = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
    hx, hy = 0.5 * factor * (x1 - x0), 0.5 * factor * (y1 - y0)
    return cx - hx, cy - hy, cx + hx, cy + hy


def witness_partition(polygon: ConvexPolygon, p: Sequence[float], n: Fractions) -> FanPartition | None:
    """The fan attaining F(P, n) (exact mode), cut into pieces."""
    f = as_fractions(n)
    v, kind, apex, angles = evaluate(polygon, p, f, EXACT)
    if not math.isfinite(v):
        return None
    if len(f) == 1 and kind == INTERIOR:
        angles = (0.0,)
    fan = Fan(kind, apex, angles)
    return FanPartition(fan, tuple(pieces_of(polygon, fan)), tuple(float(x) for x in f))


@dataclass
class SearchResult:
    best: Minimum
    partition: FanPartition | None
    minima: list[Minimum] = field(default_factory=list)
    terrain: Terrain | None = None


def fairest_fan(polygon: ConvexPolygon, n: int, strategy: str = "auto", *,
                resolution: tuple[int, int] = (80, 60), theta_samples: int = DEFAULT_SAMPLES,
                threshold: int = AUTO_THRESHOLD, coarse: tuple[int, int] = (40, 30),
                workers: int = 1) -> SearchResult:
    """Global search for the fairest n-fan origin.

    ``scan`` refines every grid minimum of a terrain over the auto window;
    ``candidates`` refines from the asymptotic candidates only; ``auto``
    picks ``scan`` below ``threshold`` and the union of candidates and a
    coarse scan at or above it.
    """
    n = int(n)
    if n == 1:
        c = polygon.centroid
        best = Minimum(c, 1.0, REFINED)
        return SearchResult(best, witness_partition(polygon, c, 1), [best])
    if strategy == "auto":
        strategy = "scan" if n < threshold else "union"
    window = auto_window(polygon)
    minima: list[Minimum] = []
    terrain = None
    merge = 1e-3 * polygon.scale
    if strategy in ("scan", "union"):
        res = resolution if strategy == "scan" else coarse
        terrain = scan_terrain(polygon, n, window, res, theta_samples, workers=workers)
        minima += refined_minima(polygon, terrain)
        merge = terrain.cell_diagonal
    if strategy in ("candidates", "union"):
        step = polygon.scale / 50.0
        for _, p, _ in asymptotic_candidates(polygon).all():
            # a local box: candidates may sit outside the auto window
            box = (p[0] - polygon.scale, p[1] - polygon.scale, p[0] + polygon.scale, p[1] + polygon.scale)
            minima.append(refine_minimum(polygon, n, p, step, bounds=box))
    if strategy not in ("scan", "candidates", "union"):
        raise ValueError(f"unknown strategy {strategy!r}")
    minima = merge_minima([m for m in minima if math.isfinite(m.value)], merge)
    if not minima:
        raise AllInfinite("no finite fairness value found")
    # values equal up to rounding count as ties
    low = min(m.value for m in minima)
    best = min((m for m in minima if m.value <= low * (1.0 + TIE_REL)), key=lambda m: m.location)
    return SearchResult(best, witness_partition(polygon, best.location, n), minima, terrain)


def find_perfect_fan(polygon: ConvexPolygon, n: int, seed: Sequence[float], tol: float = 1e-3,
                     step: float | None = None) -> tuple[Point, FanPartition] | None:
    """Refine from ``seed``; return the origin and fan if F <= 1 + tol there."""
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    m = refine_minimum(polygon, n, seed, step)
    if m.value > 1.0 + tol:
        return None
    part = witness_partition(polygon, m.location, n)
    return m.location, part


def default_workers() -> int:
    return max(1, (os.cpu_count() or 1))


__all__ = [
    "ASYMPTOTIC", "CandidateSet", "Minimum", "SearchResult", "Terrain", "asymptotic_candidates",
    "auto_window", "fairest_fan", "find_perfect_fan", "interior_asymptotic_minimum",
    "local_minima", "merge_minima", "refine_minimum", "refined_minima", "scan_terrain",
    "witness_partition", "EXTERIOR",
]
