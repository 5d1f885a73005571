"""Acceptance criteria, one function each, returning (ok, detail).

Run with pytest for pass/fail plus a summary block, or directly with
``python tests/test_acceptance.py [k ...]`` to print one line per criterion.
"""

from __future__ import annotations

import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fairfan import shapes  # noqa: E402
from fairfan.fairness import EXACT, SAMPLED, asymptotic_fairness, fairness_ratio, fairness_value  # noqa: E402
from fairfan.geometry import INTERIOR, boundary_distance_extremes, classify_point, validate_polygon  # noqa: E402
from fairfan.partition import Infeasible, fan_partition, parallel_fan  # noqa: E402
from fairfan.search import (  # noqa: E402
    ASYMPTOTIC,
    asymptotic_candidates,
    default_workers,
    find_perfect_fan,
    local_minima,
    refined_minima,
    scan_terrain,
)

from helpers import random_boundary, random_convex, random_exterior, random_interior, similarity  # noqa: E402

ELLIPSE_WINDOW = (-12.0, -9.0, 12.0, 9.0)
HEX_WINDOW = (-20.0, -15.0, 25.0, 25.0)
TRIANGLE_AREA = 45.0521


def deep_inside(poly, p, margin: float) -> bool:
    """Interior and farther than ``margin`` from the boundary."""
    if classify_point(poly, p) != INTERIOR:
        return False
    return boundary_distance_extremes(poly, p)[0] > margin


def nearest(p, points) -> float:
    return min(math.dist(p, q) for q in points)


def fmt_pt(p) -> str:
    return f"({p[0]:.4f}, {p[1]:.4f})"


# ---------------------------------------------------------------------------
# figure criteria


def criterion_1():
    t0 = time.perf_counter()
    poly = shapes.ellipse12()
    terrain = scan_terrain(poly, 3, ELLIPSE_WINDOW, (160, 120), 32, workers=default_workers())
    refined = refined_minima(poly, terrain)
    elapsed = time.perf_counter() - t0
    perfect = sorted((m for m in refined if m.value <= 1.02), key=lambda m: m.location[0])
    ok = len(perfect) == 2 and elapsed <= 180.0
    if len(perfect) == 2:
        (xa, ya), (xb, yb) = perfect[0].location, perfect[1].location
        ok &= all(abs(m.location[1]) <= 0.15 and 5.0 <= abs(m.location[0]) <= 7.0 for m in perfect)
        ok &= xa < 0 < xb and abs(xa + xb) <= 0.1
    pts = ", ".join(f"{fmt_pt(m.location)}={m.value:.6f}" for m in perfect)
    return ok, (f"{len(perfect)} minima with F <= 1.02 of {len(refined)} refined: {pts}; "
                f"{elapsed:.0f} s")


def criterion_2():
    poly = shapes.ellipse12()
    terrain = scan_terrain(poly, 10, ELLIPSE_WINDOW, (160, 120), 32, workers=default_workers())
    refined = refined_minima(poly, terrain)
    low = min(m.value for m in refined)
    best = sorted((m for m in refined if m.value <= low * (1 + 1e-6)), key=lambda m: m.location[1])
    ok = len(best) == 2
    if ok:
        (xa, ya), (xb, yb) = best[0].location, best[1].location
        ok &= abs(xa) <= 0.5 and abs(xb) <= 0.5
        ok &= ya < 0 < yb and abs(ya + yb) <= 0.1 and min(abs(ya), abs(yb)) >= 0.5
        ok &= all(1.0 < m.value <= 1.15 for m in best)
    pts = ", ".join(f"{fmt_pt(m.location)}={m.value:.6f}" for m in best)
    return ok, f"{len(best)} global minima: {pts}"


def criterion_3():
    poly = shapes.ellipse12()
    terrain = scan_terrain(poly, 100, ELLIPSE_WINDOW, (80, 60), 24, workers=default_workers())
    refined = refined_minima(poly, terrain)
    margin = terrain.cell_diagonal
    inner = [m for m in refined if deep_inside(poly, m.location, margin)]
    limit = asymptotic_fairness(poly, (0.0, 0.0))
    ok = len(inner) == 1
    if ok:
        m = inner[0]
        ok &= math.hypot(*m.location) <= 0.5 and 1.0 < m.value <= limit + 0.05
    pts = ", ".join(f"{fmt_pt(m.location)}={m.value:.6f}" for m in inner)
    return ok, (f"{len(inner)} interior minima (> {margin:.3f} from boundary): {pts}; "
                f"limit at centre {limit:.6f}")


def criterion_4():
    poly = shapes.triangle()
    found = find_perfect_fan(poly, 6, (5.0, 9.3), 1e-3)
    if found is None:
        return False, "no perfect fan found"
    p, part = found
    ok = abs(p[0] - 5.0) <= 0.1 and 9.01042 < p[1] <= 9.95
    target = TRIANGLE_AREA / 6
    worst = max(abs(a - target) / target for a in part.areas)
    ok &= len(part.areas) == 6 and worst <= 1e-9
    return ok, f"origin {fmt_pt(p)}, F = {fairness_ratio(part):.8f}, worst area error {worst:.2e}"


def criterion_5():
    poly = shapes.hexagon()
    terrain = scan_terrain(poly, ASYMPTOTIC, HEX_WINDOW, (120, 100))
    cands = asymptotic_candidates(poly).points()
    minima = [m for m in local_minima(terrain) if math.isfinite(m.value)]
    diag = terrain.cell_diagonal
    far = [m for m in minima if nearest(m.location, cands) > diag]
    inner = [m for m in minima if classify_point(poly, m.location) == INTERIOR]
    ok = not far and len(inner) == 1
    return ok, (f"{len(minima)} finite minima, {len(far)} farther than {diag:.3f} from "
                f"{len(cands)} candidates; interior: {[fmt_pt(m.location) for m in inner]}")


def criterion_6():
    t0 = time.perf_counter()
    poly = shapes.hexagon()
    terrain = scan_terrain(poly, 700, HEX_WINDOW, (60, 54), 8, workers=default_workers())
    refined = refined_minima(poly, terrain)
    elapsed = time.perf_counter() - t0
    cands = asymptotic_candidates(poly).points()
    gaps = [nearest(m.location, cands) for m in refined]
    inner = [m for m in refined if deep_inside(poly, m.location, terrain.cell_diagonal)]
    ok = max(gaps) <= 1.5 and len(inner) == 1 and elapsed <= 900.0
    return ok, (f"{len(refined)} refined minima, worst distance to a candidate {max(gaps):.3f}; "
                f"interior: {[fmt_pt(m.location) for m in inner]}; {elapsed:.0f} s")


# ---------------------------------------------------------------------------
# randomised criteria


def criterion_7():
    rng = np.random.default_rng(7007)
    worst = 0.0
    for _ in range(20):
        poly = random_convex(rng, lo=5, hi=9)
        p = random_interior(rng, poly)
        for n in (2, 3, 4, 5):
            a = fairness_value(poly, p, n, EXACT)
            b = fairness_value(poly, p, n, SAMPLED, 4096)
            if math.isinf(a) and math.isinf(b):
                continue
            worst = max(worst, abs(a - b) / b)
    return worst <= 1e-4, f"worst relative gap {worst:.2e} over 80 cases"


def criterion_8():
    rng = np.random.default_rng(8008)
    worst_piece = worst_sum = 0.0
    bad_pieces = bad_fans = built = 0
    while built < 500:
        poly = random_convex(rng)
        n = int(rng.integers(2, 10))
        make = (random_exterior, random_boundary, random_interior)[built % 3]
        part = fan_partition(poly, make(rng, poly), n, rng.uniform(0, 2 * math.pi))
        if part is Infeasible:
            continue
        built += 1
        A = poly.area
        worst_piece = max(worst_piece, max(abs(a - A / n) / (A / n) for a in part.areas))
        worst_sum = max(worst_sum, abs(sum(part.areas) - A) / A)
        for piece in part.pieces:
            v = np.asarray(piece.vertices)
            e = np.roll(v, -1, axis=0) - v
            f = np.roll(e, -1, axis=0)
            if np.any(e[:, 0] * f[:, 1] - e[:, 1] * f[:, 0] < -1e-9 * poly.scale**2):
                bad_pieces += 1
        bad_fans += not all(g <= math.pi + 1e-9 for g in part.fan.gaps())
    ok = worst_piece <= 1e-9 and worst_sum <= 1e-9 and bad_pieces == 0 and bad_fans == 0
    return ok, (f"500 partitions: piece error {worst_piece:.1e}, sum error {worst_sum:.1e}, "
                f"{bad_pieces} non-convex pieces, {bad_fans} non-convex fans")


def criterion_9():
    rng = np.random.default_rng(9009)
    worst = 0.0
    mismatched = 0
    for k in range(50):
        poly = random_convex(rng)
        p = random_interior(rng, poly) if k % 2 else random_exterior(rng, poly)
        n = int(rng.integers(1, 9))
        mat, shift, _, _ = similarity(rng)
        moved = validate_polygon(poly.vertices @ mat.T + shift)
        q = tuple(np.asarray(p) @ mat.T + shift)
        a = fairness_value(poly, p, n, EXACT)
        b = fairness_value(moved, q, n, EXACT)
        if math.isinf(a) or math.isinf(b):
            mismatched += math.isinf(a) != math.isinf(b)
            continue
        worst = max(worst, abs(a - b) / a)
    return worst <= 1e-6 and mismatched == 0, f"worst relative change {worst:.2e} over 50 cases"


def criterion_10():
    poly = shapes.ellipse_polygon(10.0, 1.0, 16)
    limit = asymptotic_fairness(poly, (0.0, 0.0))
    v = fairness_value(poly, (0.0, 0.0), 256, SAMPLED, 16)
    rel = abs(v - limit) / limit
    return limit >= 8.0 and rel <= 0.25, f"limit {limit:.4f}, F(n=256) {v:.4f}, gap {rel:.1%}"


def criterion_11():
    rng = np.random.default_rng(1111)
    ones = 0
    for _ in range(100):
        poly = random_convex(rng)
        p = (random_interior if rng.random() < 0.5 else random_exterior)(rng, poly)
        ones += fairness_value(poly, p, 1) == 1.0
    worst = 0.0
    for n in range(2, 13):
        u = rng.uniform(1, 5) * np.array([1.0, 0.0])
        ang = rng.uniform(0.3, 2.8)
        v = rng.uniform(1, 5) * np.array([math.cos(ang), math.sin(ang)])
        poly = validate_polygon([(0, 0), tuple(u), tuple(u + v), tuple(v)])
        worst = max(worst, fairness_ratio(parallel_fan(poly, ang, n)) - 1.0)
    ok = ones == 100 and worst <= 1e-9
    return ok, f"F(P,1) = 1 at {ones}/100 points; parallelogram strips off by {worst:.1e}"


CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 12)}


def run_criterion(k: int) -> tuple[bool, str]:
    t0 = time.perf_counter()
    ok, detail = CRITERIA[k]()
    status = "PASS" if ok else "FAIL"
    return ok, f"{status} criterion {k}: {detail} [{time.perf_counter() - t0:.1f} s]"


@pytest.mark.parametrize("k", list(CRITERIA))
def test_criterion(k):
    from conftest import ACCEPTANCE_LINES

    ok, line = run_criterion(k)
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


if __name__ == "__main__":
    chosen = [int(a) for a in sys.argv[1:]] or list(CRITERIA)
    results = [run_criterion(k) for k in chosen]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
