"""Compiled inner loops for the interior rotation search.

An interior sector table is packed into one (9, k+1) array (see
:func:`pack`): sector start x/y, edge vector x/y, sector area and sector
boundary length in the first k columns of rows 0-5, then cumulative area,
vertex angle and boundary arclength (k+1 entries) in rows 6-8.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0
TWO_PI = 2.0 * math.pi
GAP_EPS = 1e-9


def pack(table) -> np.ndarray:
    k = len(table.sector_areas)
    out = np.zeros((9, k + 1))
    out[0, :k] = table.start[:, 0]
    out[1, :k] = table.start[:, 1]
    out[2, :k] = table.span[:, 0]
    out[3, :k] = table.span[:, 1]
    out[4, :k] = table.sector_areas
    out[5, :k] = table.sector_lengths
    out[6] = table.cumulative_areas
    out[7] = table.vertex_angles
    out[8] = table.boundary_arclengths
    return out


@njit(cache=True)
def _sector(cum, a, k):
    lo = 0
    hi = k
    # largest j with cum[j] <= a, clipped to [0, k-1]
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        if cum[mid] <= a:
            lo = mid
        else:
            hi = mid
    return lo


@njit(cache=True)
def _hit(T, px, py, a):
    k = T.shape[1] - 1
    j = _sector(T[6], a, k)
    sa = T[4, j]
    t = (a - T[6, j]) / sa if sa > 0.0 else 0.0
    t = min(max(t, 0.0), 1.0)
    wx = T[0, j]
    wy = T[1, j]
    rx = wx + t * T[2, j] - px
    ry = wy + t * T[3, j] - py
    wx -= px
    wy -= py
    ang = T[7, j] + math.atan2(wx * ry - wy * rx, wx * rx + wy * ry)
    return ang, math.hypot(rx, ry), T[8, j] + t * T[5, j]


@njit(cache=True)
def _fan(T, px, py, rc, s0):
    """(max/min piece perimeter, widest angular gap) of the fan at offset ``s0``."""
    k = T.shape[1] - 1
    A = T[6, k]
    per = T[8, k]
    n = rc.shape[0]
    a0 = 0.0
    r0 = 0.0
    b0 = 0.0
    ap = 0.0
    rp = 0.0
    bp = 0.0
    lo = math.inf
    hi = 0.0
    gap = 0.0
    for i in range(n + 1):
        if i < n:
            a = s0 + rc[i]
            w = math.floor(a / A)
            ang, r, b = _hit(T, px, py, a - w * A)
            ang += TWO_PI * w
            b += per * w
            if i == 0:
                a0, r0, b0 = ang, r, b
        else:
            ang, r, b = a0 + TWO_PI, r0, b0 + per
        if i > 0:
            gap = max(gap, ang - ap)
            p = rp + r + (b - bp)
            lo = min(lo, p)
            hi = max(hi, p)
        ap, rp, bp = ang, r, b
    return hi / lo, gap


@njit(cache=True)
def rotation_value(T, px, py, rc, s0, relaxed):
    """max/min piece perimeter of the fan whose first ray sweeps area ``s0``."""
    v, gap = _fan(T, px, py, rc, s0)
    if gap > math.pi + GAP_EPS and not relaxed:
        return math.inf
    return v


@njit(cache=True)
def area_at_angle(T, px, py, theta):
    k = T.shape[1] - 1
    phi = T[7]
    th = phi[0] + (theta - phi[0]) % TWO_PI
    j = _sector(phi, th, k)
    dx = math.cos(th)
    dy = math.sin(th)
    wx = T[0, j]
    wy = T[1, j]
    num = (px - wx) * dy - (py - wy) * dx
    den = T[2, j] * dy - T[3, j] * dx
    t = num / den if den != 0.0 else 0.0
    t = min(max(t, 0.0), 1.0)
    return T[6, j] + t * T[4, j]


@njit(cache=True)
def _objective(T, px, py, rc, x, by_angle, gap):
    s = area_at_angle(T, px, py, x) if by_angle else x
    if gap:
        return _fan(T, px, py, rc, s)[1]
    return rotation_value(T, px, py, rc, s, False)


@njit(cache=True)
def _golden(T, px, py, rc, lo, hi, tol, by_angle, gap=False):
    """Golden-section minimum on [lo, hi]; returns (x, value) of the best probe.

    Minimises the fairness ratio, or the widest gap when ``gap`` is set.
    """
    h = hi - lo
    if h <= tol:
        x = 0.5 * (lo + hi)
        return x, _objective(T, px, py, rc, x, by_angle, gap)
    steps = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))
    c = lo + INV_PHI2 * h
    d = lo + INV_PHI * h
    fc = _objective(T, px, py, rc, c, by_angle, gap)
    fd = _objective(T, px, py, rc, d, by_angle, gap)
    if fc <= fd:
        bx, bf = c, fc
    else:
        bx, bf = d, fd
    for _ in range(max(steps - 1, 0)):
        left = fc < fd
        if left:
            hi = d
            d, fd = c, fc
            x = lo + INV_PHI2 * (hi - lo)
        else:
            lo = c
            c, fc = d, fd
            x = lo + INV_PHI * (hi - lo)
        fx = _objective(T, px, py, rc, x, by_angle, gap)
        if left:
            c, fc = x, fx
        else:
            d, fd = x, fx
        if fx < bf:
            bx, bf = x, fx
    return bx, bf


@njit(cache=True)
def _value_at(T, px, py, rc, x, by_angle):
    return _objective(T, px, py, rc, x, by_angle, False)


@njit(cache=True)
def _bracket_min(T, px, py, rc, lo, hi, flo, fhi, tol, by_angle):
    """Golden search on [lo, hi] after trimming an infeasible end.

    Optima often sit exactly on the edge of the convex range, so when one
    end is infinite the feasibility boundary is located by bisection first.
    """
    if math.isinf(flo) != math.isinf(fhi):
        good, bad = (lo, hi) if math.isinf(fhi) else (hi, lo)
        fgood = flo if math.isinf(fhi) else fhi
        while abs(bad - good) > tol:
            mid = 0.5 * (good + bad)
            fm = _value_at(T, px, py, rc, mid, by_angle)
            if math.isinf(fm):
                bad = mid
            else:
                good, fgood = mid, fm
        if math.isinf(fhi):
            hi, edge = good, good
        else:
            lo, edge = good, good
        x, v = _golden(T, px, py, rc, lo, hi, tol, by_angle)
        if fgood < v:
            return edge, fgood
        return x, v
    return _golden(T, px, py, rc, lo, hi, tol, by_angle)


@njit(cache=True)
def sampled_best(T, px, py, rc, samples, step_tol):
    """Best of ``samples`` uniform first-ray angles, then golden in angle.

    Returns (offset, value); value is inf when no sample is convex.
    """
    best_k = -1
    best_v = math.inf
    best_s = math.nan
    for i in range(samples):
        th = TWO_PI * i / samples
        s = area_at_angle(T, px, py, th)
        v = rotation_value(T, px, py, rc, s, False)
        if v < best_v:
            best_k, best_v, best_s = i, v, s
    if best_k < 0:
        return math.nan, math.inf
    th0 = TWO_PI * best_k / samples
    step = TWO_PI / samples
    f_lo = _value_at(T, px, py, rc, th0 - step, True)
    f_hi = _value_at(T, px, py, rc, th0 + step, True)
    x, v = _bracket_min(T, px, py, rc, th0 - step, th0, f_lo, best_v, step_tol, True)
    x2, v2 = _bracket_min(T, px, py, rc, th0, th0 + step, best_v, f_hi, step_tol, True)
    if v2 < v:
        x, v = x2, v2
    if v < best_v:
        return area_at_angle(T, px, py, x), v
    return best_s, best_v


@njit(cache=True)
def _cell_min(T, px, py, rc, a, b, fa, fb, tol):
    if math.isinf(fa) and math.isinf(fb):
        # a convex window may still hide strictly inside the cell
        x, g = _golden(T, px, py, rc, a, b, tol, False, True)
        fx = rotation_value(T, px, py, rc, x, False)
        if math.isinf(fx):
            return x, math.inf
        x1, v1 = _bracket_min(T, px, py, rc, a, x, fa, fx, tol, False)
        x2, v2 = _bracket_min(T, px, py, rc, x, b, fx, fb, tol, False)
        if v2 < v1:
            x1, v1 = x2, v2
        if fx < v1:
            x1, v1 = x, fx
        return x1, v1
    return _bracket_min(T, px, py, rc, a, b, fa, fb, tol, False)


@njit(cache=True)
def exact_candidates(T, px, py, rc, grid, period, tol, screen=1e-5, coarse=1e-4):
    """Values on a sorted cyclic grid plus a golden minimum inside every cell.

    Every cell is first searched to ``coarse`` of its width; cells whose
    coarse minimum is within ``screen`` (relative) of the best are then
    searched again to ``tol``.  Returns (offsets, values), 2 * len(grid)
    entries.
    """
    m = grid.shape[0]
    xs = np.empty(2 * m)
    vs = np.empty(2 * m)
    for i in range(m):
        xs[i] = grid[i]
        vs[i] = rotation_value(T, px, py, rc, grid[i], False)
    best = math.inf
    for i in range(m):
        a = grid[i]
        b = grid[i + 1] if i + 1 < m else grid[0] + period
        x, v = _cell_min(T, px, py, rc, a, b, vs[i], vs[(i + 1) % m], max(coarse * (b - a), tol))
        xs[m + i] = x
        vs[m + i] = v
        best = min(best, v, vs[i])
    if math.isinf(best):
        return xs, vs
    cut = best * (1.0 + screen)
    for i in range(m):
        if vs[m + i] > cut:
            continue
        a = grid[i]
        b = grid[i + 1] if i + 1 < m else grid[0] + period
        x, v = _cell_min(T, px, py, rc, a, b, vs[i], vs[(i + 1) % m], tol)
        if v <= vs[m + i]:
            xs[m + i] = x
            vs[m + i] = v
    return xs, vs
