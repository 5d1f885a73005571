"""Small derivative-free minimisers used by the fairness and search modules."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def golden_section(f: Callable[[np.ndarray], np.ndarray], a, b, tol: float):
    """Golden-section search run on many brackets at once.

    ``f`` maps an array of abscissae to an array of values; ``a`` and ``b``
    are arrays of bracket ends.  Returns (best x, best value) per bracket,
    taken over every point evaluated, so the result never exceeds the
    value at either interior probe.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float)).copy()
    b = np.atleast_1d(np.asarray(b, dtype=float)).copy()
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    h = hi - lo
    width = float(h.max()) if len(h) else 0.0
    if width <= tol or len(h) == 0:
        mid = 0.5 * (lo + hi)
        return mid, f(mid)
    steps = int(math.ceil(math.log(tol / width) / math.log(INV_PHI)))
    c = lo + INV_PHI2 * h
    d = lo + INV_PHI * h
    fc = f(c)
    fd = f(d)
    best_x = np.where(fc <= fd, c, d)
    best_f = np.minimum(fc, fd)
    for _ in range(max(steps - 1, 0)):
        left = fc < fd
        # left: keep [lo, d]; else keep [c, hi]
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
        h = hi - lo
        new_c = lo + INV_PHI2 * h
        new_d = lo + INV_PHI * h
        probe = np.where(left, new_c, new_d)
        fp = f(probe)
        c, d = np.where(left, new_c, d), np.where(left, c, new_d)
        fc, fd = np.where(left, fp, fd), np.where(left, fc, fp)
        better = fp < best_f
        best_x = np.where(better, probe, best_x)
        best_f = np.where(better, fp, best_f)
    return best_x, best_f


def golden_scalar(f: Callable[[float], float], a: float, b: float, tol: float) -> tuple[float, float]:
    """Scalar convenience wrapper around :func:`golden_section`."""
    x, v = golden_section(lambda xs: np.array([f(float(t)) for t in xs]), [a], [b], tol)
    return float(x[0]), float(v[0])


def pattern_search(f: Callable[[float, float], float], x0: tuple[float, float], step: float,
                   min_step: float, f0: float | None = None, max_evals: int = 20000,
                   rel_gain: float = 1e-13):
    """Compass search in the plane with step halving.

    Polls the four axis directions and then the four diagonals; moves to
    the first point lower by more than ``rel_gain`` (relative), halves the
    step when none is found.  The margin stops the walk from drifting
    along flat valleys on rounding noise.  Returns (point, value, evaluations).
    """
    x, y = float(x0[0]), float(x0[1])
    fx = f(x, y) if f0 is None else f0
    evals = 1 if f0 is None else 0
    dirs = ((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0),
            (1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0))
    last = None
    while step >= min_step and evals < max_evals:
        moved = False
        order = dirs if last is None else (last,) + tuple(d for d in dirs if d != last)
        for dx, dy in order:
            s = step if dx == 0.0 or dy == 0.0 else step * math.sqrt(0.5)
            cx, cy = x + s * dx, y + s * dy
            fc = f(cx, cy)
            evals += 1
            if fc < fx - rel_gain * abs(fx):
                x, y, fx = cx, cy, fc
                moved = True
                last = (dx, dy)
                break
        if not moved:
            step *= 0.5
            last = None
    return (x, y), fx, evals
