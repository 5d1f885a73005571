"""``fairfan`` command line.

Exit codes: 0 success, 2 bad arguments or invalid input, 3 file I/O failure.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from . import __version__, shapes
from .errors import FairFanError
from .fairness import EXACT, SAMPLED, asymptotic_fairness, evaluate, fairness_ratio
from .files import (
    RunReport,
    load_polygon,
    minimum_record,
    partition_record,
    polygon_summary,
    save_polygon,
    write_terrain,
)
from .geometry import ConvexPolygon, classify_point
from .partition import Fan, fan_partition
from .search import (
    ASYMPTOTIC,
    asymptotic_candidates,
    auto_window,
    fairest_fan,
    find_perfect_fan,
    refined_minima,
    scan_terrain,
    witness_partition,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument helpers


def _floats(text: str, count: int, what: str) -> tuple[float, ...]:
    parts = text.split(",")
    if len(parts) != count:
        raise argparse.ArgumentTypeError(f"{what} needs {count} comma-separated numbers")
    try:
        vals = tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number in {what} {text!r}") from None
    if not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"{what} must be finite")
    return vals


def point_arg(text: str) -> tuple[float, float]:
    return _floats(text, 2, "point")


def window_arg(text: str) -> tuple[float, float, float, float]:
    return _floats(text, 4, "window")


def res_arg(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise argparse.ArgumentTypeError("resolution must look like 160x120")
    c, r = int(parts[0]), int(parts[1])
    if c < 2 or r < 2:
        raise argparse.ArgumentTypeError("resolution must be at least 2x2")
    return c, r


def positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def open_polygon(spec: str) -> tuple[ConvexPolygon, str]:
    """A polygon file path, or the name of a built-in shape."""
    path = Path(spec)
    if not path.exists() and spec in shapes.BUILTIN:
        return shapes.BUILTIN[spec](), spec
    poly, name = load_polygon(path)
    return poly, name if name is not None else path.stem


def fmt_value(v: float) -> str:
    return "inf" if math.isinf(v) else f"{v:.12f}"


def n_mode_of(args) -> int | str:
    if getattr(args, "asymptotic", False):
        return ASYMPTOTIC
    if args.n is None:
        raise UsageError("give --n N or --asymptotic")
    return args.n


def finite_n(args, command: str) -> int:
    if getattr(args, "asymptotic", False) or args.n is None:
        raise UsageError(f"{command} needs a finite --n N")
    return args.n


def emit(report: RunReport, out: str | None) -> None:
    text = report.to_json()
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def fan_lines(fan: Fan | None) -> list[str]:
    if fan is None:
        return ["fan none"]
    lines = [f"kind {fan.kind}"]
    if fan.origin is not None:
        lines.append(f"origin {fan.origin[0]:.12g} {fan.origin[1]:.12g}")
    if fan.direction is not None:
        lines.append(f"direction {fan.direction:.12g}")
    lines.append("rays " + " ".join(f"{a:.12g}" for a in fan.ray_angles))
    return lines


# ---------------------------------------------------------------------------
# commands


def cmd_fvalue(args) -> int:
    poly, _ = open_polygon(args.polygon)
    if args.asymptotic:
        print(fmt_value(asymptotic_fairness(poly, args.point)))
        return EXIT_OK
    mode = n_mode_of(args)
    v, kind, apex, angles = evaluate(poly, args.point, mode, args.mode, args.theta_samples)
    print(fmt_value(v))
    fan = Fan(kind, apex, angles) if angles or math.isfinite(v) else None
    for ln in fan_lines(fan):
        print(ln)
    return EXIT_OK


def cmd_fan(args) -> int:
    poly, name = open_polygon(args.polygon)
    t0 = time.perf_counter()
    part = fan_partition(poly, args.point, finite_n(args, "fan"), args.theta)
    params = {"point": list(args.point), "n": args.n, "theta": args.theta}
    if not part:
        rep = RunReport("fan", params, polygon_summary(poly, name), results={"feasible": False},
                        wall_clock=time.perf_counter() - t0, version=__version__)
    else:
        rep = RunReport("fan", params, polygon_summary(poly, name),
                        witness=partition_record(part, fairness_ratio(part)),
                        results={"feasible": True, "kind": classify_point(poly, args.point)},
                        wall_clock=time.perf_counter() - t0, version=__version__)
    emit(rep, args.out)
    return EXIT_OK


def cmd_terrain(args) -> int:
    poly, _ = open_polygon(args.polygon)
    if not args.out:
        raise UsageError("terrain needs --out PATH")
    window = args.window or auto_window(poly)
    terrain = scan_terrain(poly, n_mode_of(args), window, args.res, args.theta_samples,
                           workers=args.workers)
    write_terrain(args.out, terrain)
    return EXIT_OK


def _minima_report(poly, name, args, command="minima"):
    t0 = time.perf_counter()
    n = n_mode_of(args)
    window = args.window or auto_window(poly)
    terrain = scan_terrain(poly, n, window, args.res, args.theta_samples, workers=args.workers)
    minima = sorted(refined_minima(poly, terrain), key=lambda m: (m.value, m.location))
    witness = None
    if minima and n != ASYMPTOTIC and math.isfinite(minima[0].value):
        part = witness_partition(poly, minima[0].location, n)
        witness = partition_record(part, minima[0].value)
    params = {"n": n, "window": list(window), "resolution": list(args.res),
              "theta_samples": args.theta_samples}
    rep = RunReport(command, params, polygon_summary(poly, name),
                    [minimum_record(m) for m in minima], witness,
                    wall_clock=time.perf_counter() - t0, version=__version__)
    return rep, terrain, minima


def cmd_minima(args) -> int:
    poly, name = open_polygon(args.polygon)
    rep, _, _ = _minima_report(poly, name, args)
    emit(rep, args.out)
    return EXIT_OK


def cmd_best(args) -> int:
    poly, name = open_polygon(args.polygon)
    finite_n(args, "best")
    t0 = time.perf_counter()
    res = fairest_fan(poly, args.n, args.strategy, resolution=args.res,
                      theta_samples=args.theta_samples, workers=args.workers)
    params = {"n": args.n, "strategy": args.strategy, "resolution": list(args.res),
              "theta_samples": args.theta_samples}
    rep = RunReport("best", params, polygon_summary(poly, name),
                    [minimum_record(m) for m in res.minima],
                    partition_record(res.partition, res.best.value),
                    results={"best": minimum_record(res.best)},
                    wall_clock=time.perf_counter() - t0, version=__version__)
    emit(rep, args.out)
    return EXIT_OK


def cmd_perfect(args) -> int:
    poly, name = open_polygon(args.polygon)
    finite_n(args, "perfect")
    if args.point is None:
        raise UsageError("perfect needs --point X,Y (the seed)")
    t0 = time.perf_counter()
    found = find_perfect_fan(poly, args.n, args.point, args.tol)
    params = {"n": args.n, "seed": list(args.point), "tol": args.tol}
    if found is None:
        results = {"found": False}
        witness = None
    else:
        origin, part = found
        results = {"found": True, "origin": list(origin), "fairness": fairness_ratio(part)}
        witness = partition_record(part, fairness_ratio(part))
    rep = RunReport("perfect", params, polygon_summary(poly, name), witness=witness,
                    results=results, wall_clock=time.perf_counter() - t0, version=__version__)
    emit(rep, args.out)
    return EXIT_OK


def cmd_candidates(args) -> int:
    poly, name = open_polygon(args.polygon)
    t0 = time.perf_counter()
    cands = asymptotic_candidates(poly)
    rows = [{"role": role, "x": p[0], "y": p[1], "value": v} for role, p, v in cands.all()]
    rep = RunReport("candidates", {}, polygon_summary(poly, name),
                    results={"count": len(rows), "candidates": rows},
                    wall_clock=time.perf_counter() - t0, version=__version__)
    emit(rep, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# figure reproduction


@dataclass(frozen=True)
class Figure:
    polygon: Callable[[], ConvexPolygon]
    shape: str
    n: int | str
    window: tuple[float, float, float, float]
    resolution: tuple[int, int]
    samples: int
    perfect_seed: tuple[float, float] | None = None
    title: str = ""


FIGURES = {
    "fig1a": Figure(shapes.ellipse12, "ellipse12", 3, (-12, -9, 12, 9), (160, 120), 32,
                    title="12-gon, n = 3"),
    "fig1b": Figure(shapes.ellipse12, "ellipse12", 10, (-12, -9, 12, 9), (160, 120), 32,
                    title="12-gon, n = 10"),
    "fig1c": Figure(shapes.ellipse12, "ellipse12", 100, (-12, -9, 12, 9), (80, 60), 24,
                    title="12-gon, n = 100"),
    "fig2a": Figure(shapes.hexagon, "hexagon", 700, (-20, -15, 25, 25), (80, 72), 16,
                    title="hexagon, n = 700"),
    "fig2b": Figure(shapes.hexagon, "hexagon", 700, (-5, -1, 12, 13), (80, 72), 16,
                    title="hexagon, n = 700, central window"),
    "fig3": Figure(shapes.triangle, "triangle", 6, (0, 4, 10, 14), (80, 80), 32,
                   perfect_seed=(5.0, 9.3), title="triangle, n = 6"),
}

PERFECT_LEVEL = 1.02


def gnuplot_script(stem: str, fig: Figure) -> str:
    return "\n".join([
        f"# {fig.title}",
        "set terminal pngcairo size 1000,760",
        f"set output '{stem}.png'",
        "set view map",
        "set size ratio -1",
        "set datafile missing 'inf'",
        "set logscale cb",
        "set contour base",
        "set cntrparam levels 25",
        "unset key",
        f"set title '{fig.title}'",
        f"splot '{stem}.dat' using 1:2:3 with pm3d, \\",
        f"      '{stem}_outline.dat' using 1:2:(1) with lines lc rgb 'black' lw 2 nosurface",
        "",
    ])


def reproduce(figure: str, out_dir: Path, resolution=None, samples=None, workers: int = 1) -> RunReport:
    fig = FIGURES[figure]
    t0 = time.perf_counter()
    poly = fig.polygon()
    res = resolution or fig.resolution
    k = samples or fig.samples
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = out_dir / figure
    terrain = scan_terrain(poly, fig.n, fig.window, res, k, workers=workers)
    minima = sorted(refined_minima(poly, terrain), key=lambda m: (m.value, m.location))
    results: dict = {"grid_minima": len(minima)}
    witness = None
    if minima and math.isfinite(minima[0].value):
        results["global"] = minimum_record(minima[0])
        part = witness_partition(poly, minima[0].location, fig.n)
        witness = partition_record(part, minima[0].value)
        results["perfect_minima"] = [minimum_record(m) for m in minima if m.value <= PERFECT_LEVEL]
    if fig.perfect_seed is not None:
        found = find_perfect_fan(poly, fig.n, fig.perfect_seed)
        if found is None:
            results["perfect"] = {"found": False}
        else:
            origin, part = found
            results["perfect"] = {"found": True, "origin": list(origin),
                                  "kind": part.fan.kind, "fairness": fairness_ratio(part)}
            witness = partition_record(part, fairness_ratio(part))
    write_terrain(f"{stem}.dat", terrain)
    save_polygon(out_dir / f"{fig.shape}.json", poly, fig.shape)
    ring = poly.vertices.tolist() + [poly.vertices[0].tolist()]
    (out_dir / f"{figure}_outline.dat").write_text("".join(f"{x!r} {y!r}\n" for x, y in ring))
    (out_dir / f"{figure}.gp").write_text(gnuplot_script(figure, fig))
    params = {"figure": figure, "n": fig.n, "window": list(fig.window), "resolution": list(res),
              "theta_samples": k}
    rep = RunReport("reproduce", params, polygon_summary(poly, fig.shape),
                    [minimum_record(m) for m in minima], witness, results,
                    wall_clock=time.perf_counter() - t0, version=__version__)
    (out_dir / f"{figure}.json").write_text(rep.to_json())
    return rep


def cmd_reproduce(args) -> int:
    out = Path(args.out or ".")
    figs = list(FIGURES) if args.figure == "all" else [args.figure]
    for f in figs:
        rep = reproduce(f, out, args.res, args.theta_samples, args.workers)
        print(f"{f}: {out / (f + '.dat')}, {out / (f + '.json')}, {out / (f + '.gp')} "
              f"({rep.wall_clock:.1f} s)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fairfan", description="Perimeter-fair fan equipartitions.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, n=True, point=False, grid=False, out=True):
        sp.add_argument("--polygon", required=True,
                        help="polygon JSON file, or one of: " + ", ".join(shapes.BUILTIN))
        if n:
            g = sp.add_mutually_exclusive_group()
            g.add_argument("--n", type=positive_int)
            g.add_argument("--asymptotic", action="store_true", help="the n -> infinity limit")
        if point:
            sp.add_argument("--point", type=point_arg, required=point == "required", metavar="X,Y")
        if grid:
            sp.add_argument("--window", type=window_arg, metavar="X0,Y0,X1,Y1")
            sp.add_argument("--res", type=res_arg, default=grid, metavar="CxR")
            sp.add_argument("--workers", type=positive_int, default=1)
        sp.add_argument("--theta-samples", type=positive_int, default=32, metavar="K")
        if out:
            sp.add_argument("--out", metavar="PATH")

    sp = sub.add_parser("fvalue", help="F(P, n) and its witness fan")
    common(sp, point="required", out=False)
    sp.add_argument("--mode", choices=(EXACT, SAMPLED), default=EXACT)
    sp.set_defaults(func=cmd_fvalue)

    sp = sub.add_parser("fan", help="cut the polygon with a fan from a point")
    common(sp, point="required")
    sp.add_argument("--theta", type=float, default=0.0, help="first ray angle (interior points)")
    sp.set_defaults(func=cmd_fan)

    sp = sub.add_parser("terrain", help="write a fairness grid file")
    common(sp, grid=(160, 120))
    sp.set_defaults(func=cmd_terrain)

    sp = sub.add_parser("minima", help="refined local minima of a terrain")
    common(sp, grid=(160, 120))
    sp.set_defaults(func=cmd_minima)

    sp = sub.add_parser("best", help="fairest fan origin for n")
    common(sp, grid=(80, 60))
    sp.add_argument("--strategy", choices=("scan", "candidates", "auto"), default="auto")
    sp.set_defaults(func=cmd_best)

    sp = sub.add_parser("perfect", help="look for a perfectly fair fan from a seed point")
    common(sp, point=True)
    sp.add_argument("--tol", type=float, default=1e-3)
    sp.set_defaults(func=cmd_perfect)

    sp = sub.add_parser("candidates", help="n -> infinity candidate origins")
    common(sp, n=False)
    sp.set_defaults(func=cmd_candidates)

    sp = sub.add_parser("reproduce", help="regenerate a figure's data, report and plot script")
    sp.add_argument("figure", choices=tuple(FIGURES) + ("all",))
    sp.add_argument("--out", metavar="DIR")
    sp.add_argument("--res", type=res_arg, metavar="CxR")
    sp.add_argument("--theta-samples", type=positive_int, metavar="K")
    sp.add_argument("--workers", type=positive_int, default=1)
    sp.set_defaults(func=cmd_reproduce)
    return p


VALUE_FLAGS = ("--point", "--window")


def glue_values(argv: Sequence[str]) -> list[str]:
    """Attach values like ``-12,-9,12,9`` to their flag so argparse keeps them."""
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = parser.parse_args(glue_values(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, FairFanError) as exc:
        print(f"fairfan: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"fairfan: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
