"""Polygon files, terrain grid files and run reports.

Terrain files are plain text that gnuplot's ``splot`` reads directly::

    # fairfan terrain
    # window -12 -9 12 9
    # resolution 160 120
    # n 3
    # theta_samples 32
    -11.925 -8.925 1.74319125
    ...

One ``x y value`` line per cell centre (``%.9g``, ``inf`` for infinity),
rows by ascending y, x ascending within a row, a blank line between rows.
Reports are JSON with every number rounded to 12 significant digits and
infinities spelled ``"inf"``.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import FairFanError
from .geometry import ConvexPolygon, validate_polygon
from .partition import FanPartition
from .search import Minimum, Terrain, cell_centres, is_asymptotic

TERRAIN_MAGIC = "# fairfan terrain"
REPORT_DIGITS = 12


class FormatError(FairFanError):
    """A polygon, terrain or report document could not be parsed."""


# ---------------------------------------------------------------------------
# polygons


def polygon_from_document(doc: Any) -> tuple[ConvexPolygon, str | None]:
    if not isinstance(doc, dict) or "vertices" not in doc:
        raise FormatError("polygon document needs a 'vertices' list")
    raw = doc["vertices"]
    if not isinstance(raw, list) or not all(
            isinstance(v, (list, tuple)) and len(v) == 2 for v in raw):
        raise FormatError("'vertices' must be a list of [x, y] pairs")
    try:
        pts = [(float(x), float(y)) for x, y in raw]
    except (TypeError, ValueError) as exc:
        raise FormatError(f"non-numeric vertex: {exc}") from None
    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise FormatError("'name' must be a string")
    return validate_polygon(pts), name


def load_polygon(path: str | Path) -> tuple[ConvexPolygon, str | None]:
    """Read a ``{"vertices": [[x, y], ...], "name": ...}`` document."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: {exc}") from None
    return polygon_from_document(doc)


def polygon_document(polygon: ConvexPolygon, name: str | None = None) -> dict:
    doc: dict[str, Any] = {"vertices": [[float(x), float(y)] for x, y in polygon.vertices]}
    if name is not None:
        doc["name"] = name
    return doc


def save_polygon(path: str | Path, polygon: ConvexPolygon, name: str | None = None) -> None:
    Path(path).write_text(json.dumps(polygon_document(polygon, name), indent=2) + "\n")


def polygon_hash(polygon: ConvexPolygon) -> str:
    """Short digest of the validated vertex chain."""
    blob = ",".join(f"{x!r}:{y!r}" for x, y in polygon.vertices.tolist())
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# terrain grids


def _g9(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.9g}"


def format_terrain(terrain: Terrain) -> str:
    x0, y0, x1, y1 = terrain.window
    n = "asymptotic" if is_asymptotic(terrain.n_mode) else str(terrain.n_mode)
    lines = [
        TERRAIN_MAGIC,
        f"# window {x0!r} {y0!r} {x1!r} {y1!r}",
        f"# resolution {terrain.cols} {terrain.rows}",
        f"# n {n}",
        f"# theta_samples {terrain.theta_samples}",
    ]
    xs = [_g9(x) for x in terrain.xs]
    for i, y in enumerate(terrain.ys):
        if i:
            lines.append("")
        ys = _g9(y)
        row = terrain.values[i]
        lines.extend(f"{x} {ys} {_g9(v)}" for x, v in zip(xs, row))
    return "\n".join(lines) + "\n"


def write_terrain(path: str | Path, terrain: Terrain) -> None:
    Path(path).write_text(format_terrain(terrain))


def parse_terrain(text: str) -> Terrain:
    """Inverse of :func:`format_terrain` (values come back at file precision)."""
    meta: dict[str, list[str]] = {}
    values: list[float] = []
    lines = text.splitlines()
    if not lines or lines[0].strip() != TERRAIN_MAGIC:
        raise FormatError("not a fairfan terrain file")
    for ln in lines[1:]:
        if ln.startswith("#"):
            parts = ln[1:].split()
            if parts:
                meta[parts[0]] = parts[1:]
            continue
        if not ln.strip():
            continue
        parts = ln.split()
        if len(parts) != 3:
            raise FormatError(f"bad data line {ln!r}")
        values.append(float(parts[2]))
    try:
        window = tuple(float(t) for t in meta["window"])
        cols, rows = (int(t) for t in meta["resolution"])
        n_raw = meta["n"][0]
        samples = int(meta["theta_samples"][0])
    except (KeyError, ValueError, IndexError) as exc:
        raise FormatError(f"missing or bad header field: {exc}") from None
    if len(window) != 4:
        raise FormatError("window needs 4 numbers")
    if len(values) != cols * rows:
        raise FormatError(f"expected {cols * rows} samples, found {len(values)}")
    n_mode: int | str = n_raw if is_asymptotic(n_raw) else int(n_raw)
    grid = np.array(values).reshape(rows, cols)
    grid.setflags(write=False)
    return Terrain(window, (cols, rows), n_mode, grid, samples)


def read_terrain(path: str | Path) -> Terrain:
    return parse_terrain(Path(path).read_text())


def terrain_axes(terrain: Terrain) -> tuple[np.ndarray, np.ndarray]:
    x0, y0, x1, y1 = terrain.window
    return cell_centres(x0, x1, terrain.cols), cell_centres(y0, y1, terrain.rows)


# ---------------------------------------------------------------------------
# reports


def _round(v: Any) -> Any:
    """Normalise a JSON-like tree: floats to 12 significant digits."""
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            return v
        return float(f"{v:.{REPORT_DIGITS}g}")
    if isinstance(v, dict):
        return {str(k): _round(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_round(x) for x in v]
    raise TypeError(f"cannot serialise {type(v).__name__}")


def _encode(v: Any) -> Any:
    if isinstance(v, float) and not math.isfinite(v):
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if isinstance(v, dict):
        return {k: _encode(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_encode(x) for x in v]
    return v


def _decode(v: Any) -> Any:
    if v in ("inf", "-inf", "nan"):
        return float(v)
    if isinstance(v, dict):
        return {k: _decode(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_decode(x) for x in v]
    return v


def minimum_record(m: Minimum) -> dict:
    return {"x": m.location[0], "y": m.location[1], "value": m.value, "kind": m.kind}


def partition_record(part: FanPartition | None, fairness: float | None = None) -> dict | None:
    if part is None:
        return None
    fan = part.fan
    rec = {
        "kind": fan.kind,
        "origin": None if fan.origin is None else [fan.origin[0], fan.origin[1]],
        "direction": fan.direction,
        "ray_angles": list(fan.ray_angles),
        "offsets": list(fan.offsets),
        "areas": part.areas,
        "perimeters": part.perimeters,
    }
    if fairness is not None:
        rec["fairness"] = fairness
    return rec


@dataclass
class RunReport:
    """Everything a command produced, in a lossless JSON form."""

    command: str
    parameters: dict = field(default_factory=dict)
    polygon: dict = field(default_factory=dict)
    minima: list = field(default_factory=list)
    witness: dict | None = None
    results: dict = field(default_factory=dict)
    wall_clock: float = 0.0
    tool: str = "fairfan"
    version: str = ""

    def __post_init__(self):
        for name in ("parameters", "polygon", "minima", "witness", "results", "wall_clock"):
            setattr(self, name, _round(getattr(self, name)))

    def to_json(self) -> str:
        return json.dumps(_encode(asdict(self)), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        try:
            doc = _decode(json.loads(text))
        except json.JSONDecodeError as exc:
            raise FormatError(f"bad report: {exc}") from None
        return cls(**doc)


def polygon_summary(polygon: ConvexPolygon, name: str | None) -> dict:
    return {
        "name": name,
        "hash": polygon_hash(polygon),
        "vertices": polygon.vertices.tolist(),
        "area": polygon.area,
        "perimeter": polygon.perimeter,
    }


__all__ = [
    "FormatError", "RunReport", "format_terrain", "load_polygon", "minimum_record",
    "parse_terrain", "partition_record", "polygon_document", "polygon_from_document",
    "polygon_hash", "polygon_summary", "read_terrain", "save_polygon", "write_terrain",
]
