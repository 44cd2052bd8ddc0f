"""JSON instance and result files.

Instance file::

    {
      "version": "linepierce-instance/1",
      "families": [{"name": "F1", "bodies": [[[x, y], [x, y], ...], ...]}, ...],
      "anchor": [x, y],            # optional
      "expected": {...}            # optional regression block
    }

Floats are written with ``repr``, the shortest decimal string that reads back
to the same double, so load/save round trips are bit exact.  Bodies are
replaced by their convex hull on load.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .geom import ConvexBody, Family, GeometryError, Instance, Line, Point, convex_hull

INSTANCE_VERSION = "linepierce-instance/1"
RESULT_VERSION = "linepierce-result/1"


class InstanceFormatError(ValueError):
    pass


@dataclass
class InstanceFile:
    instance: Instance
    anchor: Point | None = None
    expected: dict[str, Any] | None = None
    version: str = INSTANCE_VERSION
    extra: dict[str, Any] = field(default_factory=dict)


def _num(v, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InstanceFormatError(f"{where}: expected a number, got {v!r}")
    v = float(v)
    if not math.isfinite(v):
        raise InstanceFormatError(f"{where}: non-finite number")
    return v


def _pair(v, where: str) -> tuple[float, float]:
    if not isinstance(v, list) or len(v) != 2:
        raise InstanceFormatError(f"{where}: expected an [x, y] pair, got {v!r}")
    return _num(v[0], f"{where}[0]"), _num(v[1], f"{where}[1]")


def _parse_json(text: str, source: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceFormatError(f"{source}:{e.lineno}:{e.colno}: {e.msg}") from None
    if not isinstance(data, dict):
        raise InstanceFormatError(f"{source}: top level must be an object")
    return data


def loads(text: str, source: str = "<string>") -> InstanceFile:
    data = _parse_json(text, source)
    version = data.get("version")
    if version is None:
        raise InstanceFormatError(f"{source}: missing 'version' tag")
    if version != INSTANCE_VERSION:
        raise InstanceFormatError(f"{source}: unsupported version {version!r}")
    fams_raw = data.get("families")
    if not isinstance(fams_raw, list) or not fams_raw:
        raise InstanceFormatError(f"{source}: 'families' must be a nonempty list")
    families = []
    for fi, f in enumerate(fams_raw):
        where = f"families[{fi}]"
        if not isinstance(f, dict):
            raise InstanceFormatError(f"{where}: expected an object")
        bodies_raw = f.get("bodies")
        if not isinstance(bodies_raw, list) or not bodies_raw:
            raise InstanceFormatError(f"{where}.bodies: must be a nonempty list")
        bodies = []
        for bi, b in enumerate(bodies_raw):
            bw = f"{where}.bodies[{bi}]"
            if not isinstance(b, list) or not b:
                raise InstanceFormatError(f"{bw}: expected a nonempty vertex list")
            pts = [_pair(p, f"{bw}[{vi}]") for vi, p in enumerate(b)]
            bodies.append(convex_hull(pts))
        families.append(Family(tuple(bodies), str(f.get("name", f"F{fi + 1}"))))
    try:
        inst = Instance(tuple(families))
    except GeometryError as e:
        raise InstanceFormatError(f"{source}: {e}") from None
    anchor = data.get("anchor")
    anchor = Point(*_pair(anchor, "anchor")) if anchor is not None else None
    expected = data.get("expected")
    extra = {k: v for k, v in data.items()
             if k not in ("version", "families", "anchor", "expected")}
    return InstanceFile(inst, anchor, expected, version, extra)


def load(path) -> InstanceFile:
    path = Path(path)
    return loads(path.read_text(), str(path))


def _body_json(b: ConvexBody) -> list:
    return [[float(x), float(y)] for x, y in b.vertices]


def to_dict(instance: Instance, anchor=None, expected=None, extra=None) -> dict:
    d: dict[str, Any] = {"version": INSTANCE_VERSION}
    d["families"] = [{"name": f.name, "bodies": [_body_json(b) for b in f.bodies]}
                     for f in instance.families]
    if anchor is not None:
        d["anchor"] = [float(anchor[0]), float(anchor[1])]
    if expected is not None:
        d["expected"] = expected
    if extra:
        d.update(extra)
    return d


def dumps(instance: Instance, anchor=None, expected=None, extra=None) -> str:
    """One body per line; everything else as ordinary JSON."""
    d = to_dict(instance, anchor, expected, extra)
    fams = d.pop("families")
    out = ["{", f' "version": {json.dumps(d.pop("version"))},', ' "families": [']
    for fi, f in enumerate(fams):
        out.append(f'  {{"name": {json.dumps(f["name"])}, "bodies": [')
        for bi, b in enumerate(f["bodies"]):
            out.append("   " + json.dumps(b) + ("," if bi < len(f["bodies"]) - 1 else ""))
        out.append("  ]}" + ("," if fi < len(fams) - 1 else ""))
    out.append(" ]" + ("," if d else ""))
    items = list(d.items())
    for i, (k, v) in enumerate(items):
        out.append(f" {json.dumps(k)}: {json.dumps(v)}" + ("," if i < len(items) - 1 else ""))
    out.append("}")
    return "\n".join(out) + "\n"


def save(path, instance: Instance, anchor=None, expected=None, extra=None) -> None:
    Path(path).write_text(dumps(instance, anchor, expected, extra))


# --------------------------------------------------------------------- results

def result_to_dict(result) -> dict:
    """Serializable form of a PiercingResult (defining points of each line,
    so the lines can be rebuilt exactly)."""
    return {
        "version": RESULT_VERSION,
        "family": result.family,
        "exact": result.exact,
        "lines": [{"through": [[p.x, p.y], [q.x, q.y]]} for p, q in result.defining_points],
        "M": [result.M.x, result.M.y],
        "residual": result.residual,
        "concurrency_residual": result.concurrency_residual,
        "normalization_scale": result.similarity.scale,
        "x": list(result.x.coords),
        "anchor": None if result.anchor is None else [result.anchor.x, result.anchor.y],
        "evaluations": result.evaluations,
        "seconds": result.seconds,
        "trace": [{"delta": e.delta, "eps": e.eps, "score": e.score, "x": list(e.x),
                   "M": list(e.M), "P": [list(p) for p in e.P], "family": e.family}
                  for e in result.trace],
    }


@dataclass
class StoredResult:
    family: int
    lines: tuple[Line, ...]
    M: Point
    normalization_scale: float
    anchor: Point | None
    raw: dict


def load_result(path) -> StoredResult:
    path = Path(path)
    data = _parse_json(path.read_text(), str(path))
    if data.get("version") != RESULT_VERSION:
        raise InstanceFormatError(f"{path}: missing or unsupported result version")
    try:
        lines = tuple(Line.through(_pair(l["through"][0], f"lines[{i}].through[0]"),
                                   _pair(l["through"][1], f"lines[{i}].through[1]"))
                      for i, l in enumerate(data["lines"]))
        M = Point(*_pair(data["M"], "M"))
        fam = int(data["family"])
        scale = _num(data.get("normalization_scale", 1.0), "normalization_scale")
    except (KeyError, TypeError, IndexError) as e:
        raise InstanceFormatError(f"{path}: malformed result ({e})") from None
    anchor = data.get("anchor")
    anchor = Point(*_pair(anchor, "anchor")) if anchor is not None else None
    return StoredResult(fam, lines, M, scale, anchor, data)
