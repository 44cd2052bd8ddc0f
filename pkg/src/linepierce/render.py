"""Deterministic SVG 1.1 drawings of instances and of the line construction.

With a simplex point the picture is drawn in the frame of the construction:
unit circle, f1..f5, the three lines clipped to a disk of radius 3, M, and a
label inside each wedge.  Bodies get the class ``pierced`` or the name of the
wedge that holds them, so tests can check structure without looking at pixels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .construction import RegionLabel, SimplexPoint, classify, line_triple, regions
from .geom import Instance, Line

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


@dataclass(frozen=True)
class RenderSpec:
    size: int = 600
    view_radius: float = 3.0       # half-width of the viewport when x is given
    stroke: float = 1.5
    font_size: int = 14
    bodies: bool = True
    circle: bool = True
    circle_points: bool = True
    lines: bool = True
    center: bool = True
    region_labels: bool = True
    arc_labels: bool = False
    label_pull: float = 0.6        # label sits at M + pull * (arc midpoint - M)

    def __post_init__(self):
        if self.size <= 0 or self.view_radius <= 0:
            raise ValueError("size and view_radius must be positive")


def _fmt(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


class _Canvas:
    def __init__(self, lo: np.ndarray, hi: np.ndarray, size: int):
        span = float(max(hi - lo))
        self.scale = size / span
        self.lo, self.hi, self.size = lo, hi, size
        self.items: list[str] = []

    def xy(self, p) -> tuple[str, str]:
        return (_fmt((p[0] - self.lo[0]) * self.scale),
                _fmt((self.hi[1] - p[1]) * self.scale))

    def add(self, s: str) -> None:
        self.items.append(s)

    def polygon(self, pts, cls: str, color: str, width: float) -> None:
        coords = " ".join(",".join(self.xy(p)) for p in pts)
        if len(pts) == 1:
            x, y = self.xy(pts[0])
            self.add(f'<circle class="{cls}" cx="{x}" cy="{y}" r="2" fill="{color}"/>')
        elif len(pts) == 2:
            self.add(f'<polyline class="{cls}" points="{coords}" fill="none" '
                     f'stroke="{color}" stroke-width="{_fmt(width * 2)}"/>')
        else:
            self.add(f'<polygon class="{cls}" points="{coords}" fill="{color}" '
                     f'fill-opacity="0.35" stroke="{color}" stroke-width="{_fmt(width)}"/>')

    def segment(self, p, q, cls: str, color: str, width: float) -> None:
        (x1, y1), (x2, y2) = self.xy(p), self.xy(q)
        self.add(f'<line class="{cls}" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" '
                 f'stroke="{color}" stroke-width="{_fmt(width)}"/>')

    def dot(self, p, cls: str, r: float, color: str) -> None:
        x, y = self.xy(p)
        self.add(f'<circle class="{cls}" cx="{x}" cy="{y}" r="{_fmt(r)}" fill="{color}"/>')

    def text(self, p, s: str, cls: str, size: int) -> None:
        x, y = self.xy(p)
        self.add(f'<text class="{cls}" x="{x}" y="{y}" font-size="{size}" '
                 f'text-anchor="middle" dominant-baseline="middle">{escape(s)}</text>')

    def svg(self) -> str:
        head = ('<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n'
                f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
                f'width="{self.size}" height="{self.size}" '
                f'viewBox="0 0 {self.size} {self.size}">\n'
                f'<rect class="background" x="0" y="0" width="{self.size}" '
                f'height="{self.size}" fill="white"/>\n')
        return head + "\n".join(self.items) + "\n</svg>\n"


def clip_to_disk(line: Line, radius: float) -> tuple[tuple[float, float], tuple[float, float]] | None:
    """Chord of ``line`` inside the disk of the given radius about the origin."""
    a = line.anchor            # foot of the perpendicular from the origin
    h2 = radius * radius - (a.x * a.x + a.y * a.y)
    if h2 <= 0:
        return None
    h = math.sqrt(h2)
    dx, dy = line.direction
    return (a.x - h * dx, a.y - h * dy), (a.x + h * dx, a.y + h * dy)


def render_svg(instance: Instance | None, x: SimplexPoint | None = None,
               spec: RenderSpec = RenderSpec()) -> str:
    """SVG text.  Bodies are drawn in the coordinates they are given in, so pass
    a normalized instance when ``x`` is given."""
    bodies = [] if instance is None else [(fi, b) for fi, f in enumerate(instance.families)
                                          for b in f.bodies]
    if x is not None:
        r = spec.view_radius
        lo, hi = np.array([-r, -r]), np.array([r, r])
    elif bodies:
        pts = np.vstack([b.vertices for _, b in bodies])
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        pad = 0.05 * max(float(max(hi - lo)), 1e-9)
        mid = 0.5 * (lo + hi)
        half = 0.5 * float(max(hi - lo)) + pad
        lo, hi = mid - half, mid + half
    else:
        lo, hi = np.array([-1.0, -1.0]), np.array([1.0, 1.0])
    c = _Canvas(lo, hi, spec.size)

    t = regs = None
    if x is not None:
        t = line_triple(x)
        regs = regions(t)

    if spec.bodies:
        for fi, b in bodies:
            cls = f"body family-{fi + 1}"
            if t is not None:
                lab = classify(b, t, regs)
                cls += " pierced" if lab is RegionLabel.PIERCED else f" region-{lab.value}"
            c.polygon(b.vertices, cls, PALETTE[fi % len(PALETTE)], spec.stroke)

    if t is not None:
        if spec.circle:
            cx, cy = c.xy((0.0, 0.0))
            c.add(f'<circle class="unit-circle" cx="{cx}" cy="{cy}" '
                  f'r="{_fmt(c.scale)}" fill="none" stroke="black" '
                  f'stroke-width="{_fmt(spec.stroke)}"/>')
        if spec.lines:
            for i, ln in enumerate(t.lines, 1):
                seg = clip_to_disk(ln, spec.view_radius)
                if seg is not None:
                    c.segment(*seg, f"line l{i}", "#444444", spec.stroke)
        if spec.circle_points:
            for i, p in enumerate(t.circle_points, 1):
                c.dot(p, f"circle-point f{i}", 4, "black")
                c.text((1.12 * p.x, 1.12 * p.y), f"f{i}", "circle-point-label", spec.font_size)
        if spec.center:
            c.dot(t.M, "center M", 4, "#d62728")
            c.text((t.M.x, t.M.y - 0.12), "M", "center-label", spec.font_size)
        if spec.region_labels or spec.arc_labels:
            for reg in regs:
                mid = reg.arc_midpoint()
                if spec.region_labels:
                    p = (t.M.x + spec.label_pull * (mid.x - t.M.x),
                         t.M.y + spec.label_pull * (mid.y - t.M.y))
                    c.text(p, reg.label.value, f"region-label region-{reg.label.value}",
                           spec.font_size)
                if spec.arc_labels:
                    c.text((1.3 * mid.x, 1.3 * mid.y), f"{reg.arc_length:.3f}",
                           "arc-label", spec.font_size - 2)
    return c.svg()


def render(instance: Instance | None, x: SimplexPoint | None, path,
           spec: RenderSpec = RenderSpec()) -> None:
    Path(path).write_text(render_svg(instance, x, spec))
