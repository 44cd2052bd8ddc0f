"""From a point of the shrunken 4-simplex to three concurrent lines.

A point ``x`` with coordinates ``x_i >= eps`` summing to one places five points
on the unit circle at cumulative angles ``2 pi (x_1 + ... + x_i)``; the fifth
is always (1, 0).  Chords ``f1 f4`` and ``f2 f5`` cross at ``M`` and the third
line joins ``f3`` to ``M``.  The three lines cut the disk into six wedges,
named after the circle arcs they touch: ``R2..R5`` hold the arcs ``f1 f2`` ..
``f4 f5``, while the arc ``f5 f1`` is split by the third line into ``R1a``
(next to f5) and ``R1b`` (next to f1).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import TOL
from .geom import (ConvexBody, Family, GeometryError, Line, Parallel, Point,
                   line_line_intersection)

TWO_PI = 2.0 * math.pi


class DegenerateRegions(GeometryError):
    pass


@dataclass(frozen=True)
class Fatness:
    """Fatness radius ``delta`` and the simplex margin ``eps = delta / (4 pi)``."""

    delta: float

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("fatness radius must be positive")
        if 5 * self.eps >= 1:
            raise ValueError(f"delta={self.delta} leaves an empty shrunken simplex")

    @property
    def eps(self) -> float:
        return self.delta / (4.0 * math.pi)


@dataclass(frozen=True)
class SimplexPoint:
    coords: tuple[float, ...]
    eps: float = 0.0
    relaxed: bool = False

    def __post_init__(self):
        c = tuple(float(v) for v in self.coords)
        object.__setattr__(self, "coords", c)
        if len(c) != 5 or not all(math.isfinite(v) for v in c):
            raise ValueError(f"expected five finite coordinates, got {c}")
        if abs(sum(c) - 1.0) > 1e-12:
            raise ValueError(f"coordinates sum to {sum(c)!r}, not 1")
        if self.relaxed:
            if min(c) < -1e-15:
                raise ValueError("negative simplex coordinate")
        else:
            if not self.eps > 0:
                raise ValueError("shrunken simplex needs eps > 0 (use SimplexPoint.plain)")
            if min(c) < self.eps - 1e-15:
                raise ValueError(f"coordinate {min(c)!r} below eps={self.eps!r}")

    @classmethod
    def plain(cls, coords: Sequence[float]) -> SimplexPoint:
        """Point of the closed simplex, coordinates may be zero."""
        return cls(tuple(coords), 0.0, relaxed=True)

    @classmethod
    def barycenter(cls, eps: float) -> SimplexPoint:
        return cls((0.2,) * 5, eps)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def as_array(self) -> np.ndarray:
        return np.array(self.coords)


class RegionLabel(str, enum.Enum):
    R1a = "R1a"
    R1b = "R1b"
    R2 = "R2"
    R3 = "R3"
    R4 = "R4"
    R5 = "R5"
    PIERCED = "Pierced"

    @property
    def color(self) -> int | None:
        if self is RegionLabel.PIERCED:
            return None
        return 1 if self in (RegionLabel.R1a, RegionLabel.R1b) else int(self.value[1])


# Wedge triples that no single line can meet all at once.
ALTERNATING_TRIPLES = ((RegionLabel.R1a, RegionLabel.R2, RegionLabel.R4),
                       (RegionLabel.R1b, RegionLabel.R3, RegionLabel.R5))


def cumulative_angles(x) -> np.ndarray:
    """Angles of f1..f5; the last is exactly 2 pi."""
    c = np.cumsum(np.asarray(tuple(x), dtype=float)[:4])
    return np.append(TWO_PI * c, TWO_PI)


def circle_points(x: SimplexPoint) -> tuple[Point, ...]:
    ang = cumulative_angles(x)[:4]
    pts = [Point(math.cos(a), math.sin(a)) for a in ang]
    return (*pts, Point(1.0, 0.0))


@dataclass(frozen=True)
class LineTriple:
    l1: Line
    l2: Line
    l3: Line
    M: Point
    circle_points: tuple[Point, ...]
    angles: tuple[float, ...]

    @property
    def lines(self) -> tuple[Line, Line, Line]:
        return self.l1, self.l2, self.l3

    def far_point(self) -> Point:
        """Second intersection of the third line with the unit circle."""
        f3 = self.circle_points[2]
        d = (self.M - f3)
        n = d.norm()
        dx, dy = d.x / n, d.y / n
        s = -2.0 * (f3.x * dx + f3.y * dy)
        return Point(f3.x + s * dx, f3.y + s * dy)

    def far_angle(self) -> float:
        g = self.far_point()
        return math.atan2(g.y, g.x) % TWO_PI

    def direction_points(self) -> tuple[Point, Point, Point]:
        """Points at unit distance from M on each line, oriented towards f1, f2
        and away from f3 respectively so the choice varies continuously."""
        out = []
        for target, sign in ((self.circle_points[0], 1.0), (self.circle_points[1], 1.0),
                             (self.circle_points[2], -1.0)):
            d = target - self.M
            n = d.norm()
            out.append(Point(self.M.x + sign * d.x / n, self.M.y + sign * d.y / n))
        return tuple(out)


def line_triple(x: SimplexPoint) -> LineTriple:
    f = circle_points(x)
    l1 = Line.through(f[0], f[3])
    l2 = Line.through(f[1], f[4])
    M = line_line_intersection(l1, l2)
    if isinstance(M, Parallel):
        raise AssertionError(f"chords f1f4 and f2f5 do not cross at {x.coords}")
    l3 = Line.through(f[2], M)
    return LineTriple(l1, l2, l3, M, f, tuple(cumulative_angles(x)))


@dataclass(frozen=True)
class Region:
    label: RegionLabel
    signs: tuple[int, int, int]
    arc: tuple[float, float]          # CCW angular interval on the unit circle

    @property
    def arc_length(self) -> float:
        return self.arc[1] - self.arc[0]

    def arc_midpoint(self) -> Point:
        a = 0.5 * (self.arc[0] + self.arc[1])
        return Point(math.cos(a), math.sin(a))


def _signs_at(lines, p, tol: float) -> tuple[int, ...]:
    out = []
    for ln in lines:
        s = ln.signed_distance(p)
        out.append(1 if s > tol else -1 if s < -tol else 0)
    return tuple(out)


def regions(t: LineTriple, retries: int = 8) -> tuple[Region, ...]:
    """The six wedges in CCW order starting at f5: R1a, R1b, R2, R3, R4, R5."""
    a = t.angles
    g = t.far_angle()
    if not 0.0 < g < a[0]:
        raise DegenerateRegions(f"third line leaves the disk at angle {g}, outside (0, {a[0]})")
    arcs = [(RegionLabel.R1a, (0.0, g)), (RegionLabel.R1b, (g, a[0])),
            (RegionLabel.R2, (a[0], a[1])), (RegionLabel.R3, (a[1], a[2])),
            (RegionLabel.R4, (a[2], a[3])), (RegionLabel.R5, (a[3], a[4]))]
    out = []
    for label, (lo, hi) in arcs:
        mid = 0.5 * (lo + hi)
        for attempt in range(retries + 1):
            theta = mid + attempt * 1e-6 * (1 if attempt % 2 else -1)
            signs = _signs_at(t.lines, (math.cos(theta), math.sin(theta)), TOL.sign)
            if 0 not in signs:
                break
        else:
            raise DegenerateRegions(f"arc midpoint of {label.value} lies on a line")
        out.append(Region(label, signs, (lo, hi)))
    if len({r.signs for r in out}) != 6:
        raise DegenerateRegions("regions do not have six distinct sign vectors")
    return tuple(out)


def classify(body: ConvexBody, t: LineTriple, region_list: Sequence[Region] | None = None) -> RegionLabel:
    """Pierced when the closed body meets a line, else the wedge holding it."""
    signs = []
    for ln in t.lines:
        s = ln.signed_distances(body.vertices)
        if not (np.all(s > TOL.sign) or np.all(s < -TOL.sign)):
            return RegionLabel.PIERCED
        signs.append(1 if s[0] > 0 else -1)
    key = tuple(signs)
    for r in (region_list if region_list is not None else regions(t)):
        if r.signs == key:
            return r.label
    raise DegenerateRegions(f"sign vector {key} matches no wedge")


def classify_family(fam: Family, t: LineTriple) -> list[RegionLabel]:
    regs = regions(t)
    return [classify(b, t, regs) for b in fam.bodies]


def color_presence(x: SimplexPoint, fam: Family) -> frozenset[int]:
    """Colours i such that some body lies inside R_i (R1a and R1b both give 1).

    Empty exactly when the three lines pierce every body.
    """
    t = line_triple(x)
    return frozenset(lab.color for lab in classify_family(fam, t) if lab.color is not None)


def color_witnesses(x: SimplexPoint, fam: Family) -> dict[RegionLabel, int]:
    """First body index found in each wedge."""
    t = line_triple(x)
    out: dict[RegionLabel, int] = {}
    for i, lab in enumerate(classify_family(fam, t)):
        if lab is not RegionLabel.PIERCED:
            out.setdefault(lab, i)
    return out


# ---------------------------------------------------------------- batch forms

def _lines_through(p: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d = q - p
    d /= np.linalg.norm(d, axis=-1, keepdims=True)
    n = np.stack([-d[..., 1], d[..., 0]], axis=-1)
    return n, np.einsum("...k,...k->...", n, p)


def batch_triples(X: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized ``line_triple`` for ``X`` of shape (N, 5).

    Returns circle points (N, 5, 2), unit normals (N, 3, 2), offsets (N, 3)
    and M (N, 2).  A point ``p`` has signed distance ``normal . p - offset``.
    """
    X = np.atleast_2d(X)
    ang = TWO_PI * np.cumsum(X[:, :4], axis=1)
    f = np.empty((len(X), 5, 2))
    f[:, :4, 0] = np.cos(ang)
    f[:, :4, 1] = np.sin(ang)
    f[:, 4] = (1.0, 0.0)
    n1, c1 = _lines_through(f[:, 0], f[:, 3])
    n2, c2 = _lines_through(f[:, 1], f[:, 4])
    det = n1[:, 0] * n2[:, 1] - n1[:, 1] * n2[:, 0]
    M = np.stack([(c1 * n2[:, 1] - c2 * n1[:, 1]) / det,
                  (n1[:, 0] * c2 - n2[:, 0] * c1) / det], axis=1)
    n3, c3 = _lines_through(f[:, 2], M)
    normals = np.stack([n1, n2, n3], axis=1)
    offsets = np.stack([c1, c2, c3], axis=1)
    return f, normals, offsets, M
