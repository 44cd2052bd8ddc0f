"""Planar primitives: points, canonical lines, convex bodies, Minkowski thickening
and similarity normalization into the unit disk.

Bodies are closed convex polygons stored as ``(k, 2)`` float arrays in
counterclockwise order.  A connected set meets a line exactly when its convex
hull does, so the polygon stands in for any compact connected set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .config import TOL


class GeometryError(ValueError):
    pass


class EmptyGeometry(GeometryError):
    pass


class AnchorInsideHull(GeometryError):
    pass


@dataclass(frozen=True, slots=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"non-finite point ({self.x}, {self.y})")

    def __add__(self, other: Point) -> Point:
        return Point(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Point) -> Point:
        return Point(self.x - other.x, self.y - other.y)

    def __mul__(self, s: float) -> Point:
        return Point(self.x * s, self.y * s)

    __rmul__ = __mul__

    def __iter__(self):
        yield self.x
        yield self.y

    def __getitem__(self, i: int) -> float:
        return (self.x, self.y)[i]

    def __len__(self) -> int:
        return 2

    def __array__(self, dtype=None, copy=None):
        return np.array((self.x, self.y), dtype=dtype or float)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def dist(self, other: Point) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    @classmethod
    def of(cls, p) -> Point:
        if isinstance(p, Point):
            return p
        return cls(float(p[0]), float(p[1]))


def _canonical_direction(dx: float, dy: float) -> tuple[float, float]:
    n = math.hypot(dx, dy)
    if n == 0.0 or not math.isfinite(n):
        raise GeometryError("degenerate line direction")
    dx, dy = dx / n, dy / n
    # Near-vertical directions snap to (0, 1) so the sign convention is stable.
    if abs(dx) <= 1e-15:
        return 0.0, 1.0
    if dx < 0:
        dx, dy = -dx, -dy
    return dx, dy


@dataclass(frozen=True, slots=True)
class Line:
    """Infinite line in canonical form.

    ``direction`` is a unit vector whose first nonzero component is positive and
    ``anchor`` is the foot of the perpendicular from the origin, so every
    geometric line has exactly one representation.
    """

    anchor: Point
    direction: tuple[float, float]

    @classmethod
    def from_point_direction(cls, p, d) -> Line:
        p = Point.of(p)
        dx, dy = _canonical_direction(float(d[0]), float(d[1]))
        t = p.x * dx + p.y * dy
        return cls(Point(p.x - t * dx, p.y - t * dy), (dx, dy))

    @classmethod
    def through(cls, p, q) -> Line:
        p, q = Point.of(p), Point.of(q)
        if p.dist(q) == 0.0:
            raise GeometryError("line through coincident points")
        return cls.from_point_direction(p, (q.x - p.x, q.y - p.y))

    @property
    def normal(self) -> tuple[float, float]:
        """Left normal; ``normal . p - offset`` is the signed distance of ``p``."""
        dx, dy = self.direction
        return -dy, dx

    @property
    def offset(self) -> float:
        nx, ny = self.normal
        return nx * self.anchor.x + ny * self.anchor.y

    def signed_distance(self, p) -> float:
        dx, dy = self.direction
        return dx * (p[1] - self.anchor.y) - dy * (p[0] - self.anchor.x)

    def signed_distances(self, pts: np.ndarray) -> np.ndarray:
        dx, dy = self.direction
        return dx * (pts[:, 1] - self.anchor.y) - dy * (pts[:, 0] - self.anchor.x)

    def point_at(self, t: float) -> Point:
        return Point(self.anchor.x + t * self.direction[0], self.anchor.y + t * self.direction[1])

    def key(self, bucket: float = TOL.dedup) -> tuple[int, int, int]:
        dx, dy = self.direction
        return (round(dx / bucket), round(dy / bucket), round(self.offset / bucket))


@dataclass(frozen=True)
class Parallel:
    """Result of intersecting two lines with (numerically) equal directions."""

    coincident: bool


def _sign(v: float, tol: float = TOL.sign) -> int:
    if v > tol:
        return 1
    if v < -tol:
        return -1
    return 0


def side_of_line(line: Line, p) -> int:
    """+1 left of the line, -1 right, 0 within the sign tolerance."""
    return _sign(line.signed_distance(p))


def line_line_intersection(l1: Line, l2: Line) -> Point | Parallel:
    d1, d2 = l1.direction, l2.direction
    cross = d1[0] * d2[1] - d1[1] * d2[0]
    if abs(cross) < TOL.sign:
        return Parallel(coincident=abs(l2.signed_distance(l1.anchor)) <= TOL.sign)
    wx, wy = l2.anchor.x - l1.anchor.x, l2.anchor.y - l1.anchor.y
    t = (wx * d2[1] - wy * d2[0]) / cross
    return l1.point_at(t)


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


@dataclass(frozen=True, eq=False)
class ConvexBody:
    """Closed convex polygon; one vertex is a point, two a segment."""

    vertices: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float, copy=True).reshape(-1, 2)
        if len(v) == 0:
            raise EmptyGeometry("body without vertices")
        if not np.all(np.isfinite(v)):
            raise GeometryError("non-finite vertex")
        if len(v) > 1 and np.any(np.all(v == np.roll(v, -1, axis=0), axis=1)):
            raise GeometryError("repeated consecutive vertex")
        if len(v) >= 3:
            scale = 1.0 + float(np.abs(v).max())
            for i in range(len(v)):
                if _cross(v[i - 1], v[i], v[(i + 1) % len(v)]) < -TOL.geom * scale * scale:
                    raise GeometryError("vertices are not in convex counterclockwise order")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    def __len__(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        return f"ConvexBody({self.vertices.tolist()})"

    def __eq__(self, other) -> bool:
        return isinstance(other, ConvexBody) and np.array_equal(self.vertices, other.vertices)

    def __hash__(self) -> int:
        return hash(self.vertices.tobytes())

    @property
    def points(self) -> list[Point]:
        return [Point(float(x), float(y)) for x, y in self.vertices]

    def area(self) -> float:
        if len(self.vertices) < 3:
            return 0.0
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))

    def contains(self, p, tol: float = TOL.sign) -> bool:
        """Closed point-in-polygon test."""
        p = np.asarray(tuple(p), dtype=float)
        v = self.vertices
        if len(v) == 1:
            return bool(np.hypot(*(v[0] - p)) <= tol)
        if len(v) == 2:
            a, b = v
            ab = b - a
            L = float(np.hypot(*ab))
            if L == 0.0:        # underflowed edge length
                return bool(np.hypot(*(a - p)) <= tol)
            if abs(_cross(a, b, p)) > tol * L:
                return False
            t = float(np.dot(p - a, ab))
            return -tol * L <= t <= L * L + tol * L
        for i in range(len(v)):
            a, b = v[i], v[(i + 1) % len(v)]
            if _cross(a, b, p) < -tol * float(np.hypot(*(b - a))):
                return False
        return True

    def translated(self, dx: float, dy: float) -> ConvexBody:
        return ConvexBody(self.vertices + np.array([dx, dy]))


def convex_hull(points: Iterable) -> ConvexBody:
    """Monotone-chain hull; collinear input yields a segment, a single point a point body."""
    pts = sorted({(float(p[0]), float(p[1])) for p in points})
    if not pts:
        raise EmptyGeometry("convex hull of no points")
    if len(pts) <= 2:
        return ConvexBody(np.array(pts))
    lower: list = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 or (len(hull) > 2 and all(
            _cross(hull[0], hull[1], q) == 0 for q in hull[2:])):
        return ConvexBody(np.array([pts[0], pts[-1]]))
    return ConvexBody(np.array(hull))


def _straddles(s: np.ndarray, tol: float = TOL.sign) -> bool:
    return not (np.all(s > tol) or np.all(s < -tol))


def line_intersects_body(line: Line, body: ConvexBody) -> bool:
    return _straddles(line.signed_distances(body.vertices))


def distance_body_to_line(body: ConvexBody, line: Line) -> float:
    s = line.signed_distances(body.vertices)
    if _straddles(s):
        return 0.0
    return float(np.abs(s).min())


def thicken(body: ConvexBody, delta: float, samples: int = TOL.thicken_samples) -> ConvexBody:
    """Outer polygonal approximation of ``body + disk(delta)``.

    Each vertex is swept by a regular ``samples``-gon circumscribing the disk
    (circumradius ``delta / cos(pi / samples)``), so the result contains the
    exact Minkowski sum and lies inside the sum with the enlarged disk.  The
    sample angles are global, which keeps the output monotone in ``delta``.
    """
    if delta < 0:
        raise GeometryError("negative thickening radius")
    if delta == 0:
        return body
    r = delta / math.cos(math.pi / samples)
    ang = 2 * math.pi * np.arange(samples) / samples
    ring = r * np.column_stack([np.cos(ang), np.sin(ang)])
    cloud = (body.vertices[:, None, :] + ring[None, :, :]).reshape(-1, 2)
    return convex_hull(cloud)


@dataclass(frozen=True)
class Family:
    bodies: tuple[ConvexBody, ...]
    name: str = "F"

    def __post_init__(self):
        bodies = tuple(self.bodies)
        if not bodies:
            raise GeometryError(f"family {self.name!r} is empty")
        object.__setattr__(self, "bodies", bodies)

    def __len__(self) -> int:
        return len(self.bodies)

    def __iter__(self):
        return iter(self.bodies)

    def map(self, fn) -> Family:
        return Family(tuple(fn(b) for b in self.bodies), self.name)


@dataclass(frozen=True)
class Instance:
    """One to five families.  Fewer than five are padded cyclically for the
    five-colour machinery, so a single family is replicated five times."""

    families: tuple[Family, ...]

    def __post_init__(self):
        fams = tuple(self.families)
        if not 1 <= len(fams) <= 5:
            raise GeometryError(f"an instance holds 1 to 5 families, got {len(fams)}")
        object.__setattr__(self, "families", fams)

    def __len__(self) -> int:
        return len(self.families)

    def colorful_index(self) -> tuple[int, ...]:
        """Original family index behind each of the five colour slots."""
        return tuple(i % len(self.families) for i in range(5))

    def all_vertices(self) -> np.ndarray:
        return np.concatenate([b.vertices for f in self.families for b in f.bodies])

    def map(self, fn) -> Instance:
        return Instance(tuple(f.map(fn) for f in self.families))


@dataclass(frozen=True)
class Similarity:
    """p -> scale * R(rotation) p + translation."""

    scale: float
    rotation: float
    translation: Point

    def __post_init__(self):
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise GeometryError("similarity scale must be positive and finite")

    def _rot(self) -> tuple[float, float]:
        return math.cos(self.rotation), math.sin(self.rotation)

    def apply(self, p) -> Point:
        c, s = self._rot()
        x, y = p
        return Point(self.scale * (c * x - s * y) + self.translation.x,
                     self.scale * (s * x + c * y) + self.translation.y)

    def invert(self, p) -> Point:
        c, s = self._rot()
        x, y = p[0] - self.translation.x, p[1] - self.translation.y
        return Point((c * x + s * y) / self.scale, (-s * x + c * y) / self.scale)

    def apply_array(self, pts: np.ndarray) -> np.ndarray:
        c, s = self._rot()
        R = np.array([[c, -s], [s, c]])
        return self.scale * pts @ R.T + np.array([self.translation.x, self.translation.y])

    def invert_array(self, pts: np.ndarray) -> np.ndarray:
        c, s = self._rot()
        R = np.array([[c, -s], [s, c]])
        return (pts - np.array([self.translation.x, self.translation.y])) @ R / self.scale

    def apply_body(self, body: ConvexBody) -> ConvexBody:
        return ConvexBody(self.apply_array(body.vertices))

    def invert_body(self, body: ConvexBody) -> ConvexBody:
        return ConvexBody(self.invert_array(body.vertices))

    def apply_line(self, line: Line) -> Line:
        return Line.through(self.apply(line.anchor), self.apply(line.point_at(1.0)))

    def invert_line(self, line: Line) -> Line:
        return Line.through(self.invert(line.anchor), self.invert(line.point_at(1.0)))


NORMALIZED_RADIUS = 0.9


def normalize_instance(instance: Instance,
                       radius: float = NORMALIZED_RADIUS) -> tuple[Instance, Similarity]:
    """Map every body into the closed disk of ``radius`` about the origin.

    The centre is the bounding-box midpoint; a scene collapsed to a point is
    only translated.
    """
    v = instance.all_vertices()
    lo, hi = v.min(axis=0), v.max(axis=0)
    centre = 0.5 * (lo + hi)
    R = float(np.hypot(*(v - centre).T).max())
    scale = radius / R if R > 0 else 1.0
    sim = Similarity(scale, 0.0, Point(-scale * centre[0], -scale * centre[1]))
    return instance.map(sim.apply_body), sim


def _separating_direction(hull: ConvexBody, q: np.ndarray) -> tuple[np.ndarray, float]:
    """Unit ``u`` and margin ``m > 0`` with ``(p - q) . u <= -m`` for every hull point,
    or margin <= 0 when ``q`` is not strictly outside."""
    v = hull.vertices
    if len(v) == 1:
        d = q - v[0]
        n = float(np.hypot(*d))
        return (d / n if n > 0 else np.array([1.0, 0.0])), n
    best_u, best_m = None, -math.inf
    # Candidate directions: away from each edge's closest point and each vertex.
    edges = [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))] if len(v) > 2 else [(v[0], v[1])]
    for a, b in edges:
        ab = b - a
        t = min(1.0, max(0.0, float(np.dot(q - a, ab) / np.dot(ab, ab))))
        d = q - (a + t * ab)
        n = float(np.hypot(*d))
        if n == 0.0:
            return np.array([1.0, 0.0]), 0.0
        u = d / n
        m = float(np.min((q - v) @ u))
        if m > best_m:
            best_u, best_m = u, m
    if len(v) > 2 and hull.contains(q, tol=0.0):
        return best_u, min(best_m, 0.0)
    return best_u, best_m


def anchored_normalize(instance: Instance, q) -> tuple[Instance, Similarity]:
    """Similarity sending ``q`` exactly to (1, 0) and every body strictly inside the unit disk.

    A direction ``u`` separating ``q`` from the hull with margin ``m`` is chosen;
    the circle of radius ``R`` centred at ``q - R u`` passes through ``q`` and,
    for ``R`` at least ``(m_p^2 + h_p^2) / m_p`` at each vertex (``m_p`` its depth
    behind the separating line, ``h_p`` its lateral offset), contains every
    vertex strictly inside.
    """
    q = Point.of(q)
    qa = np.array([q.x, q.y])
    hull = convex_hull(instance.all_vertices())
    u, margin = _separating_direction(hull, qa)
    scale_ref = 1.0 + float(np.abs(hull.vertices - qa).max())
    if margin <= TOL.geom * scale_ref:
        raise AnchorInsideHull(f"anchor {tuple(q)} is not strictly outside the convex hull")
    rel = hull.vertices - qa
    depth = -(rel @ u)                       # >= margin > 0
    lateral = rel @ np.array([-u[1], u[0]])
    R = float(np.max((depth ** 2 + lateral ** 2) / depth))
    centre = qa - R * u
    # Rotate so the direction centre -> q becomes +x, scale by 1/R, then shift.
    rotation = -math.atan2(u[1], u[0])
    scale = 1.0 / R
    c, s = math.cos(rotation), math.sin(rotation)
    rc = np.array([c * centre[0] - s * centre[1], s * centre[0] + c * centre[1]])
    sim = Similarity(scale, rotation, Point(-scale * rc[0], -scale * rc[1]))
    return instance.map(sim.apply_body), sim


def as_points(seq: Sequence) -> list[Point]:
    return [Point.of(p) for p in seq]
