"""Random T(3) instances.

Bodies are thin rectangles around segments of lines.  Every pair of segments
crosses inside both rectangles, so the family is pairwise intersecting, and a
pairwise-intersecting family of convex sets has the T(3) property: for any
three sets pick a point of ``A & B`` and join it to a point of ``C``.
"""

from __future__ import annotations

import math

import numpy as np

from .geom import ConvexBody, Family, Instance, convex_hull
from .transversal import has_T3

BOX = 1.0


def _rectangle(p: np.ndarray, q: np.ndarray, half_width: float) -> ConvexBody:
    d = q - p
    n = np.array([-d[1], d[0]]) / np.hypot(*d) * half_width
    return convex_hull([p + n, q + n, q - n, p - n])


def _crossing_lines(n: int, rng: np.random.Generator, max_tries: int = 10_000):
    """n lines with distinct directions whose pairwise crossings lie well inside
    the box.  Lines pass near the origin, closer as n grows."""
    r = 0.5 / max(n, 1)
    pts: list[np.ndarray] = []
    dirs: list[np.ndarray] = []
    tries = 0
    while len(pts) < n:
        tries += 1
        if tries > max_tries:
            raise RuntimeError("could not place crossing lines")
        theta = rng.uniform(0, math.pi)
        d = np.array([math.cos(theta), math.sin(theta)])
        rho = r * math.sqrt(rng.uniform())
        phi = rng.uniform(0, 2 * math.pi)
        p = np.array([rho * math.cos(phi), rho * math.sin(phi)])
        ok = True
        for p2, d2 in zip(pts, dirs):
            cross = d[0] * d2[1] - d[1] * d2[0]
            if abs(cross) < 1e-3:
                ok = False
                break
            w = p2 - p
            t = (w[0] * d2[1] - w[1] * d2[0]) / cross
            c = p + t * d
            if np.abs(c).max() > 0.8 * BOX:
                ok = False
                break
        if ok:
            pts.append(p)
            dirs.append(d)
    return pts, dirs


def _pairwise_family(n: int, rng: np.random.Generator, name: str) -> Family:
    pts, dirs = _crossing_lines(n, rng)
    bodies = []
    for i, (p, d) in enumerate(zip(pts, dirs)):
        ts = []
        for j, (p2, d2) in enumerate(zip(pts, dirs)):
            if i == j:
                continue
            cross = d[0] * d2[1] - d[1] * d2[0]
            w = p2 - p
            ts.append((w[0] * d2[1] - w[1] * d2[0]) / cross)
        lo = min(ts, default=0.0) - rng.uniform(0.02, 0.5)
        hi = max(ts, default=0.0) + rng.uniform(0.02, 0.5)
        # Clip to the box along the line.
        for k in range(2):
            if abs(d[k]) > 1e-12:
                a, b = sorted(((-BOX - p[k]) / d[k], (BOX - p[k]) / d[k]))
                lo, hi = max(lo, a), min(hi, b)
        half_width = rng.uniform(0.002, 0.015)
        bodies.append(_rectangle(p + lo * d, p + hi * d, half_width))
    return Family(tuple(bodies), name)


def gen_pairwise_intersecting(n: int, seed: int, name: str = "F1") -> Family:
    """n pairwise-intersecting thin rectangles; T(3) is asserted."""
    if n < 1:
        raise ValueError("need at least one body")
    rng = np.random.default_rng(seed)
    fam = _pairwise_family(n, rng, name)
    assert has_T3(Instance((fam,))) is True, "generated family violates T(3)"
    return fam


def gen_colorful(seed: int) -> Instance:
    """Five families of 3 to 6 bodies, pairwise intersecting across the union."""
    rng = np.random.default_rng(seed)
    sizes = rng.integers(3, 7, size=5)
    union = _pairwise_family(int(sizes.sum()), rng, "all")
    order = rng.permutation(len(union))
    fams, at = [], 0
    for j, s in enumerate(sizes):
        fams.append(Family(tuple(union.bodies[i] for i in order[at:at + s]), f"F{j + 1}"))
        at += s
    inst = Instance(tuple(fams))
    assert has_T3(inst) is True, "generated instance violates colourful T(3)"
    return inst
