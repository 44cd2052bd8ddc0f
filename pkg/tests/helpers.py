"""Shared generators for the test suite."""

import math

import numpy as np

from linepierce.construction import SimplexPoint, line_triple, regions
from linepierce.geom import convex_hull, thicken


def random_simplex(rng, eps, lo=None):
    """Uniform point of the simplex {x_i >= floor, sum = 1}."""
    floor = eps if lo is None else max(eps, lo)
    y = rng.dirichlet(np.ones(5))
    x = floor + (1 - 5 * floor) * y
    x[-1] = 1.0 - x[:-1].sum()
    return SimplexPoint(tuple(x), eps)


def point_in_region(rng, t, region, inset=0.05):
    """Random point inside the wedge of ``region`` (hull of M and its arc)."""
    lo, hi = region.arc
    w = rng.dirichlet(np.ones(3))
    angs = rng.uniform(lo, hi, 2)
    pts = np.array([[t.M.x, t.M.y], *[[math.cos(a), math.sin(a)] for a in angs]])
    p = w @ pts
    # pull slightly towards the region's interior centroid to keep clear of the lines
    mid = 0.5 * (lo + hi)
    c = (np.array([t.M.x, t.M.y]) + 2 * np.array([math.cos(mid), math.sin(mid)])) / 3
    return (1 - inset) * p + inset * c


def body_in_region(rng, t, region, size=1e-3):
    """Small random polygon strictly inside the region, or None after retries."""
    from linepierce.construction import classify
    regs = regions(t)
    for _ in range(50):
        p = point_in_region(rng, t, region)
        b = convex_hull(p + rng.uniform(-size, size, (4, 2)))
        if np.hypot(*b.vertices.T).max() < 1 and classify(b, t, regs) is region.label:
            return b
        size *= 0.5
    return None


def fat_body(rng, centre, delta):
    """A body containing a disk of radius delta around ``centre``."""
    core = convex_hull(np.asarray(centre) + rng.uniform(-delta, delta, (3, 2)))
    return thicken(core, delta)


__all__ = ["random_simplex", "point_in_region", "body_in_region", "fat_body", "line_triple"]
