"""Concurrent line transversals for families of planar convex bodies with T(3)."""

from .geom import ConvexBody, Family, Instance, Line, Point, convex_hull
from .solver import SolveParams, solve_anchored, solve_colorful, solve_single

__version__ = "0.1.0"

__all__ = ["ConvexBody", "Family", "Instance", "Line", "Point", "convex_hull",
           "SolveParams", "solve_anchored", "solve_colorful", "solve_single"]
