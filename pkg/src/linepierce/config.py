"""Numerical tolerances shared by every module."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    sign: float = 1e-12        # side tests: |signed distance| below this counts as "on the line"
    geom: float = 1e-9         # geometric equalities (round trips, concurrency residuals)
    dedup: float = 1e-10       # bucketing of candidate lines
    unit: float = 1e-12        # unit-length check on line directions
    thicken_samples: int = 16  # arc samples per corner in Minkowski thickening


TOL = Tolerances()
