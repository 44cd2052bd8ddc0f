"""Rebuild the regression corpus in corpus/.

Every file records the properties the test suite re-checks: the T(3) verdict
and the exact line-piercing number up to 3 ("more" beyond).  The asterisk
families (several segments crossing at each of m points on a circle) sit on
either side of the boundary between T(3) and three-line piercing.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from linepierce import instance_io
from linepierce.generate import gen_colorful, gen_pairwise_intersecting
from linepierce.geom import Family, Instance, Point, convex_hull
from linepierce.transversal import has_T3, min_line_piercing


def asterisks(m: int, q: int, r: float, twist: float) -> Family:
    bodies = []
    for i in range(m):
        p = np.array([math.cos(2 * math.pi * i / m), math.sin(2 * math.pi * i / m)])
        for j in range(q):
            a = math.pi * j / q + twist * i
            d = r * np.array([math.cos(a), math.sin(a)])
            bodies.append(convex_hull([tuple(p - d), tuple(p + d)]))
    return Family(tuple(bodies), f"asterisks_{m}x{q}")


def expected(inst: Instance) -> dict:
    t3 = has_T3(inst) is True
    ks = []
    for fam in inst.families:
        k = min_line_piercing(fam, k_max=3).k
        ks.append("more" if k is None else k)
    return {"t3": t3, "piercing_numbers": ks}


def cases():
    for n in (5, 10, 15):
        yield f"pairwise_n{n}", Instance((gen_pairwise_intersecting(n, 40 + n),)), None
    yield "colorful_seed0", gen_colorful(0), None
    yield "colorful_seed7", gen_colorful(7), None
    fam = gen_pairwise_intersecting(6, 77)
    v = Instance((fam,)).all_vertices()
    q = Point(float(v[:, 0].max() + 2.0), float(v[:, 1].mean()))
    yield "anchored_n6", Instance((fam,)), q
    # three points in general position: the smallest T(3) failure
    yield "triangle_points", Instance((Family(tuple(
        convex_hull([p]) for p in [(0, 0), (1, 0), (0, 1)])),)), None
    # segments through a common point plus a point body on one of them
    segs = [convex_hull([(-math.cos(a), -math.sin(a)), (math.cos(a), math.sin(a))])
            for a in (0.1, 0.9, 1.7, 2.5)]
    segs.append(convex_hull([(0.5 * math.cos(0.1), 0.5 * math.sin(0.1))]))
    yield "degenerate_bodies", Instance((Family(tuple(segs)),)), None
    yield "asterisks_t3_two_lines", Instance((asterisks(5, 3, 1.5, 0.3),)), None
    yield "asterisks_three_lines_not_t3", Instance((asterisks(7, 2, 0.6, 0.3),)), None
    yield "asterisks_many_lines_not_t3", Instance((asterisks(7, 2, 0.3, 0.3),)), None


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="corpus")
    args = ap.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, inst, anchor in cases():
        exp = expected(inst)
        instance_io.save(out / f"{name}.json", inst, anchor=anchor, expected=exp)
        print(f"{name}: {exp}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
