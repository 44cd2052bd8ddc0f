"""Desk-scale experiments: solver cost against family size, colourful solves,
anchored solves and KKM search times.  Prints a summary table and writes the
raw numbers as JSON.

    python scripts/run_experiments.py --out results/experiments.json
"""

from __future__ import annotations

import argparse
import json
import math
import statistics
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from linepierce.generate import gen_colorful, gen_pairwise_intersecting
from linepierce.geom import Instance, Point
from linepierce.kkm import colorful_rainbow_search, halfspace_cover, kkm_intersection_search
from linepierce.solver import SolveParams, solve_anchored, solve_colorful, solve_single
from linepierce.transversal import min_line_piercing, pierced_by


@dataclass
class ExperimentConfig:
    sizes: tuple[int, ...] = (5, 8, 11, 15, 20, 30)
    seeds_per_size: int = 5
    colorful_seeds: int = 10
    anchored_seeds: int = 10
    kkm_dims: tuple[int, ...] = (3, 4, 5, 6)
    kkm_resolutions: tuple[int, ...] = (8, 12, 16)
    solve: SolveParams = field(default_factory=SolveParams)


def timed(fn, *a):
    t0 = time.perf_counter()
    out = fn(*a)
    return out, time.perf_counter() - t0


def scaling(cfg: ExperimentConfig) -> list[dict]:
    rows = []
    for n in cfg.sizes:
        for s in range(cfg.seeds_per_size):
            fam = gen_pairwise_intersecting(n, 10_000 * n + s)
            res, secs = timed(solve_single, fam, cfg.solve)
            rows.append({"n": n, "seed": s, "seconds": secs, "evaluations": res.evaluations,
                         "levels": len(res.trace), "verified": pierced_by(res.lines, fam)[0],
                         "piercing_number": min_line_piercing(fam, 3).k if n <= 15 else None})
    return rows


def colorful(cfg: ExperimentConfig) -> list[dict]:
    rows = []
    for s in range(cfg.colorful_seeds):
        inst = gen_colorful(s)
        res, secs = timed(solve_colorful, inst, cfg.solve)
        fam = inst.families[res.family - 1]
        rows.append({"seed": s, "family": res.family, "sizes": [len(f) for f in inst.families],
                     "seconds": secs, "verified": pierced_by(res.lines, fam)[0]})
    return rows


def anchored(cfg: ExperimentConfig) -> list[dict]:
    rows = []
    for s in range(cfg.anchored_seeds):
        rng = np.random.default_rng(s)
        fam = gen_pairwise_intersecting(8, 500 + s)
        v = Instance((fam,)).all_vertices()
        ang = rng.uniform(0, 2 * math.pi)
        dist = rng.uniform(1.5, 10)
        q = Point(*(v.mean(axis=0) + dist * np.array([math.cos(ang), math.sin(ang)])))
        res, secs = timed(solve_anchored, Instance((fam,)), q, cfg.solve)
        rows.append({"seed": s, "anchor_distance": dist, "seconds": secs,
                     "anchor_residual": abs(res.lines[1].signed_distance(q)),
                     "verified": pierced_by(res.lines, fam)[0]})
    return rows


def kkm(cfg: ExperimentConfig) -> list[dict]:
    rows = []
    for n in cfg.kkm_dims:
        for k in cfg.kkm_resolutions:
            cover = halfspace_cover(n)
            p, secs = timed(kkm_intersection_search, cover, n, k)
            r, rsecs = timed(colorful_rainbow_search, [cover] * n, n, k)
            rows.append({"n": n, "k": k, "seconds": secs, "rainbow_seconds": rsecs,
                         "point": p.point.tolist(), "permutation": list(r.permutation)})
    return rows


def summarize(results: dict) -> str:
    out = ["solver scaling (single pairwise families)",
           f"{'n':>4} {'median s':>10} {'max s':>8} {'median evals':>13} {'verified':>9}"]
    by_n: dict[int, list[dict]] = {}
    for r in results["scaling"]:
        by_n.setdefault(r["n"], []).append(r)
    for n, rows in by_n.items():
        out.append(f"{n:>4} {statistics.median(r['seconds'] for r in rows):>10.3f} "
                   f"{max(r['seconds'] for r in rows):>8.3f} "
                   f"{statistics.median(r['evaluations'] for r in rows):>13.0f} "
                   f"{sum(r['verified'] for r in rows):>5}/{len(rows)}")
    c = results["colorful"]
    out.append(f"colourful: {sum(r['verified'] for r in c)}/{len(c)} verified, "
               f"max {max(r['seconds'] for r in c):.2f} s")
    a = results["anchored"]
    out.append(f"anchored: {sum(r['verified'] for r in a)}/{len(a)} verified, "
               f"max anchor residual {max(r['anchor_residual'] for r in a):.1e}")
    out.append("KKM search (halfspace cover), seconds: intersection / rainbow")
    for r in results["kkm"]:
        out.append(f"  n={r['n']} k={r['k']:>2}: {r['seconds']:.3f} / {r['rainbow_seconds']:.3f}")
    return "\n".join(out)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/experiments.json")
    ap.add_argument("--quick", action="store_true", help="smaller sweep")
    args = ap.parse_args(argv)
    cfg = ExperimentConfig()
    if args.quick:
        cfg = ExperimentConfig(sizes=(5, 10), seeds_per_size=2, colorful_seeds=3,
                               anchored_seeds=3, kkm_dims=(3, 4), kkm_resolutions=(8,))
    results = {"scaling": scaling(cfg), "colorful": colorful(cfg),
               "anchored": anchored(cfg), "kkm": kkm(cfg)}
    cfg_dict = asdict(cfg)
    results["config"] = cfg_dict
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(results, indent=1, default=str))
    print(summarize(results))
    print(f"raw results in {out}")
    ok = all(r["verified"] for key in ("scaling", "colorful", "anchored") for r in results[key])
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
