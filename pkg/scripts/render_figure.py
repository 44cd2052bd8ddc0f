"""Draw the five circle points, the three lines and the six wedges for a simplex point.

    python scripts/render_figure.py --out figure.svg
    python scripts/render_figure.py --x 0.3 0.1 0.2 0.25 0.15 --instance corpus/pairwise_n7.json
"""

from __future__ import annotations

import argparse
import math
import sys

from linepierce import instance_io
from linepierce.construction import SimplexPoint
from linepierce.geom import normalize_instance
from linepierce.render import RenderSpec, render


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--x", type=float, nargs=5, help="simplex point (default: barycentre)")
    ap.add_argument("--delta", type=float, default=0.05, help="fatness radius; eps = delta / 4pi")
    ap.add_argument("--instance", help="optional instance file, drawn after normalization")
    ap.add_argument("--size", type=int, default=600)
    ap.add_argument("--out", default="figure.svg")
    args = ap.parse_args(argv)

    eps = args.delta / (4 * math.pi)
    x = SimplexPoint(tuple(args.x), eps) if args.x else SimplexPoint.barycenter(eps)
    inst = None
    if args.instance:
        inst, _ = normalize_instance(instance_io.load(args.instance).instance)
    render(inst, x, args.out, RenderSpec(size=args.size))
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
