"""Command line entry point.

Exit codes: 0 success, 1 a check or verification failed, 2 bad input or
usage, 3 search budget exhausted, 4 anchor not outside the hull, 5 instance
too large for the exact oracles.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import instance_io
from .geom import AnchorInsideHull, GeometryError, Instance, Point
from .kkm import NotFound, colorful_rainbow_search, halfspace_cover, kkm_intersection_search, shifted_cover
from .render import render
from .solver import BudgetExhausted, SolveParams, T3Violated, VerificationError, solve_anchored, solve_colorful
from .transversal import TooLarge, has_T3, min_line_piercing, pierced_by

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET, EXIT_ANCHOR, EXIT_TOO_LARGE = range(6)
CONCURRENCY_TOL = 1e-9      # normalized units


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _parse_point(s: str) -> Point:
    try:
        x, y = (float(v) for v in s.split(","))
        return Point(x, y)
    except (ValueError, GeometryError):
        raise argparse.ArgumentTypeError(f"expected QX,QY, got {s!r}") from None


def _fmt_line(ln) -> str:
    a, (dx, dy) = ln.anchor, ln.direction
    return f"through ({a.x:.12g}, {a.y:.12g}) direction ({dx:.12g}, {dy:.12g})"


# ------------------------------------------------------------------- commands

def cmd_gen(args) -> int:
    from .generate import gen_colorful, gen_pairwise_intersecting
    if args.kind == "pairwise":
        if args.n is None or args.n < 1:
            _err("gen --kind pairwise needs --n N with N >= 1")
            return EXIT_USAGE
        inst = Instance((gen_pairwise_intersecting(args.n, args.seed),))
    else:
        inst = gen_colorful(args.seed)
    instance_io.save(args.out, inst, extra={"generator": {"kind": args.kind, "n": args.n,
                                                          "seed": args.seed}})
    return EXIT_OK


def cmd_check_t3(args) -> int:
    inst = instance_io.load(args.file).instance
    res = has_T3(inst)
    if res is True:
        print("T(3): yes")
        return EXIT_OK
    print("T(3): no")
    for fam, body in res.members:
        _err(f"counterexample member: family {fam + 1} body {body}")
    return EXIT_FAIL


def cmd_solve(args) -> int:
    f = instance_io.load(args.file)
    anchor = args.anchor if args.anchor is not None else f.anchor
    kw = {}
    if args.delta0 is not None:
        kw["delta0"] = args.delta0
    if args.delta_min is not None:
        kw["delta_min"] = args.delta_min
    if args.budget is not None:
        kw["budget"] = args.budget
    try:
        params = SolveParams(**kw)
    except ValueError as e:
        _err(f"bad solver parameters: {e}")
        return EXIT_USAGE
    try:
        if anchor is not None:
            res = solve_anchored(f.instance, anchor, params)
        else:
            res = solve_colorful(f.instance, params)
    except BudgetExhausted as e:
        _err(f"budget exhausted: {e}")
        return EXIT_BUDGET
    except T3Violated as e:
        _err(f"instance violates T(3): {e}")
        return EXIT_FAIL
    except VerificationError as e:
        _err(f"verification failed: {e}")
        return EXIT_FAIL

    if args.render:
        norm = f.instance.map(res.similarity.apply_body)
        render(norm, res.x, args.render)
    if args.json:
        print(json.dumps(instance_io.result_to_dict(res), indent=1))
    else:
        print(f"family: {res.family}")
        for i, ln in enumerate(res.lines, 1):
            print(f"line {i}: {_fmt_line(ln)}")
        print(f"M: ({res.M.x:.12g}, {res.M.y:.12g})")
        print(f"residual: {res.residual:.3g}")
        print(f"concurrency residual (normalized): {res.concurrency_residual:.3g}")
        print(f"x: {', '.join(f'{v:.9f}' for v in res.x.coords)}")
        print(f"evaluations: {res.evaluations}  seconds: {res.seconds:.3f}")
    return EXIT_OK


def cmd_bruteforce(args) -> int:
    inst = instance_io.load(args.file).instance
    for j, fam in enumerate(inst.families, 1):
        pn = min_line_piercing(fam, k_max=args.kmax)
        print(f"family {j} ({fam.name}): {pn}")
    return EXIT_OK


def cmd_kkm_demo(args) -> int:
    n, k = args.n, args.k
    cover = halfspace_cover(n) if args.cover == "halfspace" else shifted_cover(n)
    t0 = time.perf_counter()
    try:
        p = kkm_intersection_search(cover, n, k)
        print(f"intersection point: {np.array2string(p.point, precision=6)} "
              f"colours {sorted(p.colors)} round {p.round}")
        covers = [cover if args.cover == "halfspace" else shifted_cover(n, shift=s)
                  for s in range(n)]
        r = colorful_rainbow_search(covers, n, k)
        print(f"rainbow point: {np.array2string(r.point, precision=6)} "
              f"permutation {list(r.permutation)}")
    except NotFound as e:
        _err(f"not found: {e}")
        return EXIT_FAIL
    print(f"seconds: {time.perf_counter() - t0:.3f}")
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = instance_io.load(args.file).instance
    stored = instance_io.load_result(args.result)
    if not 1 <= stored.family <= len(inst.families):
        _err(f"result names family {stored.family}, instance has {len(inst.families)}")
        return EXIT_FAIL
    ok, missing = pierced_by(stored.lines, inst.families[stored.family - 1])
    if not ok:
        _err(f"bodies {missing} of family {stored.family} are not pierced")
        return EXIT_FAIL
    tol = CONCURRENCY_TOL / stored.normalization_scale
    conc = max(abs(ln.signed_distance(stored.M)) for ln in stored.lines)
    if conc > tol:
        _err(f"lines are not concurrent: residual {conc:.3g} > {tol:.3g}")
        return EXIT_FAIL
    if stored.anchor is not None:
        d = abs(stored.lines[1].signed_distance(stored.anchor))
        if d > tol:
            _err(f"second line misses the anchor by {d:.3g}")
            return EXIT_FAIL
    print(f"verified: family {stored.family} pierced by 3 lines through M")
    return EXIT_OK


# --------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="linepierce", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a random T(3) instance")
    g.add_argument("--kind", choices=("pairwise", "colorful"), required=True)
    g.add_argument("--n", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("check-t3", help="exact T(3) test")
    c.add_argument("file")
    c.set_defaults(func=cmd_check_t3)

    s = sub.add_parser("solve", help="three concurrent lines piercing one family")
    s.add_argument("file")
    s.add_argument("--anchor", type=_parse_point, metavar="QX,QY")
    s.add_argument("--delta0", type=float)
    s.add_argument("--delta-min", type=float)
    s.add_argument("--budget", type=int)
    s.add_argument("--json", action="store_true")
    s.add_argument("--render", metavar="OUT.svg")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("pierce-bruteforce", help="exact line-piercing number up to K")
    b.add_argument("file")
    b.add_argument("--kmax", type=int, required=True, choices=(1, 2, 3))
    b.set_defaults(func=cmd_bruteforce)

    k = sub.add_parser("kkm-demo", help="KKM and rainbow search on a test cover")
    k.add_argument("--n", type=int, required=True)
    k.add_argument("--k", type=int, required=True)
    k.add_argument("--cover", choices=("halfspace", "shifted"), default="halfspace")
    k.set_defaults(func=cmd_kkm_demo)

    v = sub.add_parser("verify", help="re-check a stored solve result")
    v.add_argument("file")
    v.add_argument("result")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args)
    except instance_io.InstanceFormatError as e:
        _err(f"parse error: {e}")
        return EXIT_USAGE
    except AnchorInsideHull as e:
        _err(f"anchor error: {e}")
        return EXIT_ANCHOR
    except TooLarge as e:
        _err(f"too large: {e}")
        return EXIT_TOO_LARGE
    except (GeometryError, ValueError) as e:
        _err(f"invalid input: {e}")
        return EXIT_USAGE
    except OSError as e:
        _err(f"I/O error: {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
