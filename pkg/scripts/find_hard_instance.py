"""Randomized search for a T(3) family that no two lines pierce.

Bodies are convex hulls of ``--vertices`` points each.  Simulated annealing
minimises

    10 * sum over triples of (distance of the best candidate line to the
                              farthest body of the triple)
       + max(0, tau - margin)

where ``margin`` is the smallest, over pairs of candidate lines, of the
largest distance from a body to the nearer of the two lines.  Zero means every
triple has a transversal while every pair of candidate lines misses some body
by at least ``tau``.  Candidates are certified with the exact oracles before
being written.

Exit status 0 and an instance file on success, 1 otherwise.
"""

from __future__ import annotations

import argparse
import itertools
import math
import sys
import time

import numpy as np

from linepierce import instance_io
from linepierce.geom import Family, Instance, convex_hull
from linepierce.transversal import has_T3, min_line_piercing


def distance_matrix(S: np.ndarray) -> np.ndarray:
    """(candidate lines, bodies) distances; 0 when the line meets the body."""
    n, kv, _ = S.shape
    V = S.reshape(-1, 2)
    i, j = np.triu_indices(len(V), 1)
    d = V[j] - V[i]
    L = np.hypot(d[:, 0], d[:, 1])
    keep = L > 1e-9
    i, d, L = i[keep], d[keep], L[keep]
    nrm = np.stack([-d[:, 1], d[:, 0]], 1) / L[:, None]
    s = (nrm @ V.T - (nrm * V[i]).sum(1)[:, None]).reshape(len(nrm), n, kv)
    lo, hi = s.min(2), s.max(2)
    return np.where((lo <= 0) & (hi >= 0), 0.0, np.minimum(np.abs(lo), np.abs(hi)))


def objective(S, triples, tau):
    D = distance_matrix(S)
    gaps = D[:, triples].max(axis=2).min(axis=0)
    margin = np.inf
    for a in range(0, len(D), 64):
        blk = np.minimum(D[a:a + 64, None, :], D[None, :, :]).max(axis=2)
        margin = min(margin, float(blk.min()))
    return 10 * gaps.sum() + max(0.0, tau - margin), int((gaps > 0).sum()), margin


def anneal(rng, n, kv, tau, steps, deadline):
    triples = np.array(list(itertools.combinations(range(n), 3)))
    S = rng.uniform(-1, 1, (n, kv, 2)) * rng.uniform(0.2, 1.2) + rng.uniform(-1, 1, (n, 1, 2))
    f, bad, margin = objective(S, triples, tau)
    for it in range(steps):
        if f == 0 or time.monotonic() > deadline:
            break
        T = 0.05 * (1 - it / steps) + 1e-4
        S2 = S.copy()
        i = rng.integers(n)
        sc = rng.choice([0.003, 0.02, 0.1])
        if rng.uniform() < 0.6:
            S2[i, rng.integers(kv)] += rng.normal(0, sc, 2)
        else:
            S2[i] += rng.normal(0, sc, 2)
        f2, bad2, m2 = objective(S2, triples, tau)
        if f2 <= f or rng.uniform() < math.exp((f - f2) / T):
            S, f, bad, margin = S2, f2, bad2, m2
    return S, f, bad, margin


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=8, help="number of bodies")
    ap.add_argument("--vertices", type=int, default=2, help="vertices per body")
    ap.add_argument("--tau", type=float, default=0.02)
    ap.add_argument("--steps", type=int, default=20_000, help="annealing steps per restart")
    ap.add_argument("--seconds", type=float, default=600)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="hard_instance.json")
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    deadline = time.monotonic() + args.seconds
    best = (math.inf, None)
    restarts = 0
    while time.monotonic() < deadline:
        restarts += 1
        S, f, bad, margin = anneal(rng, args.n, args.vertices, args.tau, args.steps, deadline)
        if f < best[0]:
            best = (f, (bad, margin))
            print(f"restart {restarts}: objective {f:.4g}, triples without transversal {bad}, "
                  f"two-line margin {margin:.3g}", flush=True)
        if f > 0:
            continue
        fam = Family(tuple(convex_hull([tuple(p) for p in body]) for body in S), "hard")
        inst = Instance((fam,))
        pn = min_line_piercing(fam, k_max=3)
        if has_T3(inst) is True and (pn.k is None or pn.k >= 3):
            instance_io.save(args.out, inst, expected={"t3": True, "piercing_number": pn.k})
            print(f"found after {restarts} restarts: piercing number {pn}; written to {args.out}")
            return 0
    print(f"no certified instance in {args.seconds:g} s ({restarts} restarts, "
          f"best objective {best[0]:.4g})", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
