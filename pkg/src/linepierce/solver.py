"""Search the shrunken simplex for three concurrent lines piercing a family.

A simplex point ``x`` is uncoloured for a family exactly when its three lines
meet every body.  That set can be thin, so the search works with thickened
bodies first: for a fatness radius ``delta`` it looks for ``x`` whose lines
pass within ``delta`` of every body, warm-starts the next, smaller ``delta``
from the previous answer and stops once the lines meet the original bodies.
The intersection point of the lines always lies in the unit disk, so the
sequence of answers stays in a compact set.

Scores are signed: for a body and a line the gap is the distance when the line
misses, and minus the penetration depth when it crosses.  A family's score is
the largest over bodies of the smallest gap over the three lines, so
``score <= 0`` means pierced and ``score <= delta`` means the thickened family
is pierced.
"""

from __future__ import annotations

import itertools
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .config import TOL
from .construction import (ALTERNATING_TRIPLES, LineTriple, SimplexPoint,
                           batch_triples, color_witnesses, line_triple)
from .geom import (Family, Instance, Line, Point, Similarity, anchored_normalize,
                   distance_body_to_line, normalize_instance)
from .kkm import CoverOracle, triangulate
from .transversal import has_T3, pierced_by, transversal_exists

log = logging.getLogger(__name__)

EXACT_MARGIN = 1e-9      # target penetration depth before the search stops refining
# Below this the chords l1, l2 meet within rounding of the circle (or coincide)
# for near-vertex simplex points, so M is no longer reliably inside the disk.
DELTA_FLOOR = 1e-7


class SolveError(RuntimeError):
    pass


class T3Violated(SolveError):
    def __init__(self, triple):
        super().__init__(f"T(3) fails for bodies {triple.members}")
        self.triple = triple


class BudgetExhausted(SolveError):
    def __init__(self, message: str, best: PiercingResult | None = None, curve=()):
        super().__init__(message)
        self.best = best
        self.curve = list(curve)   # (delta, best score) per visited level


class VerificationError(SolveError):
    pass


@dataclass(frozen=True)
class SolveParams:
    delta0: float = 0.05
    delta_min: float = 1e-6
    shrink: float = 0.5
    k0: int = 12
    refine_rounds: int = 8
    budget: int = 5_000_000
    min_levels: int = 3          # keep the delta schedule going at least this long
    starts: int = 8              # grid minima refined per level
    skip_t3: bool = False
    debug: bool = False

    def __post_init__(self):
        if not self.delta0 > self.delta_min > 0:
            raise ValueError("need delta0 > delta_min > 0")
        if self.delta_min < DELTA_FLOOR:
            raise ValueError(f"delta_min below {DELTA_FLOOR:g} is not representable in double precision")
        if 5 * self.delta0 / (4 * math.pi) >= 1:
            raise ValueError("delta0 too large: the shrunken simplex is empty")
        if not 0 < self.shrink < 1:
            raise ValueError("shrink factor must lie in (0, 1)")
        if self.k0 < 1 or self.refine_rounds < 0 or self.budget < 1 or self.min_levels < 1:
            raise ValueError("invalid search parameters")

    def schedule(self):
        d = self.delta0
        while d >= self.delta_min:
            yield d
            d *= self.shrink


@dataclass(frozen=True)
class TraceEntry:
    delta: float
    eps: float
    score: float                    # best signed score at this level (normalized units)
    x: tuple[float, ...]
    M: tuple[float, float]          # normalized coordinates
    P: tuple[tuple[float, float], ...]
    family: int | None              # 1-based family pierced at this level, if any
    evaluations: int


@dataclass
class PiercingResult:
    family: int                              # 1-based index into instance.families
    lines: tuple[Line, Line, Line]           # original coordinates
    M: Point
    residual: float                          # max over bodies of distance to nearest line
    x: SimplexPoint
    trace: list[TraceEntry]
    normalized: LineTriple
    similarity: Similarity
    exact: bool = True
    concurrency_residual: float = 0.0        # normalized coordinates
    anchor: Point | None = None
    evaluations: int = 0
    seconds: float = 0.0
    defining_points: tuple[tuple[Point, Point], ...] = field(default=(), repr=False)


# --------------------------------------------------------------------- scoring

class _Scene:
    """Vertices of the distinct families of a normalized instance, flattened."""

    def __init__(self, inst: Instance):
        self.instance = inst
        slots = inst.colorful_index()
        self.families = sorted(set(slots))             # original indices actually in play
        verts, starts, fam_starts = [], [], []
        nb = 0
        nv = 0
        for f in self.families:
            fam_starts.append(nb)
            for b in inst.families[f].bodies:
                starts.append(nv)
                verts.append(b.vertices)
                nv += len(b.vertices)
                nb += 1
        self.V = np.concatenate(verts)
        self.body_starts = np.array(starts)
        self.fam_starts = np.array(fam_starts)
        self.n_bodies = nb

    def gaps(self, X: np.ndarray) -> np.ndarray:
        """(N, 3, B) signed gaps of every body to every line."""
        _, normals, offsets, _ = batch_triples(X)
        S = np.einsum("nlk,vk->nlv", normals, self.V) - offsets[:, :, None]
        smax = np.maximum.reduceat(S, self.body_starts, axis=2)
        smin = np.minimum.reduceat(S, self.body_starts, axis=2)
        return np.maximum(smin, -smax)

    def family_scores(self, X: np.ndarray, chunk: int = 2048) -> np.ndarray:
        """(N, F) family scores, F = number of distinct families."""
        X = np.atleast_2d(X)
        out = np.empty((len(X), len(self.families)))
        for s in range(0, len(X), chunk):
            g = self.gaps(X[s:s + chunk]).min(axis=1)              # (n, B)
            out[s:s + chunk] = np.maximum.reduceat(g, self.fam_starts, axis=1)
        return out


def _project(Y: np.ndarray, eps: float) -> np.ndarray:
    """Euclidean projection of rows onto {x_i >= eps, sum x = 1}."""
    z = 1.0 - 5 * eps
    U = Y - eps
    srt = -np.sort(-U, axis=1)
    css = np.cumsum(srt, axis=1) - z
    idx = np.arange(1, 6)
    cond = srt - css / idx > 0
    rho = 4 - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(len(U)), rho] / (rho + 1)
    X = np.maximum(U - theta[:, None], 0.0) + eps
    # Restore the exact sum lost to rounding on the largest coordinate.
    j = X.argmax(axis=1)
    X[np.arange(len(X)), j] += 1.0 - X.sum(axis=1)
    return X


def _patch() -> np.ndarray:
    """Offsets of a symmetric local grid: both orientations of a resolution-4
    simplex centred at the origin, unit edge scale."""
    W = triangulate(5, 4).points - 0.2
    return np.unique(np.round(np.concatenate([W, -W]), 12), axis=0)


_PATCH = _patch()
_RANDOM_DIRS = 48


def _random_directions(rng: np.random.Generator, n: int) -> np.ndarray:
    """Unit vectors in the hyperplane sum = 0."""
    D = rng.standard_normal((n, 5))
    D -= D.mean(axis=1, keepdims=True)
    return D / np.linalg.norm(D, axis=1, keepdims=True)


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def charge(self, n: int) -> None:
        self.used += n
        if self.used > self.limit:
            raise _OutOfBudget()


class _OutOfBudget(Exception):
    pass


@dataclass
class _Search:
    scene: _Scene
    params: SolveParams
    budget: _Budget
    eps: float = 0.0
    rng: np.random.Generator = field(default_factory=lambda: np.random.default_rng(0))

    def objective(self, X: np.ndarray) -> np.ndarray:
        self.budget.charge(len(X) * len(self.scene.families))
        return self.scene.family_scores(X).min(axis=1)

    def grid_starts(self, eps: float, failures: int = 0) -> tuple[np.ndarray, np.ndarray]:
        # each level that ends without a hit searches a finer grid from more starts
        k = min(self.params.k0 + 4 * failures, 2 * self.params.k0 + 8)
        starts = self.params.starts * 2 ** min(failures, 3)
        T = triangulate(5, k)
        X = eps + (1 - 5 * eps) * T.points
        f = self.objective(X)
        order = np.argsort(f, kind="stable")
        return X[order[:starts]], f[order[:starts]]

    def refine(self, x: np.ndarray, fx: float, h: float, h_min: float,
               target: float) -> tuple[np.ndarray, float]:
        """Pattern search on the simplex: move to the best patch point when it
        improves, otherwise halve the patch."""
        eps = self.eps
        moves = 0
        while fx > target and h >= h_min and moves < 400:
            P = _project(x + h * _PATCH, eps)
            F = self.objective(P)
            i = int(np.argmin(F))
            if F[i] >= fx:
                # The objective is a max of mins, so the fixed patch can stall
                # on a kink; random tangent directions usually slip past it.
                P = _project(x + h * _random_directions(self.rng, _RANDOM_DIRS), eps)
                F = self.objective(P)
                i = int(np.argmin(F))
            if F[i] < fx:
                x, fx = P[i], float(F[i])
                moves += 1
            else:
                h *= 0.5
        return x, fx


def _trace_entry(x: np.ndarray, delta: float, eps: float, score: float, fam: int | None,
                 evals: int) -> TraceEntry:
    t = line_triple(SimplexPoint(tuple(x), eps))
    P = tuple((p.x, p.y) for p in t.direction_points())
    return TraceEntry(delta, eps, score, tuple(map(float, x)), (t.M.x, t.M.y), P, fam, evals)


def _debug_rainbow_check(inst: Instance, X: np.ndarray, eps: float) -> None:
    """At points where every slot family sees colours forming a rainbow, the
    alternating wedge triples taken from distinct families must not have a
    transversal; anything else means the region labels are wrong."""
    slots = inst.colorful_index()
    for x in X:
        sp = SimplexPoint(tuple(x), eps)
        wit = [color_witnesses(sp, inst.families[s]) for s in slots]
        colors = [{lab.color for lab in w} for w in wit]
        for perm in itertools.permutations(range(5)):
            if all(i + 1 in colors[perm[i]] for i in range(5)):
                break
        else:
            continue
        for triple in ALTERNATING_TRIPLES:
            members = []
            for lab in triple:
                slot = perm[lab.color - 1]
                if lab in wit[slot]:
                    members.append(inst.families[slots[slot]].bodies[wit[slot][lab]])
            if len(members) == 3 and transversal_exists(members)[0]:
                raise AssertionError(f"wedges {[l.value for l in triple]} admit a transversal at x={x}")


def _solve_normalized(norm: Instance, sim: Similarity, params: SolveParams,
                      anchor: Point | None, original: Instance) -> PiercingResult:
    t0 = time.perf_counter()
    scene = _Scene(norm)
    budget = _Budget(params.budget)
    search = _Search(scene, params, budget)
    trace: list[TraceEntry] = []
    curve: list[tuple[float, float]] = []
    x_best: np.ndarray | None = None
    f_best = math.inf
    exact = False
    level_eps = None

    try:
        for level, delta in enumerate(params.schedule()):
            eps = delta / (4 * math.pi)
            level_eps = eps
            search.eps = eps
            h_min = max(1e-13, delta * 1e-4)
            candidates: list[tuple[np.ndarray, float, float]] = []
            if x_best is not None:
                candidates.append((x_best, f_best, min(1.0 / params.k0, 4 * delta)))
            if x_best is None or (f_best > -EXACT_MARGIN and not exact):
                G, FG = search.grid_starts(eps, failures=level)
                if params.debug:
                    _debug_rainbow_check(norm, G, eps)
                candidates += [(g, float(fg), 1.0 / params.k0) for g, fg in zip(G, FG)]
            for x0, f0, h0 in candidates:
                x1, f1 = search.refine(x0, f0, h0, h_min, -EXACT_MARGIN)
                if f1 < f_best:
                    x_best, f_best = x1, f1
                if f_best <= -EXACT_MARGIN:
                    break
            curve.append((delta, f_best))
            fam = _pierced_family(scene, x_best, delta)
            trace.append(_trace_entry(x_best, delta, eps, f_best, fam, budget.used))
            log.debug("delta=%.3g score=%.3g family=%s evals=%d", delta, f_best, fam, budget.used)
            exact = f_best <= TOL.sign
            if exact and len(trace) >= params.min_levels:
                break
    except _OutOfBudget:
        pass

    if not exact:
        best = None
        if x_best is not None:
            best = _assemble(norm, sim, original, scene, x_best, level_eps, trace, anchor,
                             exact=False, evals=budget.used, t0=t0)
        raise BudgetExhausted(
            f"no exactly piercing configuration found (best score {f_best:.3g}, "
            f"{budget.used} evaluations)", best=best, curve=curve)
    return _assemble(norm, sim, original, scene, x_best, trace[-1].eps, trace, anchor,
                     exact=True, evals=budget.used, t0=t0)


def _pierced_family(scene: _Scene, x: np.ndarray, delta: float) -> int | None:
    s = scene.family_scores(x[None])[0]
    for f, v in zip(scene.families, s):
        if v <= delta:
            return f + 1
    return None


def _assemble(norm: Instance, sim: Similarity, original: Instance, scene: _Scene,
              x: np.ndarray, eps: float, trace, anchor, *, exact: bool, evals: int,
              t0: float) -> PiercingResult:
    sp = SimplexPoint(tuple(x), min(eps, float(np.min(x))))
    t = line_triple(sp)
    scores = scene.family_scores(x[None])[0]
    order = np.argsort(scores, kind="stable")
    fam = scene.families[int(order[0])]
    for f, v in zip(scene.families, scores):
        if v <= TOL.sign:
            fam = f
            break
    f1, f2, f3, f4, f5 = t.circle_points
    inv = sim.invert
    q5 = anchor if anchor is not None else inv(f5)
    M = inv(t.M)
    defining = ((inv(f1), inv(f4)), (inv(f2), q5), (inv(f3), M))
    lines = tuple(Line.through(p, q) for p, q in defining)
    family = original.families[fam]
    residual = max(min(distance_body_to_line(b, ln) for ln in lines) for b in family.bodies)
    conc = max(abs(ln.signed_distance(t.M)) for ln in t.lines)
    result = PiercingResult(fam + 1, lines, M, residual, sp, list(trace), t, sim, exact,
                            conc, anchor, evals, time.perf_counter() - t0, defining)
    if exact:
        ok, missing = pierced_by(lines, family)
        ok_norm, missing_norm = pierced_by(t.lines, norm.families[fam])
        if not (ok and ok_norm):
            raise VerificationError(
                f"lines fail to pierce bodies {missing or missing_norm} of family {fam + 1}")
        if conc > TOL.geom:
            raise VerificationError(f"concurrency residual {conc:.3g} exceeds tolerance")
    return result


def violation(x: SimplexPoint, fam: Family, delta: float) -> float:
    """How far the lines of ``x`` are from piercing every body thickened by ``delta``.

    Zero exactly when each body comes within ``delta`` of one of the lines.
    """
    t = line_triple(x)
    worst = max(min(distance_body_to_line(b, ln) for ln in t.lines) for b in fam.bodies)
    return max(0.0, worst - delta)


def solve_colorful(instance: Instance, params: SolveParams = SolveParams()) -> PiercingResult:
    """Three concurrent lines piercing one of the families of a T(3) instance."""
    if not params.skip_t3:
        ok = has_T3(instance)
        if not ok:
            raise T3Violated(ok)
    norm, sim = normalize_instance(instance)
    return _solve_normalized(norm, sim, params, None, instance)


def solve_single(family: Family, params: SolveParams = SolveParams()) -> PiercingResult:
    return solve_colorful(Instance((family,)), params)


def solve_anchored(instance: Instance, q, params: SolveParams = SolveParams()) -> PiercingResult:
    """As ``solve_colorful``, with the second line forced through ``q``.

    ``q`` must lie strictly outside the convex hull of all bodies.
    """
    q = Point.of(q)
    norm, sim = anchored_normalize(instance, q)
    if not params.skip_t3:
        ok = has_T3(instance)
        if not ok:
            raise T3Violated(ok)
    return _solve_normalized(norm, sim, params, q, instance)


def rainbow_oracles(norm: Instance, delta: float) -> list[CoverOracle]:
    """Colour classes A_i^j of a normalized instance as KKM oracles over the
    standard simplex, mapped affinely onto the shrunken simplex of ``delta``."""
    eps = delta / (4 * math.pi)
    slots = norm.colorful_index()
    oracles = []
    for s in slots:
        scene = _Scene(Instance((norm.families[s],)))

        def batch(W, scene=scene):
            return _batch_colors(scene, eps + (1 - 5 * eps) * np.atleast_2d(W))

        oracles.append(CoverOracle(5, lambda i, w, b=batch: bool(b(np.asarray(w)[None])[0, i - 1]),
                                   batch))
    return oracles


def _batch_colors(scene: _Scene, X: np.ndarray) -> np.ndarray:
    """(N, 5) colour presence for a single-family scene."""
    f, normals, offsets, M = batch_triples(X)
    S = np.einsum("nlk,vk->nlv", normals, scene.V) - offsets[:, :, None]
    smax = np.maximum.reduceat(S, scene.body_starts, axis=2)
    smin = np.minimum.reduceat(S, scene.body_starts, axis=2)
    clear = (smin > TOL.sign) | (smax < -TOL.sign)            # (N, 3, B)
    inside = clear.all(axis=1)                                 # (N, B)
    body_signs = np.where(smin > 0, 1, -1)                     # (N, 3, B)
    # Wedge sign vectors from arc midpoints; arcs: (0,g),(g,a1),(a1,a2),...,(a4,2pi).
    ang = np.arctan2(f[:, :4, 1], f[:, :4, 0]) % (2 * np.pi)
    d = M - f[:, 2]
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    s = -2 * np.einsum("nk,nk->n", f[:, 2], d)
    gpt = f[:, 2] + s[:, None] * d
    g = np.arctan2(gpt[:, 1], gpt[:, 0]) % (2 * np.pi)
    bounds = np.column_stack([np.zeros(len(X)), g, ang, np.full(len(X), 2 * np.pi)])
    mids = 0.5 * (bounds[:, :-1] + bounds[:, 1:])              # (N, 6)
    mp = np.stack([np.cos(mids), np.sin(mids)], axis=2)        # (N, 6, 2)
    wedge = np.sign(np.einsum("nlk,nrk->nlr", normals, mp) - offsets[:, :, None])   # (N, 3, 6)
    match = (body_signs[:, :, :, None] == wedge[:, :, None, :]).all(axis=1)          # (N, B, 6)
    match &= inside[:, :, None]
    colors_of_wedge = np.array([0, 0, 1, 2, 3, 4])
    out = np.zeros((len(X), 5), dtype=bool)
    for r in range(6):
        out[:, colors_of_wedge[r]] |= match[:, :, r].any(axis=1)
    return out
