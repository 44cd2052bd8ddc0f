"""Discrete search for KKM intersection points and colourful (rainbow) points.

The simplex ``{x >= 0, sum x = 1}`` in R^n is triangulated by the Kuhn
(Freudenthal) scheme on the grid ``{m / k : m in Z^n_{>=0}, sum m = k}``.
Colour classes are given as membership oracles; a cell whose vertices see every
colour is refined by triangulating it again, and only points whose memberships
are re-checked by the oracles are ever returned.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

MAX_VERTICES = 10 ** 7
MAX_DIMENSION = 8


class NotFound(RuntimeError):
    """No (verified) point within the search budget.

    Always a legitimate outcome: the cover may not be KKM, or the resolution
    may be too coarse for its open sets.
    """

    def __init__(self, message: str, *, best_size: int = 0,
                 face_violations: Sequence[tuple[float, ...]] = (), rounds: int = 0,
                 history: Sequence[int] = ()):
        super().__init__(message)
        self.best_size = best_size
        self.face_violations = list(face_violations)
        self.rounds = rounds
        self.history = list(history)


@dataclass(frozen=True)
class TriangulatedSimplex:
    n: int
    k: int
    compositions: np.ndarray = field(repr=False)   # (V, n) integer grid coordinates
    cells: np.ndarray = field(repr=False)          # (C, n) vertex indices

    @property
    def dimension(self) -> int:
        return self.n - 1

    @property
    def points(self) -> np.ndarray:
        return self.compositions / self.k

    def cell_points(self, c: int) -> np.ndarray:
        return self.points[self.cells[c]]

    def cell_volumes(self) -> np.ndarray:
        """Volumes in the coordinates (x_1, ..., x_{n-1})."""
        P = self.points[self.cells][:, :, :-1]
        E = P[:, 1:] - P[:, :1]
        return np.abs(np.linalg.det(E)) / math.factorial(self.n - 1)

    def max_cell_diameter(self) -> float:
        P = self.points[self.cells]
        d = P[:, :, None, :] - P[:, None, :, :]
        return float(np.sqrt((d ** 2).sum(-1)).max())


def _interleavings(blocks: list[list[int]]):
    """All merges of the blocks that keep each block's internal order."""
    if all(not b for b in blocks):
        yield []
        return
    for i, b in enumerate(blocks):
        if b:
            rest = blocks[:i] + [b[1:]] + blocks[i + 1:]
            for tail in _interleavings(rest):
                yield [b[0]] + tail


def _nondecreasing(d: int, hi: int):
    """Nondecreasing integer tuples of length d with entries in [0, hi]."""
    return itertools.combinations_with_replacement(range(hi + 1), d)


@lru_cache(maxsize=32)
def _triangulate(n: int, k: int) -> TriangulatedSimplex:
    d = n - 1
    # Work with partial sums z_i = m_1 + ... + m_i, 0 <= z_1 <= ... <= z_d <= k.
    zs = list(_nondecreasing(d, k))
    index = {z: i for i, z in enumerate(zs)}
    comp = np.diff(np.column_stack([np.zeros(len(zs), int), np.array(zs, int).reshape(len(zs), d),
                                    np.full(len(zs), k)]), axis=1)
    cells = []
    for b in _nondecreasing(d, k - 1):
        # Kuhn simplex b, b+e_s1, b+e_s1+e_s2, ...  stays in the ordered region iff,
        # inside each run of equal base values, higher indices are raised first.
        blocks: list[list[int]] = []
        for i in range(d):
            if i > 0 and b[i] == b[i - 1]:
                blocks[-1].insert(0, i)
            else:
                blocks.append([i])
        for order in _interleavings(blocks):
            z = list(b)
            verts = [index[tuple(z)]]
            for i in order:
                z[i] += 1
                verts.append(index[tuple(z)])
            cells.append(verts)
    return TriangulatedSimplex(n, k, comp, np.array(cells, dtype=int).reshape(-1, n))


def triangulate(n: int, k: int) -> TriangulatedSimplex:
    """Kuhn triangulation of the (n-1)-simplex with k subdivisions per edge.

    It has C(k+n-1, n-1) vertices and k^(n-1) cells.
    """
    if n < 2 or k < 1:
        raise ValueError("need n >= 2 and k >= 1")
    if n > MAX_DIMENSION:
        raise ValueError(f"dimension n={n} exceeds {MAX_DIMENSION}")
    if math.comb(k + n - 1, n - 1) > MAX_VERTICES:
        raise ValueError(f"C({k + n - 1}, {n - 1}) grid vertices exceed {MAX_VERTICES}")
    return _triangulate(n, k)


@dataclass
class CoverOracle:
    """Membership oracle for the colour classes A_1..A_n (colours are 1-based).

    ``batch`` may map an (N, n) array of points to an (N, n) boolean matrix;
    otherwise ``member`` is called point by point.
    """

    n: int
    member: Callable[[int, np.ndarray], bool]
    batch: Callable[[np.ndarray], np.ndarray] | None = None

    def matrix(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(X)
        if self.batch is not None:
            return np.asarray(self.batch(X), dtype=bool)
        return np.array([[bool(self.member(i + 1, x)) for i in range(self.n)] for x in X],
                        dtype=bool).reshape(len(X), self.n)

    def colors(self, x: np.ndarray) -> frozenset[int]:
        return frozenset(i + 1 for i in range(self.n) if self.member(i + 1, np.asarray(x)))

    @classmethod
    def from_predicate(cls, n: int, pred: Callable[[int, np.ndarray], bool]) -> CoverOracle:
        return cls(n, pred)


def face_violations(oracle: CoverOracle, X: np.ndarray, mem: np.ndarray | None = None) -> list[tuple]:
    """Points not covered by the colours of their own supporting face."""
    mem = oracle.matrix(X) if mem is None else mem
    support = X > 0
    bad = ~(mem & support).any(axis=1)
    return [tuple(map(float, x)) for x in X[bad]]


@dataclass(frozen=True)
class KKMPoint:
    point: np.ndarray
    colors: frozenset[int]
    round: int
    resolution: float      # edge scale of the grid the point was found on


def _subgrid(cell: np.ndarray, T: TriangulatedSimplex) -> np.ndarray:
    return T.points @ cell


def kkm_intersection_search(oracle: CoverOracle, n: int, k: int, refine_rounds: int = 4,
                            beam: int = 8) -> KKMPoint:
    """Point lying in every colour class.

    Grid vertices are scanned in index order; if none is in all classes, up to
    ``beam`` cells whose vertices jointly carry all colours are re-triangulated,
    for ``refine_rounds`` rounds.
    """
    if oracle.n != n:
        raise ValueError("oracle dimension mismatch")
    T = triangulate(n, k)
    X = T.points
    mem = oracle.matrix(X)
    violations = face_violations(oracle, X, mem)
    cells = [X[c] for c in T.cells]
    cell_mem = [mem[c] for c in T.cells]
    best = int(mem.sum(axis=1).max(initial=0))
    history = [best]
    scale = 1.0 / k
    for rnd in range(refine_rounds + 1):
        if rnd > 0:
            new_cells, new_mem = [], []
            for cell in cells:
                P = _subgrid(cell, T)
                m = oracle.matrix(P)
                hit = np.flatnonzero(m.all(axis=1))
                best = max(best, int(m.sum(axis=1).max(initial=0)))
                if len(hit):
                    return _verified_kkm(oracle, P[hit[0]], rnd, scale / k, n)
                new_cells.extend(P[c] for c in T.cells)
                new_mem.extend(m[c] for c in T.cells)
            cells, cell_mem = new_cells, new_mem
            scale /= k
            history.append(best)
        else:
            hit = np.flatnonzero(mem.all(axis=1))
            if len(hit):
                return _verified_kkm(oracle, X[hit[0]], 0, scale, n)
        full = [i for i, m in enumerate(cell_mem) if m.any(axis=0).all()]
        if not full:
            raise NotFound("no cell carries every colour", best_size=best,
                           face_violations=violations, rounds=rnd, history=history)
        cells = [cells[i] for i in full[:beam]]
    raise NotFound("refinement budget exhausted", best_size=best,
                   face_violations=violations, rounds=refine_rounds, history=history)


def _verified_kkm(oracle: CoverOracle, x: np.ndarray, rnd: int, res: float, n: int) -> KKMPoint:
    colors = oracle.colors(x)
    if len(colors) != n:
        raise AssertionError("batch and pointwise oracle disagree")
    return KKMPoint(np.array(x), colors, rnd, res)


@dataclass(frozen=True)
class RainbowPoint:
    """``point`` lies in A_i of cover ``permutation[i-1]`` for every colour i."""

    permutation: tuple[int, ...]
    point: np.ndarray
    round: int
    best_history: tuple[int, ...]


def _membership_tensor(oracles: Sequence[CoverOracle], X: np.ndarray) -> np.ndarray:
    """(N, cover, colour) boolean tensor."""
    return np.stack([o.matrix(X) for o in oracles], axis=1)


def _best_matchings(mem: np.ndarray, perms: np.ndarray) -> np.ndarray:
    """Largest number of colours i served by cover perm[i], over all permutations,
    for each row of an (N, cover, colour) tensor.  Returns (N,) sizes."""
    n = mem.shape[2]
    ok = mem[:, perms, np.arange(n)]                  # (N, P, n)
    return ok.sum(axis=2).max(axis=1)


def colorful_rainbow_search(oracles: Sequence[CoverOracle], n: int, k: int,
                            refine_rounds: int = 4, beam: int = 8) -> RainbowPoint:
    """Permutation pi and point x with x in A_i^{pi(i)} for every colour i.

    A vertex qualifies when its bipartite cover/colour membership graph has a
    perfect matching (checked by scanning all n! permutations).  Cells whose
    joint membership allows a perfect matching are refined first, then
    near-misses of size n-1.
    """
    if len(oracles) != n or any(o.n != n for o in oracles):
        raise ValueError("need n oracles over n colours")
    perms = np.array(list(itertools.permutations(range(n))), dtype=int)
    T = triangulate(n, k)
    X = T.points
    best = 0
    history: list[int] = []
    cells = [X[c] for c in T.cells]
    for rnd in range(refine_rounds + 1):
        if rnd == 0:
            pts_groups = [(X, T.cells)]
        else:
            pts_groups = [(_subgrid(c, T), T.cells) for c in cells]
        new_cells, scores = [], []
        for P, cell_idx in pts_groups:
            mem = _membership_tensor(oracles, P)
            sizes = _best_matchings(mem, perms)
            best = max(best, int(sizes.max(initial=0)))
            hit = np.flatnonzero(sizes == n)
            if len(hit):
                history.append(best)
                return _verified_rainbow(oracles, P[hit[0]], perms, rnd, tuple(history))
            cell_union = mem[cell_idx].any(axis=1)          # (C, cover, colour)
            cell_sizes = _best_matchings(cell_union, perms)
            for ci, s in enumerate(cell_sizes):
                new_cells.append(P[cell_idx[ci]])
                scores.append(int(s))
        history.append(best)
        scores_arr = np.array(scores)
        order = np.flatnonzero(scores_arr == n)
        if len(order) < beam:
            order = np.concatenate([order, np.flatnonzero(scores_arr == n - 1)])
        if len(order) == 0:
            raise NotFound("no cell admits a near-rainbow matching", best_size=best,
                           rounds=rnd, history=history)
        cells = [new_cells[i] for i in order[:beam]]
    raise NotFound("refinement budget exhausted", best_size=best,
                   rounds=refine_rounds, history=history)


def _verified_rainbow(oracles, x, perms, rnd, history) -> RainbowPoint:
    n = len(oracles)
    mem = np.array([[o.member(i + 1, x) for i in range(n)] for o in oracles], dtype=bool)
    for p in perms:
        if all(mem[p[i], i] for i in range(n)):
            return RainbowPoint(tuple(int(c) + 1 for c in p), np.array(x), rnd, history)
    raise AssertionError("batch and pointwise oracle disagree")


# ------------------------------------------------------------ reference covers

def halfspace_cover(n: int, threshold: float | None = None) -> CoverOracle:
    """A_i = {x : x_i > threshold}, threshold 1/(2n) by default."""
    t = 1.0 / (2 * n) if threshold is None else threshold
    return CoverOracle(n, lambda i, x: bool(x[i - 1] > t), lambda X: X > t)


def shifted_cover(n: int, slack: float = 0.3, shift: int = 0,
                  slacks: Sequence[float] | None = None) -> CoverOracle:
    """A_i = {x : x_i > max_j x_j - s_i}.

    With ``slacks`` the per-colour slack varies; ``shift`` rotates that list,
    which yields asymmetric covers that differ from one another.
    """
    s = np.full(n, slack) if slacks is None else np.roll(np.asarray(slacks, float), shift)

    def batch(X):
        return X > X.max(axis=1, keepdims=True) - s

    return CoverOracle(n, lambda i, x: bool(x[i - 1] > np.max(x) - s[i - 1]), batch)
