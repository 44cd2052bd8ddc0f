"""Exact small-scale oracles: line transversals, the T(3) property and
brute-force minimum line piercing.

Everything here is decided over a finite candidate set of lines.  Completeness
rests on the usual pivoting argument: if some line meets every convex polygon
in a collection, translate it until it first touches a vertex ``v`` while
still meeting all polygons (the first polygon it would leave is left through a
vertex), then rotate it about ``v`` until it touches a second vertex ``w``
(same reason).  The line ``vw`` is still a transversal.  So it suffices to test
the lines through pairs of input vertices; edge-supporting lines are among them.
When all vertices coincide, any line through that point works.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import TOL
from .geom import ConvexBody, Family, Instance, Line, line_intersects_body

__all__ = [
    "Family", "Instance", "CounterexampleTriple", "PiercingNumber", "TooLarge",
    "candidate_lines", "transversal_exists", "has_T3", "pierced_by", "min_line_piercing",
]

MAX_CANDIDATES = 5000


class TooLarge(RuntimeError):
    pass


def _unique_vertices(bodies: Sequence[ConvexBody]) -> np.ndarray:
    v = np.concatenate([b.vertices for b in bodies])
    _, idx = np.unique(v, axis=0, return_index=True)
    return v[np.sort(idx)]


def _canonical_arrays(p: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Canonical unit directions and offsets (``normal . x = offset``) of lines pq."""
    d = q - p
    d = d / np.hypot(d[:, 0], d[:, 1])[:, None]
    d[np.abs(d[:, 0]) <= 1e-15] = (0.0, 1.0)
    flip = d[:, 0] < 0
    d[flip] *= -1
    offset = -d[:, 1] * p[:, 0] + d[:, 0] * p[:, 1]
    return d, offset


def candidate_lines(bodies: Sequence[ConvexBody]) -> list[Line]:
    """All lines through two distinct input vertices, deduplicated.

    Edge-supporting lines are lines through two vertices, so they are covered.
    If every vertex is the same point, the horizontal and vertical lines through
    it are returned.
    """
    v = _unique_vertices(bodies)
    if len(v) == 1:
        p = v[0]
        return [Line.from_point_direction(p, (1.0, 0.0)), Line.from_point_direction(p, (0.0, 1.0))]
    i, j = np.triu_indices(len(v), k=1)
    d, off = _canonical_arrays(v[i], v[j])
    b = TOL.dedup
    keys = np.column_stack([np.round(d[:, 0] / b), np.round(d[:, 1] / b), np.round(off / b)])
    _, first = np.unique(keys, axis=0, return_index=True)
    first.sort()
    return [Line.from_point_direction(v[i[k]], d[k]) for k in first]


def _line_arrays(lines: Sequence[Line]) -> tuple[np.ndarray, np.ndarray]:
    normals = np.array([ln.normal for ln in lines], dtype=float).reshape(-1, 2)
    offsets = np.array([ln.offset for ln in lines], dtype=float)
    return normals, offsets


def coverage(lines: Sequence[Line], bodies: Sequence[ConvexBody]) -> np.ndarray:
    """Boolean matrix ``hit[line, body]`` under closed semantics."""
    if not lines:
        return np.zeros((0, len(bodies)), dtype=bool)
    normals, offsets = _line_arrays(lines)
    v = np.concatenate([b.vertices for b in bodies])
    starts = np.cumsum([0] + [len(b) for b in bodies[:-1]])
    s = v @ normals.T - offsets          # (V, L)
    smax = np.maximum.reduceat(s, starts, axis=0)
    smin = np.minimum.reduceat(s, starts, axis=0)
    return ((smax >= -TOL.sign) & (smin <= TOL.sign)).T


def transversal_exists(bodies: Sequence[ConvexBody]) -> tuple[bool, Line | None]:
    """Decide exactly whether one line meets every body; returns a witness."""
    bodies = list(bodies)
    if not bodies:
        raise ValueError("transversal_exists needs at least one body")
    cands = candidate_lines(bodies)
    hit = coverage(cands, bodies).all(axis=1)
    k = np.flatnonzero(hit)
    if len(k) == 0:
        return False, None
    return True, cands[int(k[0])]


@dataclass(frozen=True)
class CounterexampleTriple:
    """Three bodies without a common transversal: ``(family index, body index)`` each."""

    members: tuple[tuple[int, int], tuple[int, int], tuple[int, int]]

    def __bool__(self) -> bool:
        return False


def _triples(instance: Instance):
    """Triples drawn from three distinct colour slots, deduplicated, in
    lexicographic order of the slot and body indices."""
    slots = instance.colorful_index()
    seen = set()
    for a, b, c in itertools.combinations(range(5), 3):
        fa, fb, fc = slots[a], slots[b], slots[c]
        for i in range(len(instance.families[fa])):
            for j in range(len(instance.families[fb])):
                for k in range(len(instance.families[fc])):
                    members = ((fa, i), (fb, j), (fc, k))
                    if len(set(members)) < 3:
                        continue  # two bodies always have a transversal
                    key = tuple(sorted(members))
                    if key in seen:
                        continue
                    seen.add(key)
                    yield members


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("LINEPIERCE_THREADS", "1")))
    except ValueError:
        return 1


def has_T3(instance: Instance) -> bool | CounterexampleTriple:
    """True when every triple from three distinct families has a transversal.

    A single family is padded to five copies, which makes this the plain T(3)
    test over unordered triples of distinct bodies.  Otherwise the first failing
    triple (in enumeration order) is returned; it is falsy.
    """
    triples = list(_triples(instance))

    def check(members) -> bool:
        bodies = [instance.families[f].bodies[b] for f, b in members]
        return transversal_exists(bodies)[0]

    threads = _threads()
    if threads > 1 and len(triples) > 64:
        with ThreadPoolExecutor(threads) as pool:
            ok = list(pool.map(check, triples, chunksize=32))
    else:
        ok = []
        for t in triples:
            ok.append(check(t))
            if not ok[-1]:
                break
    for t, good in zip(triples, ok):
        if not good:
            return CounterexampleTriple(t)
    return True


def pierced_by(lines: Sequence[Line], family: Family | Sequence[ConvexBody]) -> tuple[bool, list[int]]:
    bodies = list(family.bodies if isinstance(family, Family) else family)
    unpierced = [i for i, b in enumerate(bodies)
                 if not any(line_intersects_body(ln, b) for ln in lines)]
    return not unpierced, unpierced


@dataclass(frozen=True)
class PiercingNumber:
    """``k`` is the exact piercing number, or None when it exceeds ``k_max``."""

    k: int | None
    lines: tuple[Line, ...]
    k_max: int

    @property
    def exceeded(self) -> bool:
        return self.k is None

    def __str__(self) -> str:
        return "more" if self.k is None else str(self.k)


def _maximal_masks(masks: list[int]) -> list[tuple[int, int]]:
    """(mask, first candidate index) for masks not strictly contained in another."""
    first: dict[int, int] = {}
    for idx, m in enumerate(masks):
        if m and m not in first:
            first[m] = idx
    uniq = list(first.items())
    if uniq and max(m for m, _ in uniq).bit_length() <= 62:
        arr = np.array([m for m, _ in uniq], dtype=np.int64)
        dominated = (((arr[None, :] & arr[:, None]) == arr[:, None])
                     & (arr[None, :] != arr[:, None])).any(axis=1)
        keep = [t for t, d in zip(uniq, dominated) if not d]
    else:
        keep = [(m, i) for m, i in uniq
                if not any(o != m and (o & m) == m for o, _ in uniq)]
    keep.sort(key=lambda t: t[1])
    return keep


def min_line_piercing(family: Family | Sequence[ConvexBody], k_max: int = 3) -> PiercingNumber:
    """Exact minimum number of lines (up to ``k_max`` <= 3) meeting every body.

    Set cover over the candidate lines of all bodies: a family pierced by k
    lines is pierced by k candidate lines, since each line can be pivoted onto a
    candidate that still meets the bodies it covered.
    """
    if not 1 <= k_max <= 3:
        raise ValueError("k_max must be 1, 2 or 3")
    bodies = list(family.bodies if isinstance(family, Family) else family)
    cands = candidate_lines(bodies)
    if len(cands) > MAX_CANDIDATES:
        raise TooLarge(f"{len(cands)} candidate lines exceed the limit of {MAX_CANDIDATES}")
    hit = coverage(cands, bodies)
    masks = [int(sum(1 << b for b in np.flatnonzero(row))) for row in hit]
    full = (1 << len(bodies)) - 1
    for idx, m in enumerate(masks):
        if m == full:
            return PiercingNumber(1, (cands[idx],), k_max)
    reps = _maximal_masks(masks)
    if k_max >= 2:
        for (ma, ia), (mb, ib) in itertools.combinations(reps, 2):
            if ma | mb == full:
                return PiercingNumber(2, (cands[ia], cands[ib]), k_max)
    if k_max >= 3:
        for (ma, ia), (mb, ib) in itertools.combinations(reps, 2):
            need = full & ~(ma | mb)
            for mc, ic in reps:
                if mc & need == need and ic not in (ia, ib):
                    return PiercingNumber(3, tuple(cands[i] for i in sorted((ia, ib, ic))), k_max)
    return PiercingNumber(None, (), k_max)
