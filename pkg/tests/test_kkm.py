import itertools
import math
import time

import numpy as np
import pytest

from linepierce.kkm import (
    CoverOracle, NotFound, colorful_rainbow_search, face_violations, halfspace_cover,
    kkm_intersection_search, shifted_cover, triangulate,
)


@pytest.mark.parametrize("n,k", [(2, 1), (2, 5), (3, 2), (3, 7), (4, 3), (5, 4), (6, 3)])
def test_triangulation_counts_and_tiling(n, k):
    T = triangulate(n, k)
    assert len(T.compositions) == math.comb(k + n - 1, n - 1)
    assert len(T.cells) == k ** (n - 1)
    assert np.all(T.compositions.sum(axis=1) == k)
    assert np.all(T.compositions >= 0)
    vol = T.cell_volumes()
    assert np.all(vol > 0)
    assert vol.sum() == pytest.approx(1 / math.factorial(n - 1), rel=1e-12)


def test_small_cases():
    T = triangulate(3, 2)
    assert len(T.points) == 6 and len(T.cells) == 4
    assert len(triangulate(5, 4).points) == 70


@pytest.mark.parametrize("n,k", [(3, 4), (4, 4), (5, 3)])
def test_cell_diameter_bound(n, k):
    d = triangulate(n, k).max_cell_diameter()
    if n == 3:
        assert d <= math.sqrt(2) / k + 1e-12
    # Kuhn cells span x_i - x_j = 2/k in general
    assert d <= 2 / k + 1e-12


def test_cells_are_distinct_and_cover_random_points():
    T = triangulate(4, 3)
    assert len({tuple(sorted(c)) for c in T.cells}) == len(T.cells)
    rng = np.random.default_rng(0)
    P = T.points
    for y in rng.dirichlet(np.ones(4), 200):
        inside = 0
        for c in T.cells:
            A = np.vstack([P[c][:, :3].T, np.ones(4)])
            lam = np.linalg.solve(A, np.append(y[:3], 1))
            inside += bool(np.all(lam >= -1e-12))
        assert inside >= 1


def test_guards():
    with pytest.raises(ValueError):
        triangulate(1, 3)
    with pytest.raises(ValueError):
        triangulate(9, 2)
    with pytest.raises(ValueError):
        triangulate(8, 200)


# ----------------------------------------------------------------- KKM search

@pytest.mark.parametrize("n", [3, 4, 5])
@pytest.mark.parametrize("k", [8, 10])
def test_halfspace_cover_intersection(n, k):
    cover = halfspace_cover(n)
    t0 = time.perf_counter()
    p = kkm_intersection_search(cover, n, k)
    assert time.perf_counter() - t0 < 5
    assert p.colors == frozenset(range(1, n + 1))
    assert np.all(p.point > 1 / (2 * n))
    assert p.point.sum() == pytest.approx(1)


def test_barycenter_is_found_for_n5():
    p = kkm_intersection_search(halfspace_cover(5), 5, 5)
    assert np.allclose(p.point, 0.2)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_shifted_cover_intersection(n):
    cover = shifted_cover(n, 0.3)
    p = kkm_intersection_search(cover, n, 8)
    assert all(p.point[i] > p.point.max() - 0.3 for i in range(n))
    assert len(cover.colors(p.point)) == n


def test_tight_cover_needs_refinement():
    # A_i = {x_i > max - 0.02}: grid k=4 misses the thin central region
    cover = shifted_cover(3, 0.02)
    p = kkm_intersection_search(cover, 3, 4, refine_rounds=6)
    assert p.round >= 1
    assert cover.colors(p.point) == {1, 2, 3}


def test_reference_covers_are_kkm_on_grid():
    T = triangulate(4, 6)
    for cover in (halfspace_cover(4), shifted_cover(4, 0.3)):
        assert face_violations(cover, T.points) == []


def test_broken_cover_not_found():
    base = halfspace_cover(4)
    broken = CoverOracle(4, lambda i, x: i != 1 and base.member(i, x),
                         lambda X: base.batch(X) & (np.arange(4) != 0))
    with pytest.raises(NotFound) as e:
        kkm_intersection_search(broken, 4, 6)
    assert e.value.face_violations
    assert e.value.best_size == 3


def test_pointwise_oracle_matches_batch():
    cover = shifted_cover(4, 0.25)
    pointwise = CoverOracle.from_predicate(4, cover.member)
    a = kkm_intersection_search(cover, 4, 6)
    b = kkm_intersection_search(pointwise, 4, 6)
    assert np.array_equal(a.point, b.point)


# ------------------------------------------------------------------- rainbow

def test_rainbow_identical_covers():
    covers = [halfspace_cover(5)] * 5
    r = colorful_rainbow_search(covers, 5, 8)
    assert sorted(r.permutation) == [1, 2, 3, 4, 5]
    for i, c in enumerate(r.permutation, 1):
        assert covers[c - 1].member(i, r.point)


def test_rainbow_asymmetric_shifts():
    slacks = [0.05, 0.1, 0.2, 0.3, 0.4]
    covers = [shifted_cover(5, slacks=slacks, shift=s) for s in range(5)]
    # the covers genuinely differ
    x = np.array([0.3, 0.25, 0.2, 0.15, 0.1])
    assert len({tuple(c.matrix(x)[0]) for c in covers}) > 1
    r = colorful_rainbow_search(covers, 5, 8)
    for i, c in enumerate(r.permutation, 1):
        assert covers[c - 1].member(i, r.point)


def test_rainbow_history_monotone():
    covers = [shifted_cover(4, slacks=[0.02, 0.05, 0.03, 0.04], shift=s) for s in range(4)]
    r = colorful_rainbow_search(covers, 4, 3, refine_rounds=6)
    h = list(r.best_history)
    assert h == sorted(h)


def test_rainbow_broken_oracle():
    good = halfspace_cover(3)
    dead = CoverOracle(3, lambda i, x: False, lambda X: np.zeros(X.shape, bool))
    with pytest.raises(NotFound):
        colorful_rainbow_search([good, good, dead], 3, 6)


def test_rainbow_brute_force_oracle_agrees():
    # every permutation the search may return must verify; compare against a
    # direct scan of the grid for any rainbow vertex
    covers = [shifted_cover(3, slacks=[0.1, 0.2, 0.3], shift=s) for s in range(3)]
    T = triangulate(3, 8)
    direct = any(all(covers[p[i]].member(i + 1, x) for i in range(3))
                 for x in T.points for p in itertools.permutations(range(3)))
    r = colorful_rainbow_search(covers, 3, 8)
    assert direct == (r.round == 0)
