import math
from itertools import combinations

import pytest

from vkit.complexes import build_cech, build_vr
from vkit.metric import space_from_points
from vkit.persistence import (INF, BoundaryMatrix, PersistenceDiagram,
                              SkeletonTooShallow, betti_at, compute_diagram,
                              diagram_distance)
from vkit.verify import random_space


def alive_count(diagram, dim, r):
    return sum(1 for q, b, d in diagram.intervals
               if q == dim and b < r and (math.isinf(d) or r <= d))


class TestComputeDiagram:
    def test_one_point(self):
        space = space_from_points([[0.0]])
        D = compute_diagram(build_vr(space, math.inf, 1), 0)
        assert D.intervals == ((0, 0.0, INF),)

    def test_two_points_merge_at_their_distance(self):
        space = space_from_points([[0.0], [1.5]])
        D = compute_diagram(build_vr(space, math.inf, 1), 0)
        assert D.intervals == ((0, 0.0, 1.5), (0, 0.0, INF))

    def test_unit_square(self, square):
        D = compute_diagram(build_vr(square, math.inf, 2), 1)
        expected = PersistenceDiagram.of(
            [(0, 0.0, INF), (0, 0.0, 1.0), (0, 0.0, 1.0), (0, 0.0, 1.0),
             (1, 1.0, math.sqrt(2))])
        assert len(D.intervals) == len(expected.intervals)
        for got, want in zip(D.intervals, expected.intervals):
            assert got[0] == want[0]
            assert got[1] == pytest.approx(want[1], abs=1e-12)
            assert got[2] == pytest.approx(want[2], abs=1e-12)

    def test_cech_square_has_no_one_dimensional_bar(self, square):
        # diagonals admit side-midpoint witnesses at value 1, so the cycle
        # fills the moment it is born
        D = compute_diagram(build_cech(square, math.inf, 2), 1)
        assert D.in_dim(1) == []

    def test_requires_the_right_skeleton(self, square):
        K = build_vr(square, math.inf, 1)
        with pytest.raises(SkeletonTooShallow):
            compute_diagram(K, 1)

    def test_boundary_matrix_respects_filtration_order(self, square):
        K = build_vr(square, math.inf, 2)
        bm = BoundaryMatrix.from_complex(K, 1)
        values = list(bm.values)
        assert values == sorted(values)
        for j, col in enumerate(bm.columns):
            assert all(i < j for i in col)
            assert len(col) in (0, len(bm.simplices[j]))


class TestBettiAt:
    def test_square_cycle_window(self, square):
        K = build_vr(square, math.inf, 2)
        assert betti_at(K, 1.1, 1) == 1
        assert betti_at(K, 1.5, 1) == 0

    def test_strict_sublevel_at_zero_is_empty(self, square):
        K = build_vr(square, math.inf, 2)
        assert betti_at(K, 0.0, 0) == 0

    def test_components_before_edges(self, square):
        K = build_vr(square, math.inf, 2)
        assert betti_at(K, 0.5, 0) == 4
        assert betti_at(K, 1.1, 0) == 1

    def test_agrees_with_diagram_at_midpoints(self, rng):
        for _ in range(30):
            space = random_space(rng, max_points=8)
            K = build_vr(space, math.inf, 2)
            D = compute_diagram(K, 1)
            crit = sorted({v for _, v in K.in_filtration_order()})
            probes = [(a + b) / 2 for a, b in zip(crit, crit[1:])]
            probes.append(crit[-1] + 1.0)
            for r in probes:
                for dim in (0, 1):
                    assert alive_count(D, dim, r) == betti_at(K, r, dim)


class TestOpenConvention:
    def test_simplex_born_at_r_is_absent_at_r(self):
        space = space_from_points([[0.0], [1.0]])
        vr = build_vr(space, math.inf, 1)
        assert ((0, 1) in dict(vr.sublevel(1.0 + 1e-9))) is True
        assert ((0, 1) in dict(vr.sublevel(1.0))) is False
        cech = build_cech(space, math.inf, 1)
        # witness value of the edge is the full gap: no midpoint in the space
        assert cech.value_of({0, 1}) == 1.0
        assert ((0, 1) in dict(cech.sublevel(1.0))) is False

    def test_build_at_exact_threshold_excludes(self, equilateral):
        assert not build_vr(equilateral, 1.0, 2).is_simplex({0, 1})
        assert not build_cech(space_from_points([[0.0], [1.0]]), 1.0, 1).is_simplex({0, 1})


class TestBottleneck:
    def test_identical_diagrams(self, square):
        D = compute_diagram(build_vr(square, math.inf, 2), 1)
        assert diagram_distance(D, D) == 0.0

    def test_single_bar_against_empty(self):
        D1 = PersistenceDiagram.of([(1, 1.0, 2.0)])
        D2 = PersistenceDiagram.of([])
        assert diagram_distance(D1, D2) == 0.5

    def test_unmatched_essential_class(self):
        D1 = PersistenceDiagram.of([(0, 0.0, INF)])
        D2 = PersistenceDiagram.of([])
        assert diagram_distance(D1, D2) == INF

    def test_symmetry(self, rng):
        for _ in range(20):
            bars1 = [(0, b, b + g) for b, g in rng.uniform(0.1, 1.0, size=(3, 2))]
            bars2 = [(0, b, b + g) for b, g in rng.uniform(0.1, 1.0, size=(4, 2))]
            D1, D2 = PersistenceDiagram.of(bars1), PersistenceDiagram.of(bars2)
            assert diagram_distance(D1, D2) == diagram_distance(D2, D1)

    def test_matches_exhaustive_matching(self, rng):
        def brute(A, B):
            best = math.inf
            idx_b = range(len(B))
            for k in range(min(len(A), len(B)) + 1):
                for a_sel in combinations(range(len(A)), k):
                    for b_sel in combinations(idx_b, k):
                        import itertools
                        for b_perm in itertools.permutations(b_sel):
                            cost = 0.0
                            for i, j in zip(a_sel, b_perm):
                                cost = max(cost,
                                           max(abs(A[i][0] - B[j][0]),
                                               abs(A[i][1] - B[j][1])))
                            for i in set(range(len(A))) - set(a_sel):
                                cost = max(cost, (A[i][1] - A[i][0]) / 2)
                            for j in set(idx_b) - set(b_perm):
                                cost = max(cost, (B[j][1] - B[j][0]) / 2)
                            best = min(best, cost)
            return best if best is not math.inf else 0.0

        for _ in range(15):
            A = [(b, b + g) for b, g in rng.uniform(0.1, 1.0, size=(int(rng.integers(0, 4)), 2))]
            B = [(b, b + g) for b, g in rng.uniform(0.1, 1.0, size=(int(rng.integers(0, 4)), 2))]
            D1 = PersistenceDiagram.of([(0, b, d) for b, d in A])
            D2 = PersistenceDiagram.of([(0, b, d) for b, d in B])
            assert diagram_distance(D1, D2) == pytest.approx(brute(A, B), abs=1e-12)

    def test_stability_smoke(self, rng):
        import numpy as np
        for _ in range(15):
            coords = rng.uniform(0, 2, size=(6, 3))
            delta = 0.05
            jitter = rng.uniform(-1, 1, size=coords.shape)
            jitter *= delta / (2 * np.linalg.norm(jitter, axis=1, keepdims=True))
            D1 = compute_diagram(build_vr(space_from_points(coords), math.inf, 2), 1)
            D2 = compute_diagram(build_vr(space_from_points(coords + jitter), math.inf, 2), 1)
            assert diagram_distance(D1, D2) <= 2 * delta + 1e-9


class TestFunctoriality:
    def test_nested_thresholds_include_and_agree(self, rng):
        # the inclusion VR(r1) -> VR(r2) is simplexwise, and truncating the
        # filtration at r2 does not change any homology seen below r2
        for _ in range(15):
            space = random_space(rng, max_points=8)
            full = build_vr(space, math.inf, 2)
            crit = sorted({v for _, v in full.in_filtration_order()})
            r2 = crit[-1] * 0.8 + 0.1
            r1 = r2 / 2
            K1, K2 = build_vr(space, r1, 2), build_vr(space, r2, 2)
            assert set(K1.simplices) <= set(K2.simplices)
            for r in (r1 / 2, r1):
                for dim in (0, 1):
                    assert betti_at(K1, r, dim) == betti_at(K2, r, dim) \
                        == betti_at(full, r, dim)


class TestCSV:
    def test_export_format(self):
        D = PersistenceDiagram.of([(0, 0.0, INF), (1, 1.0, math.sqrt(2))])
        lines = D.to_csv().splitlines()
        assert lines[0] == "dim,birth,death"
        assert lines[1] == "0,0.0,inf"
        assert lines[2] == f"1,1.0,{math.sqrt(2)!r}"
