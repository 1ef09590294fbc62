import math

import numpy as np
import pytest

from vkit.fk import FKTriangulation
from vkit.generators import (constant_map, sliding_dirac_map, spread_map,
                             two_ball_map)
from vkit.measures import FiniteMeasure, dirac
from vkit.metric import Cover, space_from_points
from vkit.straightening import (BoundViolated, NoLabel, PipelineError,
                                SampledMap, choose_p, intersection_mass_bound,
                                label_simplices, linearize, prism_retract,
                                pump_vertex, straighten)


class TestChooseP:
    def test_small_dimensions(self):
        assert choose_p(1) == 0.75           # bound 2^1 1! = 2
        assert choose_p(2) == 1 - 1 / 16     # bound 2^2 2! = 8

    def test_always_strictly_inside_the_interval(self):
        for n in range(1, 7):
            bound = (2 ** n) * math.factorial(n)
            assert 1 - 1 / bound < choose_p(n) < 1


class TestLabelSimplices:
    def test_single_element_cover_labels_everything(self, line3):
        cov = Cover.explicit(line3, [[0, 1, 2]])
        tri = FKTriangulation(1, 4)
        smap = SampledMap.from_function(tri, lambda y: dirac(line3, 0))
        lab = label_simplices(smap, cov, 0.9)
        assert set(lab.ell.values()) == {0}

    def test_dirac_cells_get_their_ball(self, line3):
        cov = Cover.explicit(line3, [[0, 1], [1, 2]])
        tri = FKTriangulation(1, 2)

        def fn(y):
            if y[0] == 0.5:
                return dirac(line3, 1)     # shared vertex serves both cells
            return dirac(line3, 0 if y[0] < 0.5 else 2)

        smap = SampledMap.from_function(tri, fn, dense_depth=None)
        lab = label_simplices(smap, cov, 0.9)
        assert lab.ell[((0,), (0,))] == 0
        assert lab.ell[((1,), (0,))] == 1

    def test_spread_measures_fail_at_extreme_threshold(self, line3):
        cov = Cover.explicit(line3, [[0, 1], [1, 2]])
        tri = FKTriangulation(1, 2)
        spread = FiniteMeasure(line3, (0, 1, 2), (0.4, 0.2, 0.4))
        smap = SampledMap.from_function(tri, lambda y: spread)
        with pytest.raises(NoLabel):
            label_simplices(smap, cov, 0.999)

    def test_ties_break_to_the_smallest_id(self, line3):
        cov = Cover.explicit(line3, [[0, 1, 2], [0, 1]])
        tri = FKTriangulation(1, 1)
        smap = SampledMap.from_function(tri, lambda y: dirac(line3, 0))
        lab = label_simplices(smap, cov, 0.5)
        assert lab.ell[((0,), (0,))] == 0

    def test_vertex_stars_respect_the_dimension_bound(self, line3):
        import math as _math
        cov = Cover.explicit(line3, [[0, 1, 2]])
        for n, res in [(1, 4), (2, 2)]:
            tri = FKTriangulation(n, res)
            smap = SampledMap.from_function(tri, lambda y: dirac(line3, 0),
                                            dense_depth=None)
            lab = label_simplices(smap, cov, 0.5)
            bound = (2 ** n) * _math.factorial(n)
            for v in tri.vertices():
                assert len(lab.star_of_vertex(v)) <= bound

    def test_coarse_grid_uses_fine_samples(self, line3):
        cov = Cover.explicit(line3, [[0, 1], [1, 2]])
        fine = FKTriangulation(1, 4)

        def fn(y):
            # mass crosses through the shared point halfway through the cube
            if y[0] == 0.5:
                return dirac(line3, 1)
            return dirac(line3, 0 if y[0] < 0.5 else 2)

        smap = SampledMap.from_function(fine, fn, dense_depth=None)
        with pytest.raises(NoLabel):
            # at resolution 1 the only cell sees both Diracs
            label_simplices(smap, cov, 0.9, FKTriangulation(1, 1))
        lab = label_simplices(smap, cov, 0.9, FKTriangulation(1, 2))
        assert lab.ell[((0,), (0,))] == 0 and lab.ell[((1,), (0,))] == 1


class TestIntersectionMassBound:
    def test_single_label(self, line3):
        mu = FiniteMeasure(line3, (0, 1), (0.95, 0.05))
        assert intersection_mass_bound(mu, [frozenset({0})], 0.9) == pytest.approx(0.95)

    def test_two_labels_inclusion_exclusion_worst_case(self):
        space = space_from_points([[0.0], [1.0], [2.0]])
        mu = FiniteMeasure(space, (0, 1, 2), (0.9, 0.05, 0.05))
        mass = intersection_mass_bound(
            mu, [frozenset({0, 1}), frozenset({0, 2})], 0.9)
        assert mass == pytest.approx(0.9)
        assert mass > 1 - 2 * (1 - 0.9)

    def test_disjoint_complements_add_exactly(self):
        space = space_from_points([[0.0], [1.0], [2.0]])
        mu = FiniteMeasure(space, (0, 1, 2), (0.9, 0.05, 0.05))
        sets = [frozenset({0, 1}), frozenset({0, 2})]
        mass = intersection_mass_bound(mu, sets, 0.9)
        assert mass == pytest.approx(mu.mass_of(sets[0]) + mu.mass_of(sets[1]) - 1.0,
                                     abs=1e-12)

    def test_violation_reports(self, line3):
        mu = FiniteMeasure(line3, (0, 2), (0.5, 0.5))
        with pytest.raises(BoundViolated):
            intersection_mass_bound(mu, [frozenset({0})], 0.9)


class TestPumpVertex:
    def _setup(self, weights):
        space = space_from_points([[0.0], [1.0], [5.0]])
        cov = Cover.explicit(space, [[0], [0, 1, 2]])
        tri = FKTriangulation(1, 1)
        mu = FiniteMeasure(space, (0, 1), weights)
        smap = SampledMap.from_function(tri, lambda y: mu, dense_depth=None)
        lab = label_simplices(smap, cov, 0.85)
        return smap, lab

    def test_concentrating_pump_and_its_track(self):
        smap, lab = self._setup((0.9, 0.1))
        assert lab.ell[((0,), (0,))] == 0       # element {0} qualifies first
        vp = pump_vertex(smap, lab, (0,), 0.85)
        assert not vp.identity
        assert vp.result == dirac(smap.space, 0)
        masses = [m.weight_of(0) for _, m in vp.track]
        assert masses == pytest.approx([0.9, 0.925, 0.95, 0.975, 1.0], abs=1e-12)
        assert vp.p_floor > 0.85

    def test_already_supported_vertex_is_fixed(self, line3):
        cov = Cover.explicit(line3, [[0, 1, 2]])
        tri = FKTriangulation(1, 2)
        mu = FiniteMeasure(line3, (0, 1), (0.5, 0.5))
        smap = SampledMap.from_function(tri, lambda y: mu)
        lab = label_simplices(smap, cov, 0.9)
        vp = pump_vertex(smap, lab, (1,), 0.9)
        assert vp.identity
        assert vp.result is mu
        assert all(m is mu for _, m in vp.track)


class TestLinearize:
    def test_constant_values_give_a_constant_map(self, line3):
        cov = Cover.explicit(line3, [[0, 1, 2]])
        tri = FKTriangulation(1, 2)
        mu = FiniteMeasure(line3, (0, 1), (0.25, 0.75))
        smap = SampledMap.from_function(tri, lambda y: mu)
        lab = label_simplices(smap, cov, 0.9)
        gmap = linearize({v: mu for v in tri.vertices()}, lab)
        assert gmap.evaluate([0.37]) == mu

    def test_edge_interpolates_dirac_endpoints(self, line3):
        cov = Cover.explicit(line3, [[0, 1, 2]])
        tri = FKTriangulation(1, 1)
        values = {(0,): dirac(line3, 0), (1,): dirac(line3, 1)}
        smap = SampledMap.from_function(tri, lambda y: values[(round(y[0]),)],
                                        dense_depth=None)
        lab = label_simplices(smap, cov, 0.9)
        gmap = linearize(values, lab)
        mid = gmap.evaluate([0.5])
        assert mid.support == (0, 1)
        assert mid.weights == pytest.approx((0.5, 0.5), abs=1e-15)
        assert gmap.evaluate([0.0]) == values[(0,)]

    def test_barycenter_weights_are_arithmetic_means(self, line3):
        cov = Cover.explicit(line3, [[0, 1, 2]])
        tri = FKTriangulation(2, 1)
        corners = {
            (0, 0): FiniteMeasure(line3, (0, 1), (0.5, 0.5)),
            (1, 0): FiniteMeasure(line3, (0, 2), (0.25, 0.75)),
            (0, 1): dirac(line3, 1),
            (1, 1): FiniteMeasure(line3, (0, 1, 2), (0.2, 0.3, 0.5)),
        }
        smap = SampledMap.from_function(tri, lambda y: corners[
            (round(y[0]), round(y[1]))], dense_depth=None)
        lab = label_simplices(smap, cov, 0.5)
        gmap = linearize(corners, lab)
        simplex, _ = gmap.tri.locate([0.6, 0.3])
        verts = simplex.vertices()
        center = np.mean(gmap.tri.scaled_vertices(simplex), axis=0)
        out = gmap.evaluate(center)
        for x in range(3):
            mean = sum(corners[v].weight_of(x) for v in verts) / 3
            assert out.weight_of(x) == pytest.approx(mean, abs=1e-12)

    def test_escaping_support_is_rejected(self, line3):
        cov = Cover.explicit(line3, [[0, 1], [1, 2]])
        tri = FKTriangulation(1, 1)
        values = {(0,): dirac(line3, 0), (1,): dirac(line3, 2)}
        smap = SampledMap.from_function(tri, lambda y: dirac(line3, 0),
                                        dense_depth=None)
        lab = label_simplices(smap, cov, 0.9)
        from vkit.straightening import NotSubordinate
        with pytest.raises(NotSubordinate):
            linearize(values, lab)


class TestStraighten:
    def test_constant_map_is_all_trivial(self):
        _, cover, smap = constant_map()
        gmap, log = straighten(smap, cover)
        assert log.all_pass()
        for v in gmap.tri.vertices():
            assert gmap.values[v] is smap.value_on_subgrid(gmap.tri, v)

    def test_sliding_dirac_certifies(self):
        _, cover, smap = sliding_dirac_map()
        gmap, log = straighten(smap, cover)
        assert log.all_pass()
        # already subordinate: vertexwise exact equality with the input
        for v in gmap.tri.vertices():
            assert gmap.values[v] == smap.value_on_subgrid(gmap.tri, v)

    def test_leaky_two_ball_needs_real_pumps(self):
        _, cover, smap = two_ball_map(n=1, leak=0.05)
        gmap, log = straighten(smap, cover)
        assert log.all_pass()
        changed = [v for v in gmap.tri.vertices()
                   if gmap.values[v] != smap.value_on_subgrid(gmap.tri, v)]
        assert changed, "leak must force at least one non-identity pump"

    def test_two_dimensional_benchmark(self):
        _, cover, smap = two_ball_map(n=2, leak=0.05)
        gmap, log = straighten(smap, cover)
        assert log.all_pass()
        stages = log.stage_counts()
        assert stages["track"]["fail"] == 0
        assert stages["linearize"]["fail"] == 0

    def test_spread_benchmark_names_the_failing_stage(self):
        _, cover, smap = spread_map()
        with pytest.raises(PipelineError) as err:
            straighten(smap, cover)
        assert err.value.stage == "estimate_lebesgue"

    def test_log_is_deterministic(self):
        _, cover, smap = two_ball_map(n=1, leak=0.05)
        _, log1 = straighten(smap, cover)
        _, log2 = straighten(smap, cover)
        assert log1.to_jsonl() == log2.to_jsonl()


class TestPrismRetract:
    def test_bottom_face_is_fixed(self):
        x = (0.2, 0.3, 0.5)
        assert prism_retract(x, 0.0) == (x, 0.0)

    def test_walls_are_fixed(self):
        x = (0.0, 0.4, 0.6)
        point, t = prism_retract(x, 0.7)
        assert point == pytest.approx(x, abs=1e-15)
        assert t == 0.7

    def test_top_center_projects_to_bottom_center(self):
        point, t = prism_retract((1 / 3, 1 / 3, 1 / 3), 1.0)
        assert point == pytest.approx((1 / 3, 1 / 3, 1 / 3), abs=1e-15)
        assert t == 0.0

    def test_idempotent(self, rng):
        for _ in range(200):
            k = int(rng.integers(1, 6))
            x = rng.dirichlet(np.ones(k))
            t = float(rng.uniform(0, 1))
            p1, t1 = prism_retract(x, t)
            p2, t2 = prism_retract(p1, t1)
            assert max(abs(a - b) for a, b in zip(p1, p2)) <= 1e-12
            assert abs(t1 - t2) <= 1e-12

    def test_lands_in_the_target_set(self, rng):
        for _ in range(200):
            k = int(rng.integers(2, 6))
            x = rng.dirichlet(np.ones(k))
            t = float(rng.uniform(0, 1))
            point, new_t = prism_retract(x, t)
            assert new_t == 0.0 or min(point) <= 1e-12
