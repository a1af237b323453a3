import math

import numpy as np
import pytest

from sweepcover import missions as m
from sweepcover.contour import build_contour
from sweepcover.core_geom import Box2, Vec2
from sweepcover.coverage import CoverageValue, build_coverage_model
from sweepcover.intersect import AssumptionViolation
from sweepcover.sweep_model import PoseTrajectory, SensorConfig
from sweepcover.uncertain import (ColinearCrossingError, Tube, _capsules_meet_box, build_contour_tube,
                                  build_uncertain, classify_uncertain, find_uncertain_intersections,
                                  sample_realization, thick_characteristic, thick_winding_sets,
                                  uncertain_coverage)

LOOP_CFG = SensorConfig(2.0)


def loop_tube(r_pos=0.05, r_vel=0.02):
    traj = m.looping_mission()
    times = np.arange(traj.t_start, traj.t_end, 0.5)
    times = np.append(times, traj.t_end) if times[-1] < traj.t_end else times
    return Tube.from_trajectory(traj, r_pos, r_vel, times)


@pytest.fixture(scope="module")
def loop_ct():
    tube = loop_tube()
    return tube, build_contour_tube(tube, LOOP_CFG)


@pytest.fixture(scope="module")
def line_ct():
    traj = m.straight_line(n=21)
    tube = Tube.from_trajectory(traj, 0.1, 0.0)
    return build_contour_tube(tube, SensorConfig(1.0))


def figure_eight_trajectory(n: int = 801) -> PoseTrajectory:
    s = np.linspace(-0.6, math.pi + 0.6, n)
    x, y = 2 * np.sin(s), np.sin(s) * np.cos(s)
    vx, vy = 2 * np.cos(s), np.cos(2 * s)
    ax, ay = -2 * np.sin(s), -2 * np.sin(2 * s)
    psi = np.unwrap(np.arctan2(vy, vx))
    vpsi = (vx * ay - vy * ax) / (vx * vx + vy * vy)
    return PoseTrajectory(s, np.column_stack([x, y, psi]), np.column_stack([vx, vy, vpsi]))


class TestTube:
    def test_validation(self):
        t = np.array([0.0, 1.0])
        z = np.zeros((2, 2))
        v = np.ones((2, 2))
        with pytest.raises(ValueError, match="empty tube slice"):
            Tube(t, z + 1, z, v, v)
        with pytest.raises(ValueError, match="time order"):
            Tube(np.array([1.0, 0.0]), z, z, v, v)
        with pytest.raises(ValueError, match="inconsistent with the velocity bounds"):
            Tube(t, np.array([[0, 0], [50, 0]]), np.array([[0, 0], [50, 0]]), v, v)

    def test_heading_indeterminate(self):
        t = np.array([0.0, 1.0])
        z = np.zeros((2, 2))
        with pytest.raises(AssumptionViolation, match="heading indeterminate"):
            build_contour_tube(Tube(t, z, z, z - 0.1, z + 0.1), LOOP_CFG)

    def test_split_shares_cut_slice(self):
        tube = loop_tube()
        parts = tube.split([10.0])
        assert len(parts) == 2
        assert parts[0].t[-1] == parts[1].t[0] == 10.0
        assert parts[0].t[0] == tube.t[0] and parts[1].t[-1] == tube.t[-1]


class TestContourTube:
    def test_degenerate_reduces_to_certain(self):
        traj = m.looping_mission()
        ct = build_contour_tube(Tube.from_trajectory(traj, 0.0, 0.0), LOOP_CFG)
        assert ct.max_radius <= 2 * ct.tol
        model = build_coverage_model(traj, LOOP_CFG)
        pts = np.random.default_rng(2).uniform([-2, -12], [16, 10], size=(300, 2))
        certain = model.measure_many(pts)
        for p, c in zip(pts, certain):
            v = uncertain_coverage(ct, (), p)
            assert v.is_singleton and v.lo == c

    def test_line_inflated_rectangle(self, line_ct):
        # straight edges grow by the position box plus a small chord margin
        r = line_ct.radius
        assert r.min() >= 0.1 and np.median(r) <= 0.11
        assert uncertain_coverage(line_ct, (), (5, 0.5)) == CoverageValue(1, 1)
        assert uncertain_coverage(line_ct, (), (5, 1.05)) == CoverageValue(0, 1)
        assert uncertain_coverage(line_ct, (), (5, -0.05)) == CoverageValue(0, 1)
        assert uncertain_coverage(line_ct, (), (5, 1.2)) == CoverageValue(0, 0)

    def test_box_chain_encloses_realizations(self, loop_ct):
        tube, ct = loop_ct
        rng = np.random.default_rng(4)
        a, b = ct.cycle.segments
        for _ in range(3):
            real = sample_realization(tube, rng)
            pts = build_contour(real, LOOP_CFG).points
            # every realized contour point lies in the region swept along the reference
            for p in pts[::7]:
                assert _capsules_meet_box(a, b, ct.radius, Box2.from_bounds(p[0], p[0], p[1], p[1])).any()


class TestVertices:
    def test_figure_eight_degenerate(self):
        traj = figure_eight_trajectory()
        tube = Tube.from_trajectory(traj, 0.0, 0.0, times=traj.t[::8])
        ct = build_contour_tube(tube, SensorConfig(0.05))
        vs = find_uncertain_intersections(ct, tube)
        assert len(vs) == 1
        # velocities at the crossing are (2, 1) then (-2, 1)
        assert vs[0].update == 1
        assert vs[0].region.contains_point(Vec2(0.0, 0.0))

    def test_perpendicular_crossing(self, loop_ct):
        tube, ct = loop_ct
        vs = find_uncertain_intersections(ct, tube)
        assert len(vs) == 1
        assert vs[0].update in (-1, 1)

    def test_shallow_crossing_rejected_then_split(self):
        traj = m.shallow_crossing_mission()
        times = np.arange(traj.t_start, traj.t_end, 0.5)
        tube = Tube.from_trajectory(traj, 0.05, 0.1, np.append(times, traj.t_end))
        cfg = SensorConfig(1.0)
        with pytest.raises(ColinearCrossingError, match="colinear uncertain crossing"):
            build_uncertain(tube, cfg)
        cts, vs = build_uncertain(tube, cfg, cuts=[43.5])
        assert len(cts) == 2 and all(v == [] for v in vs)


class TestThickSets:
    def test_characteristic_zones(self, line_ct):
        (w1,) = thick_winding_sets(line_ct, roi=Box2.from_bounds(-1, 12, -1, 2), epsilon=0.05)
        inner = thick_characteristic(w1, Box2.from_bounds(4, 5, 0.3, 0.6))
        assert (inner.lo, inner.hi) == (1, 1)
        assert thick_characteristic(w1, (5, 0.5)) == inner
        far = thick_characteristic(w1, Box2.from_bounds(4, 5, 1.5, 1.8))
        assert (far.lo, far.hi) == (0, 0)
        edge = thick_characteristic(w1, Box2.from_bounds(4, 5, 0.9, 1.1))
        assert (edge.lo, edge.hi) == (0, 1)

    def test_lower_in_upper_and_nested(self, loop_ct):
        _, ct = loop_ct
        sets = thick_winding_sets(ct, epsilon=0.2)
        assert [w.level for w in sets] == [1, 2]
        pts = np.random.default_rng(8).uniform([-2, -12], [16, 10], size=(400, 2))
        for p in pts:
            box = Box2.from_bounds(p[0], p[0], p[1], p[1])
            ins = [(w.contains_lower(box), w.meets_upper(box)) for w in sets]
            for lower, upper in ins:
                assert upper or not lower
            (l1, u1), (l2, u2) = ins
            assert l1 or not l2
            assert u1 or not u2

    def test_clear_zone_of_w2(self, loop_ct):
        tube, ct = loop_ct
        vs = find_uncertain_intersections(ct, tube)
        assert uncertain_coverage(ct, vs, (8.3, 1.0)) == CoverageValue(2, 2)


def test_enclosure_and_sandwich(loop_ct):
    tube, ct = loop_ct
    vs = find_uncertain_intersections(ct, tube)
    sets = thick_winding_sets(ct, vs, epsilon=0.2)
    rng = np.random.default_rng(12)
    pts = np.random.default_rng(13).uniform([-2, -12], [16, 10], size=(300, 2))
    ucov = [uncertain_coverage(ct, vs, p) for p in pts]
    for _ in range(4):
        real = sample_realization(tube, rng)
        cov = build_coverage_model(real, LOOP_CFG).measure_many(pts)
        for p, c, u in zip(pts, cov, ucov):
            assert u.contains(int(c))
            box = Box2.from_bounds(p[0], p[0], p[1], p[1])
            for w in sets:
                inside = c >= w.level
                if w.contains_lower(box):
                    assert inside
                if inside:
                    assert w.meets_upper(box)


def test_monotone_under_inflation(loop_ct):
    tube, ct = loop_ct
    big = build_contour_tube(tube.inflated(0.05, 0.01), LOOP_CFG)
    pts = np.random.default_rng(21).uniform([-2, -12], [16, 10], size=(300, 2))
    for p in pts:
        assert uncertain_coverage(big, (), p).contains_value(uncertain_coverage(ct, (), p))


def test_uncertain_paving_encloses_certain(loop_ct):
    _, ct = loop_ct
    roi = Box2.from_bounds(-2, 16, -12, 10)
    pav = classify_uncertain([ct], roi, 0.25)
    model = build_coverage_model(ct.reference, LOOP_CFG)
    pts = np.random.default_rng(30).uniform([-2, -12], [16, 10], size=(300, 2))
    for p, c in zip(pts, model.measure_many(pts)):
        assert pav.value_at(p).contains(int(c))
