import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sweepcover import missions as m
from sweepcover.sweep_model import (Pose, PoseTrajectory, SensorConfig, WaterfallPoint,
                                    decompose_signed_regions, jacobian_det, sweep_point,
                                    visible_segment)


def ends(s):
    return (s.a.x, s.a.y, s.b.x, s.b.y)


LINE = m.straight_line()
CIRCLE = m.circle(5.0)


class TestVisibleSegment:
    def test_left_heading_east(self):
        assert ends(visible_segment(Pose(3, 0, 0), SensorConfig(1.0))) == pytest.approx((3, 0, 3, 1))

    def test_rotated(self):
        assert ends(visible_segment(Pose(0, 0, math.pi / 2), SensorConfig(2.0))) == pytest.approx((0, 0, -2, 0))

    def test_right(self):
        assert ends(visible_segment(Pose(1, 1, 0), SensorConfig(1.0, "right"))) == pytest.approx((1, 1, 1, 0))

    def test_both_spans_two_sides(self):
        assert ends(visible_segment(Pose(0, 0, 0), SensorConfig(1.0, "both"))) == pytest.approx((0, -1, 0, 1))


class TestSweepPoint:
    def test_line(self):
        cfg = SensorConfig(1.0)
        p = sweep_point(WaterfallPoint(0.5, 3.0), LINE, cfg)
        assert (p.x, p.y) == pytest.approx((3.0, 0.5))
        p = sweep_point(WaterfallPoint(0.0, 7.0), LINE, cfg)
        assert (p.x, p.y) == pytest.approx((7.0, 0.0))

    def test_circle_inward(self):
        p = sweep_point(WaterfallPoint(2.0, 0.0), CIRCLE, SensorConfig(2.0))
        assert (p.x, p.y) == pytest.approx((3.0, 0.0), abs=1e-9)

    def test_out_of_bounds(self):
        with pytest.raises(ValueError, match="waterfall out of bounds"):
            sweep_point(WaterfallPoint(1.5, 1.0), LINE, SensorConfig(1.0))
        with pytest.raises(ValueError, match="waterfall out of bounds"):
            sweep_point(WaterfallPoint(0.5, 11.0), LINE, SensorConfig(1.0))

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0, 2), st.floats(0, 2 * math.pi), st.sampled_from(["left", "right", "both"]))
    def test_offset_length_and_origin(self, u, t, side):
        cfg = SensorConfig(2.0, side)
        u = min(u, cfg.u_max)
        p = sweep_point(WaterfallPoint(u, t), CIRCLE, cfg)
        q = sweep_point(WaterfallPoint(cfg.beam_coordinate(0.0), t), CIRCLE, cfg)
        x, y = CIRCLE.position(t)
        assert (q.x, q.y) == pytest.approx((x, y), abs=1e-9)
        assert math.hypot(p.x - q.x, p.y - q.y) == pytest.approx(abs(cfg.lateral(u)), abs=1e-9)


class TestJacobian:
    def test_line_is_one(self):
        for u, t in [(0, 0), (0.5, 3), (1, 10)]:
            assert jacobian_det(WaterfallPoint(u, t), LINE, SensorConfig(1.0)) == pytest.approx(1.0)

    def test_stationary_is_zero(self):
        t = np.linspace(0, 1, 5)
        traj = PoseTrajectory(t, np.zeros((5, 3)), np.zeros((5, 3)))
        assert jacobian_det(WaterfallPoint(0.3, 0.5), traj, SensorConfig(1.0)) == 0.0

    def test_circle_inner_edge_slower(self):
        cfg = SensorConfig(2.0)
        d2 = jacobian_det(WaterfallPoint(2.0, 1.0), CIRCLE, cfg)
        d0 = jacobian_det(WaterfallPoint(0.0, 1.0), CIRCLE, cfg)
        assert 0 < d2 < d0
        assert d2 == pytest.approx(3.0, rel=1e-6)

    @settings(max_examples=60, deadline=None)
    @given(st.floats(0.1, 10), st.floats(0, 4), st.floats(0, 1))
    def test_sign_invariant_under_time_scaling(self, c, u, s):
        traj = m.backward_sweep_mission()
        cfg = SensorConfig(4.0)
        scaled = traj.time_scaled(c)
        t = traj.t_start + s * traj.duration
        d = jacobian_det(WaterfallPoint(u, t), traj, cfg)
        ds = jacobian_det(WaterfallPoint(u, c * t), scaled, cfg)
        if abs(d) > 1e-9:
            assert np.sign(d) == np.sign(ds)


class TestDecomposition:
    def test_line_all_positive(self):
        dec = decompose_signed_regions(LINE, SensorConfig(1.0))
        assert dec.all_positive and len(dec.s_plus) == 1
        assert dec.s_plus[0].bounds == (0.0, 1.0, 0.0, 10.0)

    def test_reversed_line_all_negative(self):
        dec = decompose_signed_regions(LINE.time_reversed(), SensorConfig(1.0))
        assert dec.all_negative and len(dec.s_minus) == 1

    def test_backward_sweep_has_both_signs(self):
        dec = decompose_signed_regions(m.backward_sweep_mission(), SensorConfig(4.0))
        assert dec.s_plus and dec.s_minus

    def test_resolution_must_be_positive(self):
        with pytest.raises(ValueError):
            decompose_signed_regions(LINE, SensorConfig(1.0), 0.0)

    @pytest.mark.parametrize("mission,cfg", [
        (m.backward_sweep_mission, SensorConfig(4.0)),
        (m.looping_mission, SensorConfig(2.0)),
        (lambda: m.lawnmower(), SensorConfig(2.0, "both")),
    ])
    def test_cells_cover_and_signs_hold(self, mission, cfg):
        traj = mission()
        dec = decompose_signed_regions(traj, cfg)
        cells = dec.s_plus + dec.s_minus + dec.unresolved
        total = sum(c.area for c in cells)
        assert total == pytest.approx(cfg.u_max * traj.duration, rel=1e-9)
        rng = np.random.default_rng(0)
        for sign, group in ((1, dec.s_plus), (-1, dec.s_minus)):
            for c in group[:200]:
                for _ in range(3):
                    u = rng.uniform(c.x.lo, c.x.hi)
                    t = rng.uniform(c.y.lo, c.y.hi)
                    assert sign * jacobian_det(WaterfallPoint(u, t), traj, cfg) > 0


class TestTrajectory:
    def test_time_order(self):
        t = np.array([0.0, 1.0, 1.0])
        with pytest.raises(ValueError, match="time order"):
            PoseTrajectory(t, np.zeros((3, 3)), np.zeros((3, 3)))

    def test_too_short(self):
        with pytest.raises(ValueError, match="too short"):
            PoseTrajectory(np.array([0.0]), np.zeros((1, 3)), np.zeros((1, 3)))

    def test_inconsistent_velocity(self):
        t = np.linspace(0, 4, 5)
        pose = np.column_stack([t, 0 * t, 0 * t])
        vel = np.tile([5.0, 0.0, 0.0], (5, 1))
        with pytest.raises(ValueError, match="inconsistent"):
            PoseTrajectory(t, pose, vel)

    def test_interpolates_samples(self):
        traj = m.looping_mission()
        k = len(traj.t) // 3
        assert traj.state(traj.t[k]) == pytest.approx(traj.pose[k])
