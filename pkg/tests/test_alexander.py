import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import circle_cycle, figure_eight, rectangle, trig_curve
from sweepcover import missions as m
from sweepcover.alexander import (alexander_numbering, build_cell_complex, complex_of,
                                  crossing_parity, winding_sets)
from sweepcover.contour import Cycle, build_contour
from sweepcover.intersect import AssumptionViolation, find_self_intersections, validate_assumptions
from sweepcover.oracle import OracleError, winding_angle_sum
from sweepcover.sweep_model import SensorConfig


def looping_complex():
    return complex_of(build_contour(m.looping_mission(), SensorConfig(2.0)))


def counts(cx):
    return len(cx.vertices), len(cx.edges), len(cx.faces)


class TestCellComplex:
    def test_rectangle(self):
        cx = build_cell_complex(rectangle(), [])
        assert counts(cx) == (0, 1, 2)
        assert sum(f.is_unbounded for f in cx.faces) == 1

    def test_figure_eight(self):
        c = Cycle.from_points(figure_eight())
        cx = build_cell_complex(c, find_self_intersections(c))
        assert counts(cx) == (1, 2, 3)

    def test_looping_mission(self):
        cx = looping_complex()
        assert counts(cx) == (4, 8, 6)
        assert cx.max_label == 2
        # the hole inside the loop is bounded but never swept
        assert sorted(f.winding for f in cx.faces) == [0, 0, 1, 1, 1, 2]

    def test_each_edge_borders_two_faces(self):
        cx = looping_complex()
        for e in cx.edges:
            assert e.left_face != e.right_face
        # every half-edge appears in exactly one face loop
        used = sorted(h for f in cx.faces for loop in f.boundary for h in loop)
        assert used == list(range(2 * len(cx.edges)))


class TestNumbering:
    def test_rectangle_ccw_and_cw(self):
        for ccw, inside in [(True, 1), (False, -1)]:
            cx = alexander_numbering(build_cell_complex(rectangle(ccw=ccw), []))
            by_kind = {f.is_unbounded: f.winding for f in cx.faces}
            assert by_kind == {True: 0, False: inside}

    def test_figure_eight_opposite_lobes(self):
        cx = complex_of(Cycle.from_points(figure_eight()))
        assert sorted(f.winding for f in cx.faces) == [-1, 0, 1]
        sets = winding_sets(cx)
        assert [w.level for w in sets] == [1]
        lobes = {f.winding: f.sample for f in cx.faces}
        assert sets[0].contains(lobes[1]) and not sets[0].contains(lobes[-1])
        neg = winding_sets(cx, negative=True)
        assert [w.level for w in neg] == [-1] and neg[0].contains(lobes[-1])

    def test_unlabeled_sets_rejected(self):
        with pytest.raises(ValueError):
            winding_sets(build_cell_complex(rectangle(), []))


class TestWindingSets:
    def test_rectangle_w1(self):
        sets = winding_sets(complex_of(rectangle()))
        assert len(sets) == 1
        assert sets[0].contains((2, 1)) and sets[0].contains((0, 1)) and not sets[0].contains((5, 1))

    def test_looping_nesting(self):
        cx = looping_complex()
        w1, w2 = winding_sets(cx)
        pts = np.random.default_rng(3).uniform([-2, -12], [16, 10], size=(4000, 2))
        in1, in2 = w1.contains_many(pts), w2.contains_many(pts)
        assert in2.any()
        assert not (in2 & ~in1).any()
        lens = next(f.sample for f in cx.faces if f.winding == 2)
        assert w2.contains(lens)

    def test_crossing_parity_square(self):
        a = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], float)
        b = np.roll(a, -1, axis=0)
        pts = np.array([[0.5, 0.5], [1.5, 0.5], [-0.5, 0.5], [0.5, 0.0]])
        assert crossing_parity(pts, a, b)[:3].tolist() == [True, False, False]


def _labeled(seed):
    c = Cycle.from_points(trig_curve(np.random.default_rng(seed), 300))
    try:
        xs = find_self_intersections(c)
    except AssumptionViolation:
        return None
    if not validate_assumptions(c, xs).ok:
        return None
    return alexander_numbering(build_cell_complex(c, xs))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_mobius_rule(seed):
    cx = _labeled(seed)
    if cx is None:
        return
    assert all(wl - wr == 1 for wl, wr in cx.edge_labels())
    assert cx.faces[cx.unbounded].winding == 0
    assert sum(f.is_unbounded for f in cx.faces) == 1
    v, e, f = counts(cx)
    assert v - e + f == 2 or (v == 0 and e == 1 and f == 2)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_face_labels_match_oracle(seed):
    cx = _labeled(seed)
    if cx is None:
        return
    for f in cx.faces:
        if f.is_unbounded or f.sample is None:
            continue
        try:
            assert f.winding == winding_angle_sum(cx.cycle, f.sample)
        except OracleError:
            pass


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000))
def test_nesting(seed):
    cx = _labeled(seed)
    if cx is None:
        return
    pts = np.random.default_rng(seed).uniform(-15, 15, size=(1500, 2))
    for sets in (winding_sets(cx), winding_sets(cx, negative=True)):
        inside = [w.contains_many(pts) for w in sets]
        for outer, inner in zip(inside, inside[1:]):
            assert not (inner & ~outer).any()


def test_circle_sample_inside():
    cx = complex_of(circle_cycle(2.0, center=(3, 4)))
    inner = next(f for f in cx.faces if not f.is_unbounded)
    assert np.hypot(inner.sample[0] - 3, inner.sample[1] - 4) < 2.0
