import pytest

from conftest import circle_cycle, figure_eight, rectangle
from sweepcover import missions as m
from sweepcover.oracle import KernelCounter, OracleError, kernel_count, winding_angle_sum
from sweepcover.sweep_model import SensorConfig


def test_angle_sum_rectangle():
    assert winding_angle_sum(rectangle(), (2, 1)) == 1
    assert winding_angle_sum(rectangle(ccw=False), (2, 1)) == -1
    assert winding_angle_sum(rectangle(), (7, 1)) == 0


def test_angle_sum_figure_eight():
    assert {winding_angle_sum(figure_eight(), p) for p in [(1, 0), (-1, 0)]} == {1, -1}


def test_angle_sum_rejects_points_on_curve():
    with pytest.raises(OracleError, match="point on curve"):
        winding_angle_sum(circle_cycle(1.0), (1.0, 0.0))


def test_kernel_count_line():
    traj = m.straight_line()
    cfg = SensorConfig(1.0)
    assert kernel_count(traj, cfg, (5, 0.5)) == 1
    assert kernel_count(traj, cfg, (5, 2.0)) == 0
    with pytest.raises(OracleError, match="near boundary"):
        kernel_count(traj, cfg, (5, 1.0))


def test_kernel_count_backward_point():
    assert KernelCounter(m.backward_sweep_mission(), SensorConfig(4.0)).count((8.0, 1.5)) == 3


def test_kernel_grid_floor():
    with pytest.raises(OracleError):
        KernelCounter(m.straight_line(), SensorConfig(1.0), grid_n=10)
