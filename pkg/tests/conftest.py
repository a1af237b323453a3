import math

import numpy as np

from sweepcover.contour import Cycle


def trig_curve(rng: np.random.Generator, n: int = 400, degree: int = 3, scale: float = 5.0) -> np.ndarray:
    """Closed curve with random trigonometric-polynomial coordinates."""
    s = np.linspace(0, 2 * math.pi, n, endpoint=False) + rng.uniform(0, 2 * math.pi / n)
    x = np.zeros(n)
    y = np.zeros(n)
    for k in range(1, degree + 1):
        ax, bx, ay, by = rng.normal(size=4) * scale / k
        x += ax * np.cos(k * s) + bx * np.sin(k * s)
        y += ay * np.cos(k * s) + by * np.sin(k * s)
    return np.column_stack([x, y])


def figure_eight(n: int = 400) -> np.ndarray:
    """Lemniscate of Gerono; it crosses itself once, at the origin."""
    s = np.linspace(0, 2 * math.pi, n, endpoint=False) + 0.3 / n
    return np.column_stack([2 * np.sin(s), np.sin(s) * np.cos(s)])


def rectangle(w: float = 4.0, h: float = 2.0, ccw: bool = True, step: float = 0.25) -> Cycle:
    xs = np.arange(0, w, step)
    ys = np.arange(0, h, step)
    pts = np.concatenate([
        np.column_stack([xs, np.zeros_like(xs)]),
        np.column_stack([np.full_like(ys, w), ys]),
        np.column_stack([w - xs, np.full_like(xs, h)]),
        np.column_stack([np.zeros_like(ys), h - ys]),
    ])
    c = Cycle.from_points(pts)
    return c if ccw else c.reversed()


def circle_cycle(r: float = 1.0, n: int = 200, center=(0.0, 0.0)) -> Cycle:
    s = np.linspace(0, 2 * math.pi, n, endpoint=False)
    return Cycle.from_points(np.column_stack([center[0] + r * np.cos(s), center[1] + r * np.sin(s)]))


def write_trajectory(traj, path, full: bool = True) -> str:
    """Dump a trajectory as the CSV accepted by the command line tool."""
    cols = ["t", "x", "y", "psi"] + (["vx", "vy", "ax", "ay"] if full else [])
    acc = traj.second_rates(traj.t)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(cols) + "\n")
        for k, t in enumerate(traj.t):
            row = [t, *traj.pose[k]]
            if full:
                row += [traj.vel[k, 0], traj.vel[k, 1], acc[k, 0], acc[k, 1]]
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
    return str(path)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import VERDICTS
    except ImportError:
        return
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(VERDICTS):
            terminalreporter.write_line(VERDICTS[n])
