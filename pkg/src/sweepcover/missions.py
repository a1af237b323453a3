"""Synthetic missions used by the tests, the acceptance suite and the CLI demo."""
from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .sweep_model import PoseTrajectory


def smoothstep(x):
    x = np.clip(x, 0.0, 1.0)
    return x * x * x * (x * (6 * x - 15) + 10)


def smoothstep_rate(x):
    inside = (x > 0) & (x < 1)
    return np.where(inside, 30 * x * x * (x - 1) ** 2, 0.0)


def from_controls(speed: Callable, yaw_rate: Callable, t_end: float, n: int,
                  start=(0.0, 0.0, 0.0), speed_rate: Callable | None = None,
                  yaw_accel: Callable | None = None) -> PoseTrajectory:
    """Integrate a unicycle driven by speed(t) and yaw_rate(t) on [0, t_end]."""

    def rhs(t, s):
        v = speed(t)
        return [v * math.cos(s[2]), v * math.sin(s[2]), yaw_rate(t)]

    t = np.linspace(0.0, t_end, n)
    sol = solve_ivp(rhs, (0.0, t_end), list(start), t_eval=t, rtol=1e-11, atol=1e-12,
                    method="DOP853")
    x, y, psi = sol.y
    v = np.array([speed(tk) for tk in t])
    w = np.array([yaw_rate(tk) for tk in t])
    dv = np.array([speed_rate(tk) for tk in t]) if speed_rate else np.gradient(v, t)
    dw = np.array([yaw_accel(tk) for tk in t]) if yaw_accel else np.gradient(w, t)
    c, s = np.cos(psi), np.sin(psi)
    vel = np.column_stack([v * c, v * s, w])
    acc = np.column_stack([dv * c - v * w * s, dv * s + v * w * c, dw])
    return PoseTrajectory(t, np.column_stack([x, y, psi]), vel, acc)


def straight_line(length: float = 10.0, speed: float = 1.0, n: int = 11) -> PoseTrajectory:
    """x(t) = (speed * t, 0), heading east."""
    t = np.linspace(0.0, length / speed, n)
    pose = np.column_stack([speed * t, np.zeros(n), np.zeros(n)])
    vel = np.tile([speed, 0.0, 0.0], (n, 1))
    return PoseTrajectory(t, pose, vel, np.zeros((n, 3)))


def circle(radius: float = 5.0, turns: float = 1.0, start_angle: float = 0.0,
           shrink: float = 0.0, n_per_turn: int = 400) -> PoseTrajectory:
    """Counterclockwise circle at unit angular rate, heading tangent to it.

    ``shrink`` reduces the radius linearly over the whole mission, which turns
    several loops into a non-overlapping spiral.
    """
    T = 2 * math.pi * turns
    n = max(8, int(n_per_turn * turns) + 1)
    t = np.linspace(0.0, T, n)
    k = shrink / T
    r = radius - k * t
    th = start_angle + t
    x, y = r * np.cos(th), r * np.sin(th)
    vx = -k * np.cos(th) - r * np.sin(th)
    vy = -k * np.sin(th) + r * np.cos(th)
    psi = np.unwrap(np.arctan2(vy, vx))
    # heading rate of the velocity direction for r' = -k, th' = 1
    vpsi = (r * r + 2 * k * k) / (r * r + k * k)
    ax = 2 * k * np.sin(th) - r * np.cos(th)
    ay = -2 * k * np.cos(th) - r * np.sin(th)
    vel = np.column_stack([vx, vy, vpsi])
    acc = np.column_stack([ax, ay, np.gradient(vpsi, t)])
    return PoseTrajectory(t, np.column_stack([x, y, psi]), vel, acc)


def turn_profile(t0: float, duration: float, angle: float, ramp: float):
    """Yaw rate turning by ``angle`` over [t0, t0 + duration] with smooth ramps."""
    plateau = duration - ramp
    rate = angle / plateau

    def w(t):
        up = smoothstep((t - t0) / ramp)
        down = smoothstep((t - (t0 + duration - ramp)) / ramp)
        return rate * (up - down)

    def dw(t):
        return rate * (smoothstep_rate((t - t0) / ramp)
                       - smoothstep_rate((t - (t0 + duration - ramp)) / ramp)) / ramp

    return w, dw


def piecewise_turns(turns, t_end, speed=1.0, n=None, start=(0.0, 0.0, 0.0)) -> PoseTrajectory:
    """Unit-speed mission made of straight legs and smooth turns.

    ``turns`` is a list of ``(t0, duration, angle, ramp)``.
    """
    profiles = [turn_profile(*tr) for tr in turns]

    def w(t):
        return sum(p[0](t) for p in profiles)

    def dw(t):
        return sum(p[1](t) for p in profiles)

    n = n or int(40 * t_end) + 1
    return from_controls(lambda t: speed, w, t_end, n, start=start,
                         speed_rate=lambda t: 0.0, yaw_accel=dw)


def looping_mission(n: int | None = None) -> PoseTrajectory:
    """East leg, a 270 degree left loop, then a south leg crossing the first pass.

    With a 2 m left sensor the contour has four transversal self-intersections,
    six faces and a doubly covered overlap.
    """
    radius = 3.0
    ramp = 0.6
    # plateau length chosen so the turn totals 3*pi/2 of heading change
    angle = 1.5 * math.pi
    duration = angle * radius + ramp
    t_turn = 10.0
    return piecewise_turns([(t_turn, duration, angle, ramp)], t_end=t_turn + duration + 8.0, n=n)


def backward_sweep_mission(n: int | None = None) -> PoseTrajectory:
    """East leg, tight left U-turn (radius < range) and a return leg west.

    With a 4 m left sensor the far part of the beam sweeps backwards during the
    turn, so some points are seen forward, backward and forward again.
    """
    radius = 1.0
    ramp = 0.5
    angle = math.pi
    duration = angle * radius + ramp
    t_turn = 10.0
    return piecewise_turns([(t_turn, duration, angle, ramp)], t_end=t_turn + duration + 6.5, n=n)


def _bulb_shift(a: float, radius: float, ramp: float) -> float:
    """Lateral shift of a smoothed bulb turn at unit speed, by quadrature."""
    turns, t = [], 0.0
    for ang in (-a, math.pi + 2 * a, -a):
        dur = abs(ang) * radius + ramp
        turns.append(turn_profile(t, dur, ang, ramp)[0])
        t += dur
    ts = np.linspace(0.0, t, 4001)
    w = sum(f(ts) for f in turns)
    psi = np.concatenate([[0.0], np.cumsum(0.5 * (w[1:] + w[:-1]) * np.diff(ts))])
    s = np.sin(psi)
    return float(np.sum(0.5 * (s[1:] + s[:-1]) * np.diff(ts)))


def _bulb_angle(radius: float, spacing: float, ramp: float) -> float:
    # arcs only: shift = 2 r (2 cos a - 1); the ramps shrink it a little
    lo, hi = 0.0, math.pi / 2
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        if _bulb_shift(mid, radius, ramp) > spacing:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def lawnmower(legs: int = 3, leg_length: float = 12.0, spacing: float = 3.0,
              ramp: float = 0.4, n: int | None = None, radius: float | None = None) -> PoseTrajectory:
    """Boustrophedon of ``legs`` east/west legs joined by alternating turns.

    Without ``radius`` the turns are half circles of diameter ``spacing``.
    With a ``radius`` larger than half the spacing each turn is a bulb turn:
    away from the next leg by an angle a, around by pi + 2a, and back by a,
    all at that radius. This keeps the turn radius above a given sensor range.
    """
    turns = []
    t = leg_length
    for k in range(legs - 1):
        sign = 1.0 if k % 2 == 0 else -1.0
        if radius is None or 2 * radius <= spacing:
            r = spacing / 2
            dur = math.pi * r + ramp
            turns.append((t, dur, sign * math.pi, ramp))
            t += dur + leg_length
            continue
        a = _bulb_angle(radius, spacing, ramp)
        for ang in (-a, math.pi + 2 * a, -a):
            dur = abs(ang) * radius + ramp
            turns.append((t, dur, sign * ang, ramp))
            t += dur
        t += leg_length
    return piecewise_turns(turns, t_end=t, n=n)


def random_smooth_mission(rng: np.random.Generator, t_end: float = 25.0, max_rate: float = 0.3,
                          n_modes: int = 4, n: int | None = None) -> PoseTrajectory:
    """Unit-speed mission whose yaw rate is a random smooth band-limited signal."""
    amps = rng.normal(size=n_modes)
    amps *= max_rate / max(1e-9, np.abs(amps).sum())
    freqs = rng.uniform(0.05, 0.5, size=n_modes)
    phases = rng.uniform(0, 2 * math.pi, size=n_modes)
    bias = rng.uniform(-0.5, 0.5) * max_rate

    def w(t):
        return bias + float(np.sum(amps * np.sin(freqs * t + phases))) * (1 - abs(bias) / max_rate)

    def dw(t):
        return float(np.sum(amps * freqs * np.cos(freqs * t + phases))) * (1 - abs(bias) / max_rate)

    start = (float(rng.uniform(-1, 1)), float(rng.uniform(-1, 1)), float(rng.uniform(0, 2 * math.pi)))
    n = n or int(20 * t_end) + 1
    return from_controls(lambda t: 1.0, w, t_end, n, start=start, speed_rate=lambda t: 0.0,
                         yaw_accel=dw)


def shallow_crossing_mission(angle: float = 0.15, n: int | None = None) -> PoseTrajectory:
    """Long east leg, a left U-turn overshooting by ``angle``, and a return leg.

    The return leg crosses the first leg at the small angle ``angle``, which a
    modest velocity uncertainty can no longer separate from a tangency.
    """
    radius = 2.0
    ramp = 0.5
    turn = math.pi + angle
    duration = turn * radius + ramp
    t_turn = 40.0
    return piecewise_turns([(t_turn, duration, turn, ramp)], t_end=t_turn + duration + 35.0, n=n,
                           start=(-30.0, 0.0, 0.0))


def two_loop_mission(radius: float = 5.0, n_per_turn: int = 400) -> PoseTrajectory:
    """Two counterclockwise turns around the origin, starting at the top.

    The loop runs slightly past two turns and spirals inward by 1 cm so the
    start and end beams stay transversal instead of lying on top of each other.
    """
    return circle(radius, turns=2.01, start_angle=math.pi / 2, shrink=0.01, n_per_turn=n_per_turn)
