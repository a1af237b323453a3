"""Robot pose trajectories and the line-sweep sensor model.

A point of the waterfall space is ``(u, t)``: ``u`` is the distance along the
beam measured from its start, ``t`` the time. Internally the beam is handled
through the signed lateral offset ``lam`` from the robot, positive to the left
of the heading, so that

    f(lam, t) = p(t) + lam * n(psi(t)),    n(psi) = (-sin psi, cos psi).

For a left sensor ``lam = u``, for a right sensor ``lam = -u`` and for a
two-sided sensor spanning both sides ``lam = u - L``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .core_geom import Box2, Interval, Segment2, Vec2, box_bisect

Side = Literal["left", "right", "both"]


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    psi: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.psi)):
            raise ValueError("pose components must be finite")


@dataclass(frozen=True)
class SensorConfig:
    range_L: float
    side: Side = "left"

    def __post_init__(self):
        if not self.range_L > 0:
            raise ValueError("range_L must be > 0")
        if self.side not in ("left", "right", "both"):
            raise ValueError(f"unknown sensor side {self.side!r}")

    @property
    def u_max(self) -> float:
        return 2.0 * self.range_L if self.side == "both" else self.range_L

    @property
    def lam_range(self) -> tuple[float, float]:
        L = self.range_L
        return {"left": (0.0, L), "right": (-L, 0.0), "both": (-L, L)}[self.side]

    def lateral(self, u):
        """Map the beam coordinate u to the signed lateral offset."""
        if self.side == "left":
            return u
        if self.side == "right":
            return -u
        return u - self.range_L

    def beam_coordinate(self, lam):
        if self.side == "left":
            return lam
        if self.side == "right":
            return -lam
        return lam + self.range_L


@dataclass(frozen=True)
class WaterfallPoint:
    u: float
    t: float


class PoseTrajectory:
    """Time-sampled poses with velocities and accelerations.

    ``vel`` and ``acc`` are ``(n, 3)`` arrays ordered ``(x, y, psi)``. Poses
    between samples are reconstructed with cubic Hermite interpolation of the
    three components using the stored first derivatives.
    """

    def __init__(self, t, pose, vel, acc=None, *, consistency_tol: Optional[float] = 0.5,
                 report: Sequence[str] = ()):
        t = np.asarray(t, dtype=float)
        pose = np.asarray(pose, dtype=float).reshape(-1, 3)
        vel = np.asarray(vel, dtype=float).reshape(-1, 3)
        if len(t) < 2:
            raise ValueError("too short: a trajectory needs at least 2 samples")
        if not (len(t) == len(pose) == len(vel)):
            raise ValueError("sample arrays have mismatched lengths")
        if not np.all(np.diff(t) > 0):
            k = int(np.argmax(np.diff(t) <= 0)) + 1
            raise ValueError(f"time order: sample {k} is not after sample {k - 1}")
        for name, arr in (("t", t), ("pose", pose), ("vel", vel)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"invalid value in {name}")
        if acc is None:
            acc = np.gradient(vel, t, axis=0)
        acc = np.asarray(acc, dtype=float).reshape(-1, 3)
        if len(acc) != len(t) or not np.all(np.isfinite(acc)):
            raise ValueError("invalid value in acc")
        pose = pose.copy()
        pose[:, 2] = np.unwrap(pose[:, 2])
        self.t = t
        self.pose = pose
        self.vel = vel
        self.acc = acc
        self.report = list(report)
        for arr in (self.t, self.pose, self.vel, self.acc):
            arr.setflags(write=False)
        if consistency_tol is not None and len(t) >= 3:
            self._check_consistency(consistency_tol)
        self._spline = CubicHermiteSpline(t, pose, vel, axis=0)
        self._d1 = self._spline.derivative(1)
        self._d2 = self._spline.derivative(2)

    def _check_consistency(self, rel_tol: float) -> None:
        fd = np.gradient(self.pose, self.t, axis=0)
        scale = np.maximum(1.0, np.abs(self.vel)).max(axis=1)
        err = np.abs(fd - self.vel).max(axis=1) / scale
        # edges of a finite-difference stencil are one-sided, skip them
        bad = np.nonzero(err[1:-1] > rel_tol)[0]
        if len(bad):
            k = int(bad[0]) + 1
            raise ValueError(f"velocity inconsistent with poses at sample {k} "
                             f"(relative error {err[k]:.3g})")

    @classmethod
    def from_arrays(cls, t, x, y, psi, vx=None, vy=None, vpsi=None, **kw) -> "PoseTrajectory":
        t = np.asarray(t, float)
        pose = np.column_stack([x, y, np.unwrap(np.asarray(psi, float))])
        vel = np.gradient(pose, t, axis=0)
        if vx is not None:
            vel[:, 0] = vx
        if vy is not None:
            vel[:, 1] = vy
        if vpsi is not None:
            vel[:, 2] = vpsi
        return cls(t, pose, vel, **kw)

    @property
    def t_start(self) -> float:
        return float(self.t[0])

    @property
    def t_end(self) -> float:
        return float(self.t[-1])

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start

    def __len__(self) -> int:
        return len(self.t)

    def state(self, t):
        return self._spline(t)

    def rates(self, t):
        return self._d1(t)

    def second_rates(self, t):
        return self._d2(t)

    def position(self, t):
        return self._spline(t)[..., :2]

    def pose_at(self, t: float) -> Pose:
        x, y, psi = self._spline(t)
        return Pose(float(x), float(y), float(psi))

    def time_reversed(self) -> "PoseTrajectory":
        """Same poses visited backwards in time (the robot drives in reverse)."""
        t = self.t_end + self.t_start - self.t[::-1]
        return PoseTrajectory(t, self.pose[::-1], -self.vel[::-1], self.acc[::-1])

    def time_scaled(self, c: float) -> "PoseTrajectory":
        return PoseTrajectory(self.t * c, self.pose, self.vel / c, self.acc / (c * c))

    def window(self, t0: float, t1: float) -> "PoseTrajectory":
        """Restriction to ``[t0, t1]``, with the cut points added as samples."""
        if not (self.t_start <= t0 < t1 <= self.t_end):
            raise ValueError("window outside trajectory span")
        inner = (self.t > t0) & (self.t < t1)
        t = np.concatenate([[t0], self.t[inner], [t1]])
        return PoseTrajectory(t, self.state(t), self.rates(t), self.second_rates(t),
                              consistency_tol=None)


# ---------------------------------------------------------------------------
# sweep function

def _normal(psi):
    return np.stack([-np.sin(psi), np.cos(psi)], axis=-1)


def sweep_lam(traj: PoseTrajectory, lam, t) -> np.ndarray:
    """Vectorised f(lam, t); lam and t broadcast together."""
    lam = np.asarray(lam, float)
    t = np.asarray(t, float)
    lam, t = np.broadcast_arrays(lam, t)
    s = traj.state(t.ravel())
    out = s[:, :2] + lam.ravel()[:, None] * _normal(s[:, 2])
    return out.reshape(lam.shape + (2,))


def sweep_tangent_t(traj: PoseTrajectory, lam, t) -> np.ndarray:
    """Partial derivative of f(lam, t) with respect to time."""
    lam = np.asarray(lam, float)
    t = np.asarray(t, float)
    lam, t = np.broadcast_arrays(lam, t)
    s = traj.state(t.ravel())
    r = traj.rates(t.ravel())
    h = np.stack([np.cos(s[:, 2]), np.sin(s[:, 2])], axis=-1)
    out = r[:, :2] - (lam.ravel() * r[:, 2])[:, None] * h
    return out.reshape(lam.shape + (2,))


def det_coefficients(traj: PoseTrajectory, t):
    """Return ``(a, b)`` with det = a - lam * b at time(s) t.

    ``a`` is the forward speed along the heading, ``b`` the yaw rate.
    """
    t = np.asarray(t, float)
    s = traj.state(t)
    r = traj.rates(t)
    psi = s[..., 2]
    a = r[..., 0] * np.cos(psi) + r[..., 1] * np.sin(psi)
    return a, r[..., 2]


def visible_segment(pose: Pose, cfg: SensorConfig) -> Segment2:
    lam0, lam1 = cfg.lateral(0.0), cfg.lateral(cfg.u_max)
    n = (-math.sin(pose.psi), math.cos(pose.psi))
    p = Vec2(pose.x, pose.y)
    return Segment2(p + Vec2(*n) * lam0, p + Vec2(*n) * lam1)


def _check_bounds(w: WaterfallPoint, traj: PoseTrajectory, cfg: SensorConfig) -> None:
    if not (0.0 <= w.u <= cfg.u_max and traj.t_start <= w.t <= traj.t_end):
        raise ValueError("waterfall out of bounds")


def sweep_point(w: WaterfallPoint, traj: PoseTrajectory, cfg: SensorConfig) -> Vec2:
    _check_bounds(w, traj, cfg)
    x, y = sweep_lam(traj, cfg.lateral(w.u), w.t)
    return Vec2(float(x), float(y))


def jacobian_det(w: WaterfallPoint, traj: PoseTrajectory, cfg: SensorConfig) -> float:
    """Determinant of the sweep Jacobian with columns (df/dt | df/dlam).

    The lateral column is taken along the left normal for every sensor side,
    so forward motion gives a positive value whichever side is sensed.
    """
    _check_bounds(w, traj, cfg)
    a, b = det_coefficients(traj, w.t)
    return float(a - cfg.lateral(w.u) * b)


# ---------------------------------------------------------------------------
# signed decomposition of the waterfall space

@dataclass
class SignedRegionDecomposition:
    """Waterfall rectangles (u-range x t-range) classified by the sign of det."""

    s_plus: list[Box2] = field(default_factory=list)
    s_minus: list[Box2] = field(default_factory=list)
    unresolved: list[Box2] = field(default_factory=list)

    @property
    def all_positive(self) -> bool:
        return not self.s_minus and not self.unresolved and bool(self.s_plus)

    @property
    def all_negative(self) -> bool:
        return not self.s_plus and not self.unresolved and bool(self.s_minus)


def _det_enclosure(traj: PoseTrajectory, cfg: SensorConfig, cell: Box2) -> Interval:
    t0, t1 = cell.y.lo, cell.y.hi
    inner = traj.t[(traj.t > t0) & (traj.t < t1)]
    ts = np.unique(np.concatenate([np.linspace(t0, t1, 9), inner]))
    a, b = det_coefficients(traj, ts)
    gap = float(np.max(np.diff(ts))) if len(ts) > 1 else 0.0
    if gap > 0:
        r = traj.rates(ts)
        r2 = traj.second_rates(ts)
        da = np.hypot(r2[:, 0], r2[:, 1]) + np.hypot(r[:, 0], r[:, 1]) * np.abs(r[:, 2])
        db = np.abs(r2[:, 2])
        # 1.5 covers the spread of the derivative between sample points
        pad_a = 1.5 * float(da.max()) * gap / 2
        pad_b = 1.5 * float(db.max()) * gap / 2
    else:
        pad_a = pad_b = 0.0
    ia = Interval(float(a.min()), float(a.max())).inflate(pad_a)
    ib = Interval(float(b.min()), float(b.max())).inflate(pad_b)
    l0, l1 = sorted((cfg.lateral(cell.x.lo), cfg.lateral(cell.x.hi)))
    return ia - Interval(l0, l1) * ib


def decompose_signed_regions(traj: PoseTrajectory, cfg: SensorConfig,
                             resolution: float = 1.0 / 64) -> SignedRegionDecomposition:
    """Adaptive bisection of W by the certified sign of the Jacobian determinant.

    ``resolution`` is relative: a cell stops splitting once both of its sides
    are at most that fraction of the corresponding side of W.
    """
    if not resolution > 0:
        raise ValueError("resolution must be > 0")
    U, T = cfg.u_max, traj.duration
    out = SignedRegionDecomposition()
    stack = [Box2.from_bounds(0.0, U, traj.t_start, traj.t_end)]
    while stack:
        cell = stack.pop()
        enc = _det_enclosure(traj, cfg, cell)
        if enc.lo > 0:
            out.s_plus.append(cell)
            continue
        if enc.hi < 0:
            out.s_minus.append(cell)
            continue
        nu, nt = cell.width / U, cell.height / T
        if max(nu, nt) <= resolution:
            out.unresolved.append(cell)
            continue
        # bisect in normalised coordinates so both axes refine evenly
        norm = Box2.from_bounds(cell.x.lo / U, cell.x.hi / U, cell.y.lo / T, cell.y.hi / T)
        lo, hi = box_bisect(norm)
        for child in (hi, lo):
            stack.append(Box2.from_bounds(child.x.lo * U, child.x.hi * U,
                                          child.y.lo * T, child.y.hi * T))
    key = lambda b: (b.y.lo, b.x.lo)
    out.s_plus.sort(key=key)
    out.s_minus.sort(key=key)
    out.unresolved.sort(key=key)
    return out
