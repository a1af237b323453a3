"""Sensor contours: the image of the waterfall boundary as closed polylines."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .core_geom import DEFAULT_TOL
from .sweep_model import (PoseTrajectory, SensorConfig, SignedRegionDecomposition,
                          det_coefficients, sweep_lam, sweep_tangent_t)

DEFAULT_SAMPLING = 0.05


@dataclass(frozen=True, eq=False)
class Cycle:
    """Closed oriented polyline; the last point connects back to the first.

    ``params`` is the normalised arc length in [0, 1). ``source_tags`` names
    the contour piece each point comes from; ``waterfall`` optionally holds the
    (lateral offset, time) each point is the image of.
    """

    points: np.ndarray
    params: np.ndarray
    tangents: np.ndarray
    source_tags: tuple[str, ...]
    waterfall: Optional[np.ndarray] = None

    def __post_init__(self):
        if len(self.points) < 3:
            raise ValueError("a cycle needs at least 3 points")
        if not np.all(np.diff(self.params) > 0) or self.params[0] < 0 or self.params[-1] >= 1:
            raise ValueError("cycle parameters must increase strictly within [0, 1)")
        if np.any(np.hypot(self.tangents[:, 0], self.tangents[:, 1]) == 0):
            raise ValueError("zero tangent on cycle")

    @classmethod
    def from_points(cls, points, tangents=None, tags: Optional[Sequence[str]] = None,
                    merge: float = DEFAULT_TOL, waterfall=None) -> "Cycle":
        pts = np.asarray(points, dtype=float)
        tags = list(tags) if tags is not None else ["curve"] * len(pts)
        tan = None if tangents is None else np.asarray(tangents, dtype=float)
        keep = _dedupe_mask(pts, merge)
        pts = pts[keep]
        tags = [g for g, k in zip(tags, keep) if k]
        if tan is not None:
            tan = tan[keep]
        if waterfall is not None:
            waterfall = np.asarray(waterfall, dtype=float)[keep]
        fd = np.roll(pts, -1, axis=0) - np.roll(pts, 1, axis=0)
        if tan is None:
            tan = fd
        else:
            bad = np.hypot(tan[:, 0], tan[:, 1]) <= 1e-12
            tan = np.where(bad[:, None], fd, tan)
        seg = np.hypot(*(np.roll(pts, -1, axis=0) - pts).T)
        total = seg.sum()
        params = np.concatenate([[0.0], np.cumsum(seg[:-1])]) / total
        return cls(pts, params, tan, tuple(tags), waterfall)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def segments(self) -> tuple[np.ndarray, np.ndarray]:
        return self.points, np.roll(self.points, -1, axis=0)

    def signed_area(self) -> float:
        x, y = self.points[:, 0], self.points[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    def length(self) -> float:
        a, b = self.segments
        return float(np.hypot(*(b - a).T).sum())

    def reversed(self) -> "Cycle":
        pts = self.points[::-1]
        wf = None if self.waterfall is None else np.roll(self.waterfall[::-1], 1, axis=0)
        return Cycle.from_points(np.roll(pts, 1, axis=0), -np.roll(self.tangents[::-1], 1, axis=0),
                                 list(np.roll(np.array(self.source_tags[::-1], dtype=object), 1)),
                                 waterfall=wf)

    def rolled(self, k: int) -> "Cycle":
        """Same curve with the starting point moved by k vertices."""
        tags = list(self.source_tags[k:] + self.source_tags[:k])
        wf = None if self.waterfall is None else np.roll(self.waterfall, -k, axis=0)
        return Cycle.from_points(np.roll(self.points, -k, axis=0),
                                 np.roll(self.tangents, -k, axis=0), tags, waterfall=wf)

    def densified(self, factor: int = 2) -> "Cycle":
        a, b = self.segments
        ws = np.arange(factor) / factor
        pts = (a[:, None, :] + ws[None, :, None] * (b - a)[:, None, :]).reshape(-1, 2)
        tags = [g for g in self.source_tags for _ in range(factor)]
        return Cycle.from_points(pts, np.repeat(self.tangents, factor, axis=0), tags)

    def bbox(self) -> tuple[float, float, float, float]:
        return (float(self.points[:, 0].min()), float(self.points[:, 0].max()),
                float(self.points[:, 1].min()), float(self.points[:, 1].max()))


def _dedupe_mask(pts: np.ndarray, merge: float) -> np.ndarray:
    keep = np.ones(len(pts), dtype=bool)
    last = pts[0]
    for i in range(1, len(pts)):
        if math.hypot(*(pts[i] - last)) <= merge:
            keep[i] = False
        else:
            last = pts[i]
    # closing pair
    while keep.sum() > 1:
        j = np.nonzero(keep)[0][-1]
        if math.hypot(*(pts[j] - pts[0])) <= merge:
            keep[j] = False
        else:
            break
    return keep


# ---------------------------------------------------------------------------

def _time_grid(traj: PoseTrajectory, lams: Sequence[float], sampling: float,
               t0: Optional[float] = None, t1: Optional[float] = None) -> np.ndarray:
    """Times such that f(lam, .) moves at most ``sampling`` between neighbours."""
    t0 = traj.t_start if t0 is None else t0
    t1 = traj.t_end if t1 is None else t1
    knots = traj.t[(traj.t > t0) & (traj.t < t1)]
    base = np.concatenate([[t0], knots, [t1]])
    mids = 0.5 * (base[:-1] + base[1:])
    probe = np.concatenate([base, mids])
    speed = np.zeros(len(probe))
    for lam in lams:
        ft = sweep_tangent_t(traj, lam, probe)
        speed = np.maximum(speed, np.hypot(ft[:, 0], ft[:, 1]))
    nb = len(base)
    vmax = np.maximum(np.maximum(speed[:nb - 1], speed[1:nb]), speed[nb:])
    counts = np.maximum(1, np.ceil(1.25 * vmax * np.diff(base) / sampling).astype(int))
    pieces = [np.linspace(base[k], base[k + 1], counts[k] + 1)[:-1] for k in range(nb - 1)]
    return np.concatenate(pieces + [[t1]])


def _lam_steps(l0: float, l1: float, sampling: float) -> np.ndarray:
    n = max(1, int(math.ceil(abs(l1 - l0) / sampling)))
    return np.linspace(l0, l1, n + 1)


def build_contour(traj: PoseTrajectory, cfg: SensorConfig, sampling: float = DEFAULT_SAMPLING,
                  tol: float = DEFAULT_TOL) -> Cycle:
    """Contour of the whole waterfall space, counterclockwise when det > 0.

    The pieces are the near edge of the beam over time, the beam at the final
    time, the far edge backwards in time and the beam at the start time
    backwards. When the start and end beams coincide (a closed loop) both are
    pulled apart in time so a slit of width about 2 * tol separates them.
    """
    if not sampling > 0:
        raise ValueError("sampling must be > 0")
    if len(traj) < 2:
        raise ValueError("too short")
    lmin, lmax = cfg.lam_range
    ta, tb = traj.t_start, traj.t_end
    ends0 = sweep_lam(traj, np.array([lmin, lmax]), ta)
    ends1 = sweep_lam(traj, np.array([lmin, lmax]), tb)
    if np.all(np.hypot(*(ends0 - ends1).T) <= 10 * tol):
        v0 = np.hypot(*sweep_tangent_t(traj, np.array([lmin, lmax]), ta).T).min()
        v1 = np.hypot(*sweep_tangent_t(traj, np.array([lmin, lmax]), tb).T).min()
        if min(v0, v1) > 0:
            ta += tol / v0
            tb -= tol / v1
    tg = _time_grid(traj, (lmin, lmax), sampling, ta, tb)
    lam_cap = _lam_steps(lmin, lmax, sampling)

    near = sweep_lam(traj, lmin, tg)
    cap_end = sweep_lam(traj, lam_cap, tb)
    far = sweep_lam(traj, lmax, tg[::-1])
    cap_start = sweep_lam(traj, lam_cap[::-1], ta)
    if math.hypot(*(cap_start[-1] - near[0])) > tol:
        raise ValueError("open contour")

    psi_a = traj.state(ta)[2]
    psi_b = traj.state(tb)[2]
    n_a = np.array([-math.sin(psi_a), math.cos(psi_a)])
    n_b = np.array([-math.sin(psi_b), math.cos(psi_b)])
    pts = np.concatenate([near, cap_end[1:], far[1:], cap_start[1:-1]])
    tans = np.concatenate([
        sweep_tangent_t(traj, lmin, tg),
        np.tile(n_b, (len(cap_end) - 1, 1)),
        -sweep_tangent_t(traj, lmax, tg[::-1])[1:],
        np.tile(-n_a, (len(cap_start) - 2, 1)),
    ])
    tags = (["near_edge"] * len(near) + ["end_cap"] * (len(cap_end) - 1)
            + ["far_edge"] * (len(far) - 1) + ["start_cap"] * (len(cap_start) - 2))
    wf = np.concatenate([
        np.column_stack([np.full(len(tg), lmin), tg]),
        np.column_stack([lam_cap[1:], np.full(len(lam_cap) - 1, tb)]),
        np.column_stack([np.full(len(tg) - 1, lmax), tg[::-1][1:]]),
        np.column_stack([lam_cap[::-1][1:-1], np.full(len(lam_cap) - 2, ta)]),
    ])
    return Cycle.from_points(pts, tans, tags, merge=tol, waterfall=wf)


# ---------------------------------------------------------------------------
# signed contours

def _slice_bounds(a, b, lmin: float, lmax: float, sign: int):
    """Lateral interval where sign * (a - lam * b) > 0, clipped to [lmin, lmax]."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    sa, sb = sign * a, sign * b
    lo = np.full(a.shape, lmin)
    hi = np.full(a.shape, lmax)
    with np.errstate(divide="ignore", invalid="ignore"):
        root = np.where(b != 0, a / np.where(b != 0, b, 1.0), 0.0)
    pos = sb > 0
    neg = sb < 0
    flat = sb == 0
    hi = np.where(pos, np.minimum(lmax, root), hi)
    lo = np.where(neg, np.maximum(lmin, root), lo)
    empty = flat & (sa <= 0)
    hi = np.where(empty, lo, hi)
    hi = np.maximum(hi, lo)
    return lo, hi


def _refine_times(traj: PoseTrajectory, t: np.ndarray, lam_fns: Sequence[Callable],
                  sampling: float, max_rounds: int = 14) -> np.ndarray:
    for _ in range(max_rounds):
        gaps = np.zeros(len(t) - 1, dtype=bool)
        for fn in lam_fns:
            img = sweep_lam(traj, fn(t), t)
            gaps |= np.hypot(*np.diff(img, axis=0).T) > sampling
        if not gaps.any():
            break
        mids = 0.5 * (t[:-1][gaps] + t[1:][gaps])
        t = np.sort(np.concatenate([t, mids]))
    return t


def _bisect_edge(width_fn: Callable, t_out: float, t_in: float, iters: int = 60) -> float:
    """Locate where the slice width vanishes between an empty and a nonempty time."""
    for _ in range(iters):
        m = 0.5 * (t_out + t_in)
        if m in (t_out, t_in):
            break
        if width_fn(m) > 0:
            t_in = m
        else:
            t_out = m
    return t_in


def _signed_components(traj: PoseTrajectory, cfg: SensorConfig, sign: int, sampling: float,
                       merge: float) -> list[Cycle]:
    lmin, lmax = cfg.lam_range
    wtol = 1e-9 * (lmax - lmin)

    def bounds(t):
        a, b = det_coefficients(traj, t)
        return _slice_bounds(a, b, lmin, lmax, sign)

    def width(t):
        lo, hi = bounds(np.atleast_1d(t))
        return float(hi[0] - lo[0]) - wtol

    lo_fn = lambda t: bounds(t)[0]
    hi_fn = lambda t: bounds(t)[1]

    tg = _time_grid(traj, (lmin, lmax), sampling)
    lo, hi = bounds(tg)
    inside = (hi - lo) > wtol
    cycles = []
    k = 0
    n = len(tg)
    while k < n:
        if not inside[k]:
            k += 1
            continue
        k0 = k
        while k < n and inside[k]:
            k += 1
        k1 = k - 1
        ts = [tg[k0:k1 + 1]]
        if k0 > 0:
            ts.insert(0, [_bisect_edge(width, tg[k0 - 1], tg[k0])])
        if k1 < n - 1:
            ts.append([_bisect_edge(width, tg[k1 + 1], tg[k1])])
        t = np.unique(np.concatenate(ts))
        if len(t) < 2:
            continue
        t = _refine_times(traj, t, (lo_fn, hi_fn), sampling)
        clo, chi = bounds(t)
        lower = sweep_lam(traj, clo, t)
        upper = sweep_lam(traj, chi[::-1], t[::-1])
        cap_end = sweep_lam(traj, _lam_steps(clo[-1], chi[-1], sampling), t[-1])
        cap_start = sweep_lam(traj, _lam_steps(chi[0], clo[0], sampling), t[0])
        pts = np.concatenate([lower, cap_end[1:], upper[1:], cap_start[1:-1]])
        keep = _dedupe_mask(pts, merge)
        if keep.sum() < 3:
            continue
        tags = ["signed_boundary"] * len(pts)
        cyc = Cycle.from_points(pts, None, tags, merge=merge)
        if abs(cyc.signed_area()) <= merge * merge:
            continue
        cycles.append(cyc if sign > 0 else cyc.reversed())
    return cycles


def build_signed_contours(traj: PoseTrajectory, cfg: SensorConfig,
                          decomposition: SignedRegionDecomposition,
                          sampling: float = DEFAULT_SAMPLING,
                          tol: float = DEFAULT_TOL) -> tuple[list[Cycle], list[Cycle]]:
    """Images of the boundaries of the forward and backward swept regions.

    Both families come back positively oriented. Since the determinant is
    affine in the lateral offset, each time slice of either region is a single
    interval whose end points are computed in closed form; the decomposition
    decides whether the general construction is needed at all.
    """
    if decomposition.all_positive:
        return [build_contour(traj, cfg, sampling, tol)], []
    if decomposition.all_negative:
        return [], [build_contour(traj, cfg, sampling, tol).reversed()]
    merge = max(tol, 1e-3 * sampling)
    plus = _signed_components(traj, cfg, +1, sampling, merge)
    minus = _signed_components(traj, cfg, -1, sampling, merge)
    return plus, minus
