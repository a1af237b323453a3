"""Uncertain trajectories given as tubes, and interval-valued coverage.

A tube gives, at each time t_k, a box for the position and a box for the
velocity. A trajectory is consistent with the tube when it is the cubic
Hermite interpolant of samples (p_k, v_k) taken inside those boxes, with the
heading of v_k as sensor heading and its yaw rate taken by finite differences.
The tube centre gives the reference trajectory. Every consistent trajectory
stays within a computable distance of the reference at the same waterfall
parameter, so its contour lies in a chain of capsules around the reference
contour. Off that chain the straight-line homotopy between both contours
never meets a point, so the coverage of such a point is the reference value.
Inside the chain the value is the hull of the reference values nearby.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .alexander import CellComplex
from .contour import DEFAULT_SAMPLING, Cycle, build_contour
from .core_geom import DEFAULT_TOL, Box2, Interval, segments_meet_box
from .coverage import (CoverageValue, Paving, _Deferred, extended_winding_many, labeled_complex, pave,
                       winding_off_curve)
from .intersect import AssumptionViolation
from .sweep_model import PoseTrajectory, SensorConfig, decompose_signed_regions

H10_MAX = 4.0 / 27.0


class ColinearCrossingError(AssumptionViolation):
    def __init__(self, windows):
        self.windows = windows
        (a0, a1), (b0, b1) = windows
        super().__init__(f"colinear uncertain crossing between t in [{a0:.6g}, {a1:.6g}] "
                         f"and t in [{b0:.6g}, {b1:.6g}]")


def _wrap(x):
    return (np.asarray(x) + math.pi) % (2 * math.pi) - math.pi


def finite_difference(t: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Central differences inside, one-sided at both ends."""
    d = np.empty_like(y)
    d[1:-1] = (y[2:] - y[:-2]) / (t[2:] - t[:-2])
    d[0] = (y[1] - y[0]) / (t[1] - t[0])
    d[-1] = (y[-1] - y[-2]) / (t[-1] - t[-2])
    return d


def finite_difference_bound(t: np.ndarray, err: np.ndarray) -> np.ndarray:
    """Bound on the change of ``finite_difference`` when each y_k moves by at most err_k."""
    d = np.empty_like(err)
    d[1:-1] = (err[2:] + err[:-2]) / (t[2:] - t[:-2])
    d[0] = (err[1] + err[0]) / (t[1] - t[0])
    d[-1] = (err[-1] + err[-2]) / (t[-1] - t[-2])
    return d


@dataclass(frozen=True, eq=False)
class Tube:
    t: np.ndarray
    s_lo: np.ndarray
    s_hi: np.ndarray
    v_lo: np.ndarray
    v_hi: np.ndarray

    def __post_init__(self):
        arrays = [np.asarray(a, dtype=float) for a in (self.t, self.s_lo, self.s_hi, self.v_lo, self.v_hi)]
        for name, a in zip(("t", "s_lo", "s_hi", "v_lo", "v_hi"), arrays):
            object.__setattr__(self, name, a)
            if not np.all(np.isfinite(a)):
                raise ValueError(f"invalid value in tube column {name}")
        n = len(self.t)
        if n < 2:
            raise ValueError("too short: a tube needs at least 2 slices")
        if any(a.shape != (n, 2) for a in arrays[1:]):
            raise ValueError("tube arrays have mismatched shapes")
        if not np.all(np.diff(self.t) > 0):
            k = int(np.argmax(np.diff(self.t) <= 0)) + 1
            raise ValueError(f"time order: slice {k}")
        if np.any(self.s_lo > self.s_hi) or np.any(self.v_lo > self.v_hi):
            raise ValueError("empty tube slice")
        c = self.centers
        vmax = np.max(np.abs(np.stack([self.v_lo, self.v_hi])), axis=0)
        vmax = np.hypot(vmax[:, 0], vmax[:, 1])
        half = np.hypot(*(0.5 * (self.s_hi - self.s_lo)).T)
        jump = np.hypot(*np.diff(c, axis=0).T)
        allowed = np.maximum(vmax[:-1], vmax[1:]) * np.diff(self.t) + half[:-1] + half[1:]
        bad = np.nonzero(jump > 1.5 * allowed + 1e-9)[0]
        if len(bad):
            raise ValueError(f"tube slices {bad[0]} and {bad[0] + 1} are inconsistent with the velocity bounds")

    @property
    def n(self) -> int:
        return len(self.t)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.s_lo + self.s_hi)

    @property
    def velocity_centers(self) -> np.ndarray:
        return 0.5 * (self.v_lo + self.v_hi)

    def position_box(self, k: int) -> Box2:
        return Box2.from_bounds(self.s_lo[k, 0], self.s_hi[k, 0], self.s_lo[k, 1], self.s_hi[k, 1])

    def velocity_box(self, k: int) -> Box2:
        return Box2.from_bounds(self.v_lo[k, 0], self.v_hi[k, 0], self.v_lo[k, 1], self.v_hi[k, 1])

    @property
    def is_degenerate(self) -> bool:
        return bool(np.all(self.s_lo == self.s_hi) and np.all(self.v_lo == self.v_hi))

    @classmethod
    def from_trajectory(cls, traj: PoseTrajectory, r_pos: float, r_vel: float = 0.0,
                        times: Optional[np.ndarray] = None) -> "Tube":
        """Boxes of half-width ``r_pos`` and ``r_vel`` around the trajectory samples."""
        t = np.asarray(traj.t if times is None else times, dtype=float)
        p = traj.position(t)
        v = traj.rates(t)[:, :2]
        return cls(t, p - r_pos, p + r_pos, v - r_vel, v + r_vel)

    def inflated(self, r_pos: float, r_vel: float = 0.0) -> "Tube":
        return Tube(self.t, self.s_lo - r_pos, self.s_hi + r_pos, self.v_lo - r_vel, self.v_hi + r_vel)

    def window(self, k0: int, k1: int) -> "Tube":
        sl = slice(k0, k1 + 1)
        return Tube(self.t[sl], self.s_lo[sl], self.s_hi[sl], self.v_lo[sl], self.v_hi[sl])

    def split(self, cuts: Sequence[float]) -> list["Tube"]:
        """Sub-tubes sharing the slice nearest to each cut time."""
        idx = sorted({int(np.argmin(np.abs(self.t - c))) for c in cuts})
        idx = [k for k in idx if 0 < k < self.n - 1]
        bounds = [0] + idx + [self.n - 1]
        return [self.window(a, b) for a, b in zip(bounds[:-1], bounds[1:])]


# ---------------------------------------------------------------------------
# heading and realizations

def heading_enclosure(tube: Tube) -> tuple[np.ndarray, np.ndarray]:
    """Unwrapped reference heading at each slice and the half-width of the heading hull."""
    lo, hi = tube.v_lo, tube.v_hi
    zero = (lo[:, 0] <= 0) & (hi[:, 0] >= 0) & (lo[:, 1] <= 0) & (hi[:, 1] >= 0)
    if zero.any():
        k = int(np.argmax(zero))
        raise AssumptionViolation(f"heading indeterminate: velocity box at t = {tube.t[k]:.6g} contains 0")
    vc = tube.velocity_centers
    psi = np.unwrap(np.arctan2(vc[:, 1], vc[:, 0]))
    corners = np.stack([np.column_stack([lo[:, 0], lo[:, 1]]), np.column_stack([hi[:, 0], lo[:, 1]]),
                        np.column_stack([lo[:, 0], hi[:, 1]]), np.column_stack([hi[:, 0], hi[:, 1]])])
    rel = _wrap(np.arctan2(corners[..., 1], corners[..., 0]) - psi[None, :])
    return psi, np.abs(rel).max(axis=0)


def realize(tube: Tube, pos: np.ndarray, vel: np.ndarray) -> PoseTrajectory:
    """Trajectory through positions ``pos`` and velocities ``vel`` taken inside the tube."""
    psi_ref, _ = heading_enclosure(tube)
    psi = psi_ref + _wrap(np.arctan2(vel[:, 1], vel[:, 0]) - psi_ref)
    vpsi = finite_difference(tube.t, psi)
    pose = np.column_stack([pos, psi])
    rates = np.column_stack([vel, vpsi])
    return PoseTrajectory(tube.t, pose, rates, consistency_tol=None)


def reference_trajectory(tube: Tube) -> PoseTrajectory:
    return realize(tube, tube.centers, tube.velocity_centers)


def sample_realization(tube: Tube, rng: np.random.Generator, n_modes: int = 3) -> PoseTrajectory:
    """Random smooth selection: low-frequency offsets scaled to stay inside every box."""
    t = tube.t
    span = max(t[-1] - t[0], 1e-9)

    def smooth(dim):
        amp = rng.uniform(-1, 1, size=(n_modes, dim))
        amp /= max(1.0, np.abs(amp).sum(axis=0).max())
        freq = rng.uniform(0.5, 2.0, size=n_modes) * 2 * math.pi / span
        ph = rng.uniform(0, 2 * math.pi, size=n_modes)
        return np.sin(np.outer(t - t[0], freq) + ph) @ amp

    pos = tube.centers + smooth(2) * 0.5 * (tube.s_hi - tube.s_lo)
    vel = tube.velocity_centers + smooth(2) * 0.5 * (tube.v_hi - tube.v_lo)
    return realize(tube, np.clip(pos, tube.s_lo, tube.s_hi), np.clip(vel, tube.v_lo, tube.v_hi))


def deviation_bounds(tube: Tube, times: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Bounds on how far any realization strays from the reference.

    Returns ``E`` of shape (n, 2), the per-axis bound on the position deviation,
    and ``P`` of shape (n,), the bound on the heading deviation.
    """
    _, dpsi = heading_enclosure(tube)
    rho = 0.5 * (tube.s_hi - tube.s_lo)
    rho_v = 0.5 * (tube.v_hi - tube.v_lo)
    dpsi_rate = finite_difference_bound(tube.t, dpsi)
    t = tube.t
    k = np.clip(np.searchsorted(t, times, side="right") - 1, 0, len(t) - 2)
    h = t[k + 1] - t[k]
    s = np.clip((times - t[k]) / h, 0.0, 1.0)
    h00 = 2 * s ** 3 - 3 * s ** 2 + 1
    h01 = 1 - h00
    h10 = np.abs(s ** 3 - 2 * s ** 2 + s)
    h11 = np.abs(s ** 3 - s ** 2)
    E = (h00[:, None] * rho[k] + h01[:, None] * rho[k + 1]
         + h[:, None] * (h10[:, None] * rho_v[k] + h11[:, None] * rho_v[k + 1]))
    P = h00 * dpsi[k] + h01 * dpsi[k + 1] + h * (h10 * dpsi_rate[k] + h11 * dpsi_rate[k + 1])
    return E, P


# ---------------------------------------------------------------------------
# contour tube

@dataclass(frozen=True, eq=False)
class ContourTube:
    """Capsules around the reference contour plus box enclosures of the robot path."""

    tube: Tube
    cfg: SensorConfig
    reference: PoseTrajectory
    cycle: Cycle
    radius: np.ndarray  # per cycle segment, half-widths (x, y) of the box swept along it
    path_boxes: tuple[Box2, ...]  # per tube interval
    tol: float = DEFAULT_TOL
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def boxes(self) -> list[Box2]:
        """Box chain enclosing every realizable contour."""
        a, b = self.cycle.segments
        lo = np.minimum(a, b) - self.radius
        hi = np.maximum(a, b) + self.radius
        return [Box2.from_bounds(l[0], h[0], l[1], h[1]) for l, h in zip(lo, hi)]

    @property
    def max_radius(self) -> float:
        return float(self.radius.max())

    @property
    def degenerate(self) -> bool:
        """Zero-width tube: the reference is the only realization."""
        return self.max_radius <= 2 * self.tol

    def complex(self) -> CellComplex:
        if "cx" not in self._cache:
            self._cache["cx"] = labeled_complex(self.cycle, self.tol)
        return self._cache["cx"]


def _segment_radii(cycle: Cycle, tube: Tube, tol: float, sampling: float) -> np.ndarray:
    wf = cycle.waterfall
    E, P = deviation_bounds(tube, wf[:, 1])
    # translation is boxed per axis; the beam rotation adds a disk, boxed by its square
    r_pt = E + (np.abs(wf[:, 0]) * P)[:, None]
    a, b = cycle.segments
    r = np.maximum(r_pt, np.roll(r_pt, -1, axis=0))
    if not tube.is_degenerate:
        # chords of the reference and of a realization may each sag off their curve
        d = b - a
        ln = np.hypot(d[:, 0], d[:, 1])
        ang = np.arctan2(d[:, 1], d[:, 0])
        turn = np.abs(_wrap(np.diff(np.append(ang, ang[0]))))
        turn = np.maximum(turn, np.roll(turn, 1))
        sag = 0.5 * ln * np.minimum(turn, math.pi) + 0.1 * sampling * np.max(turn)
        r = r * (1 + 1e-6) + sag[:, None]
    return r + tol


def build_contour_tube(tube: Tube, cfg: SensorConfig, sampling: float = DEFAULT_SAMPLING,
                       tol: float = DEFAULT_TOL) -> ContourTube:
    """Contour of the reference trajectory with per-segment enclosure radii."""
    ref = reference_trajectory(tube)
    dec = decompose_signed_regions(ref, cfg)
    if not dec.all_positive:
        raise AssumptionViolation("uncertain sweep direction: the reference sweeps backwards somewhere")
    cycle = build_contour(ref, cfg, sampling, tol)
    radius = _segment_radii(cycle, tube, tol, sampling)
    boxes = []
    for k in range(tube.n - 1):
        h = tube.t[k + 1] - tube.t[k]
        ix = Interval(min(tube.s_lo[k, 0], tube.s_lo[k + 1, 0]), max(tube.s_hi[k, 0], tube.s_hi[k + 1, 0]))
        iy = Interval(min(tube.s_lo[k, 1], tube.s_lo[k + 1, 1]), max(tube.s_hi[k, 1], tube.s_hi[k + 1, 1]))
        w0 = Interval(0.0, H10_MAX * h)
        w1 = Interval(-H10_MAX * h, 0.0)
        ix = ix + w0 * Interval(tube.v_lo[k, 0], tube.v_hi[k, 0]) + w1 * Interval(tube.v_lo[k + 1, 0], tube.v_hi[k + 1, 0])
        iy = iy + w0 * Interval(tube.v_lo[k, 1], tube.v_hi[k, 1]) + w1 * Interval(tube.v_lo[k + 1, 1], tube.v_hi[k + 1, 1])
        boxes.append(Box2(ix, iy))
    return ContourTube(tube, cfg, ref, cycle, radius, tuple(boxes), tol)


# ---------------------------------------------------------------------------
# uncertain self-intersections of the robot path

@dataclass(frozen=True)
class UncertainVertex:
    windows: tuple[tuple[float, float], tuple[float, float]]
    region: Box2
    cone1: Box2
    cone2: Box2
    update: int


def _velocity_hull(tube: Tube, k0: int, k1: int) -> Box2:
    return Box2.from_bounds(tube.v_lo[k0:k1 + 1, 0].min(), tube.v_hi[k0:k1 + 1, 0].max(),
                            tube.v_lo[k0:k1 + 1, 1].min(), tube.v_hi[k0:k1 + 1, 1].max())


def _boxes_overlap(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    return ((lo[:, None, 0] <= hi[None, :, 0]) & (lo[None, :, 0] <= hi[:, None, 0])
            & (lo[:, None, 1] <= hi[None, :, 1]) & (lo[None, :, 1] <= hi[:, None, 1]))


def find_uncertain_intersections(ct: ContourTube, tube: Optional[Tube] = None) -> list[UncertainVertex]:
    """Clusters of non-neighbouring path boxes that overlap, checked for transversality."""
    tube = tube or ct.tube
    boxes = ct.path_boxes
    m = len(boxes)
    lo = np.array([[b.x.lo, b.y.lo] for b in boxes])
    hi = np.array([[b.x.hi, b.y.hi] for b in boxes])
    meet = _boxes_overlap(lo, hi)
    local_end = np.arange(m)
    for i in range(m):
        j = i
        while j + 1 < m and meet[i, j + 1]:
            j += 1
        local_end[i] = j
    pairs = {(i, j) for i in range(m) for j in np.nonzero(meet[i, i + 1:])[0] + i + 1
             if j > local_end[i] and i < _local_start(meet, j)}
    seen: set = set()
    out = []
    for start in sorted(pairs):
        if start in seen:
            continue
        cluster = []
        stack = [start]
        seen.add(start)
        while stack:
            i, j = stack.pop()
            cluster.append((i, j))
            for di in (-1, 0, 1):
                for dj in (-1, 0, 1):
                    q = (i + di, j + dj)
                    if q in pairs and q not in seen:
                        seen.add(q)
                        stack.append(q)
        i0, i1 = min(p[0] for p in cluster), max(p[0] for p in cluster)
        j0, j1 = min(p[1] for p in cluster), max(p[1] for p in cluster)
        c1 = _velocity_hull(tube, i0, i1 + 1)
        c2 = _velocity_hull(tube, j0, j1 + 1)
        cr = c1.x * c2.y - c1.y * c2.x
        windows = ((float(tube.t[i0]), float(tube.t[i1 + 1])), (float(tube.t[j0]), float(tube.t[j1 + 1])))
        if cr.lo <= 0 <= cr.hi:
            raise ColinearCrossingError(windows)
        region = Box2.empty()
        for i, j in cluster:
            region = region.hull(boxes[i].intersection(boxes[j]))
        out.append(UncertainVertex(windows, region, c1, c2, 1 if cr.lo > 0 else -1))
    out.sort(key=lambda v: v.windows)
    return out


def _local_start(meet: np.ndarray, j: int) -> int:
    i = j
    while i - 1 >= 0 and meet[j, i - 1]:
        i -= 1
    return i


# ---------------------------------------------------------------------------
# interval-valued coverage

def _capsules_meet_box(a: np.ndarray, b: np.ndarray, r: np.ndarray, box: Box2) -> np.ndarray:
    """Mask of segments ``a -> b`` grown by the half-widths ``r`` (n, 2) that meet ``box``."""
    xlo, xhi, ylo, yhi = box.bounds
    rx, ry = r[:, 0], r[:, 1]
    sxlo = np.minimum(a[:, 0], b[:, 0]) - rx
    sxhi = np.maximum(a[:, 0], b[:, 0]) + rx
    sylo = np.minimum(a[:, 1], b[:, 1]) - ry
    syhi = np.maximum(a[:, 1], b[:, 1]) + ry
    mask = (sxhi >= xlo) & (sxlo <= xhi) & (syhi >= ylo) & (sylo <= yhi)
    if not mask.any():
        return mask
    idx = np.nonzero(mask)[0]
    d = b[idx] - a[idx]
    # the segment swept by a box meets ``box`` iff the segment meets the grown box
    gx = np.array([xlo, xhi, xhi, xlo])[None, :] + rx[idx, None] * np.array([-1.0, 1.0, 1.0, -1.0])[None, :]
    gy = np.array([ylo, ylo, yhi, yhi])[None, :] + ry[idx, None] * np.array([-1.0, -1.0, 1.0, 1.0])[None, :]
    side = d[:, 0:1] * (gy - a[idx, 1:2]) - d[:, 1:2] * (gx - a[idx, 0:1])
    mask[idx] = (side.min(axis=1) <= 0.0) & (side.max(axis=1) >= 0.0)
    return mask


def _penumbra_value(ct: ContourTube, box: Box2, hit: np.ndarray) -> tuple[int, int]:
    a, b = ct.cycle.segments
    r = ct.radius[hit]
    lo = np.minimum(a[hit], b[hit]) - r
    hi = np.maximum(a[hit], b[hit]) + r
    N = Box2.from_bounds(min(box.x.lo, lo[:, 0].min()), max(box.x.hi, hi[:, 0].max()),
                         min(box.y.lo, lo[:, 1].min()), max(box.y.hi, hi[:, 1].max()))
    cx = ct.complex()
    sa, sb, left, right = cx.segments()
    near = segments_meet_box(sa, sb, N, pad=ct.tol)
    if not near.any():
        c = N.center
        w = int(winding_off_curve(cx, [[c.x, c.y]])[0])
        return w, w
    return int(right[near].min()), int(left[near].max())


def _as_box(q) -> Box2:
    if isinstance(q, Box2):
        return q
    x, y = (q.x, q.y) if hasattr(q, "x") else q
    return Box2.from_bounds(x, x, y, y)


def uncertain_coverage(ct, vertices: Sequence[UncertainVertex] = (), q=None) -> CoverageValue:
    """Interval of coverage values over all realizations, at a point or over a box.

    ``ct`` may be a single contour tube or a list of them (a split mission);
    values of the parts add up.
    """
    cts = ct if isinstance(ct, (list, tuple)) else [ct]
    box = _as_box(q)
    lo = hi = 0
    for c in cts:
        a, b = c.cycle.segments
        hit = _capsules_meet_box(a, b, c.radius, box)
        if c.degenerate and box.width == 0 and box.height == 0:
            # on the curve itself the single realization gives the extended winding
            ctr = box.center
            l = h = int(extended_winding_many(c.complex(), [[ctr.x, ctr.y]])[0])
        elif hit.any():
            l, h = _penumbra_value(c, box, hit)
        else:
            ctr = box.center
            l = h = int(winding_off_curve(c.complex(), [[ctr.x, ctr.y]])[0])
        lo += l
        hi += h
    return CoverageValue(max(lo, 0), max(hi, 0))


def classify_uncertain(cts: Sequence[ContourTube], roi: Box2, epsilon: float = 0.05) -> Paving:
    """SIVIA paving of ``roi`` with interval coverage values summed over contour tubes."""
    cts = list(cts)
    segs = [c.cycle.segments for c in cts]

    def classify(box: Box2, ctx, small: bool):
        hits = []
        for (a, b), c, idx in zip(segs, cts, ctx):
            m = _capsules_meet_box(a[idx], b[idx], c.radius[idx], box) if len(idx) else np.zeros(0, bool)
            hits.append(idx[m])
        if not any(len(h) for h in hits):
            return _Deferred(box.center), None
        if not small:
            return None, hits
        lo = hi = 0
        for c, h in zip(cts, hits):
            if len(h):
                mask = np.zeros(len(c.radius), dtype=bool)
                mask[h] = True
                l, u = _penumbra_value(c, box, mask)
            else:
                ctr = box.center
                l = u = int(winding_off_curve(c.complex(), [[ctr.x, ctr.y]])[0])
            lo += l
            hi += u
        return CoverageValue(max(lo, 0), max(hi, 0)), None

    leaves = pave(roi, epsilon, classify, [np.arange(len(s[0])) for s in segs])
    deferred = [k for k, (_, v) in enumerate(leaves) if isinstance(v, _Deferred)]
    if deferred:
        pts = np.array([[leaves[k][1].center.x, leaves[k][1].center.y] for k in deferred])
        total = np.zeros(len(pts), dtype=np.int64)
        for c in cts:
            total += winding_off_curve(c.complex(), pts)
        for k, w in zip(deferred, total):
            leaves[k] = (leaves[k][0], CoverageValue(max(int(w), 0), max(int(w), 0)))
    return Paving(roi, leaves, epsilon)


# ---------------------------------------------------------------------------
# thick winding sets

@dataclass(frozen=True, eq=False)
class ThickWindingSet:
    """Boxes certainly (lower) and possibly (upper) inside the winding set of ``level``."""

    level: int
    lower: tuple[Box2, ...]
    upper: tuple[Box2, ...]

    def _overlap_area(self, boxes, b: Box2) -> float:
        total = 0.0
        for c in boxes:
            i = c.intersection(b)
            if not i.is_empty:
                total += i.area
        return total

    def contains_lower(self, b: Box2) -> bool:
        if b.area == 0:
            return any(c.contains_box(b) for c in self.lower)
        return self._overlap_area(self.lower, b) >= b.area * (1 - 1e-12)

    def meets_upper(self, b: Box2) -> bool:
        if b.area == 0:
            return any(c.intersects(b) for c in self.upper)
        return self._overlap_area(self.upper, b) > 0


def thick_winding_sets(ct, vertices: Sequence[UncertainVertex] = (), roi: Optional[Box2] = None,
                       epsilon: float = 0.05) -> list[ThickWindingSet]:
    """Lower and upper approximations of every winding set, from an uncertain paving."""
    cts = ct if isinstance(ct, (list, tuple)) else [ct]
    if roi is None:
        roi = contour_tube_bbox(cts).inflate(epsilon)
    pav = classify_uncertain(cts, roi, epsilon)
    top = max([v.hi for _, v in pav.leaves] + [0])
    out = []
    for i in range(1, top + 1):
        lower = tuple(b for b, v in pav.leaves if v.lo >= i)
        upper = tuple(b for b, v in pav.leaves if v.hi >= i)
        out.append(ThickWindingSet(i, lower, upper))
    return out


def thick_characteristic(tw: ThickWindingSet, b) -> Interval:
    """[1,1] inside the clear zone, [0,0] in the dark zone, [0,1] otherwise."""
    box = _as_box(b)
    if tw.contains_lower(box):
        return Interval(1.0, 1.0)
    if not tw.meets_upper(box):
        return Interval(0.0, 0.0)
    return Interval(0.0, 1.0)


def contour_tube_bbox(cts: Sequence[ContourTube]) -> Box2:
    box = Box2.empty()
    for c in cts:
        pts = c.cycle.points
        r = c.max_radius
        box = box.hull(Box2.from_bounds(pts[:, 0].min() - r, pts[:, 0].max() + r,
                                        pts[:, 1].min() - r, pts[:, 1].max() + r))
    return box


def build_uncertain(tube: Tube, cfg: SensorConfig, cuts: Sequence[float] = (),
                    sampling: float = DEFAULT_SAMPLING, tol: float = DEFAULT_TOL):
    """Contour tubes and validated vertices for the mission, split at ``cuts``."""
    parts = tube.split(cuts) if cuts else [tube]
    cts, vertices = [], []
    for part in parts:
        ct = build_contour_tube(part, cfg, sampling, tol)
        vertices.append(find_uncertain_intersections(ct, part))
        cts.append(ct)
    return cts, vertices
