"""Coverage measure from the signed contours, SIVIA paving and explored-area bounds."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .alexander import CellComplex, alexander_numbering, build_cell_complex, winding_sets
from .contour import DEFAULT_SAMPLING, build_signed_contours
from .core_geom import DEFAULT_TOL, Box2, box_bisect, segments_meet_box
from .intersect import AssumptionReport, find_self_intersections, validate_assumptions
from .sweep_model import PoseTrajectory, SensorConfig, SignedRegionDecomposition, decompose_signed_regions


@dataclass(frozen=True)
class CoverageValue:
    """Integer interval [lo, hi] of possible coverage values."""

    lo: int
    hi: int

    def __post_init__(self):
        if not 0 <= self.lo <= self.hi:
            raise ValueError(f"invalid coverage interval [{self.lo}, {self.hi}]")

    @property
    def is_singleton(self) -> bool:
        return self.lo == self.hi

    def __add__(self, other: "CoverageValue") -> "CoverageValue":
        return CoverageValue(self.lo + other.lo, self.hi + other.hi)

    def contains(self, k: int) -> bool:
        return self.lo <= k <= self.hi

    def contains_value(self, other: "CoverageValue") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def __str__(self) -> str:
        return f"[{self.lo},{self.hi}]"


# ---------------------------------------------------------------------------
# extended winding

def _complex_sets(cx: CellComplex):
    key = "sets"
    if key not in cx._seg_cache:
        cx._seg_cache[key] = (winding_sets(cx), winding_sets(cx, negative=True))
    return cx._seg_cache[key]


def _distances(points: np.ndarray, a: np.ndarray, b: np.ndarray, chunk: int = 512):
    """Min distance to the segment set and, per point, the segment mask within ``dist`` on demand."""
    ab = b - a
    den = np.einsum("ij,ij->i", ab, ab)
    den = np.where(den > 0, den, 1.0)
    out = np.empty(len(points))
    for s in range(0, len(points), chunk):
        P = points[s:s + chunk, None, :]
        t = np.clip(np.einsum("mkj,kj->mk", P - a, ab) / den, 0.0, 1.0)
        q = a + t[..., None] * ab
        out[s:s + chunk] = np.hypot(q[..., 0] - P[..., 0], q[..., 1] - P[..., 1]).min(axis=1)
    return out


def winding_off_curve(cx: CellComplex, points) -> np.ndarray:
    """Sum of winding-set characteristic functions at points away from the cycle."""
    from .alexander import crossing_parity

    points = np.atleast_2d(np.asarray(points, dtype=float))
    pos, neg = _complex_sets(cx)
    total = np.zeros(len(points), dtype=np.int64)
    for w in pos:
        total += crossing_parity(points, w.a, w.b)
    for w in neg:
        total -= crossing_parity(points, w.a, w.b)
    return total


def extended_winding_many(cx: CellComplex, points, tol: Optional[float] = None) -> np.ndarray:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    tol = cx.tol if tol is None else tol
    out = winding_off_curve(cx, points)
    a, b, left, _ = cx.segments()
    d = _distances(points, a, b)
    for k in np.nonzero(d <= tol)[0]:
        p = points[k]
        ab = b - a
        den = np.where(np.einsum("ij,ij->i", ab, ab) > 0, np.einsum("ij,ij->i", ab, ab), 1.0)
        t = np.clip(np.einsum("ij,ij->i", p - a, ab) / den, 0.0, 1.0)
        q = a + t[:, None] * ab
        near = np.hypot(q[:, 0] - p[0], q[:, 1] - p[1]) <= tol
        # upper semi-continuous extension: largest label of the incident faces
        out[k] = int(left[near].max())
    return out


def extended_winding(cx: CellComplex, p, tol: Optional[float] = None) -> int:
    """Winding number of the labeled complex at ``p``, extended onto the curve by limsup."""
    x, y = (p.x, p.y) if hasattr(p, "x") else p
    return int(extended_winding_many(cx, [[x, y]], tol)[0])


# ---------------------------------------------------------------------------
# coverage model

def labeled_complex(c, tol: float = DEFAULT_TOL) -> CellComplex:
    return alexander_numbering(build_cell_complex(c, find_self_intersections(c, tol), tol))


@dataclass
class CoverageModel:
    """Labeled complexes of the forward (plus) and backward (minus) sweep contours.

    Minus contours are stored with positive orientation, so both families add.
    """

    traj: PoseTrajectory
    cfg: SensorConfig
    decomposition: SignedRegionDecomposition
    plus: list[CellComplex]
    minus: list[CellComplex]
    report: AssumptionReport
    tol: float = DEFAULT_TOL

    @property
    def complexes(self) -> list[CellComplex]:
        return self.plus + self.minus

    @property
    def max_label(self) -> int:
        return max([cx.max_label for cx in self.complexes] + [0])

    def measure_many(self, points) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        total = np.zeros(len(points), dtype=np.int64)
        for cx in self.complexes:
            total += extended_winding_many(cx, points, self.tol)
        return total

    def near_both_families(self, p, dist: Optional[float] = None) -> bool:
        """True where a forward and a backward contour both pass within ``dist`` of ``p``."""
        dist = self.tol if dist is None else dist
        pt = np.array([[p[0], p[1]]], dtype=float)

        def near(cxs):
            return any(_distances(pt, *cx.segments()[:2])[0] <= dist for cx in cxs)

        return near(self.plus) and near(self.minus)


def build_coverage_model(traj: PoseTrajectory, cfg: SensorConfig, sampling: float = DEFAULT_SAMPLING,
                         tol: float = DEFAULT_TOL, resolution: float = 1 / 64) -> CoverageModel:
    dec = decompose_signed_regions(traj, cfg, resolution)
    plus, minus = build_signed_contours(traj, cfg, dec, sampling, tol)
    violations = []
    for c in plus + minus:
        violations.extend(validate_assumptions(c, tol=tol).violations)
    report = AssumptionReport(violations)
    return CoverageModel(traj, cfg, dec,
                         [labeled_complex(c, tol) for c in plus],
                         [labeled_complex(c, tol) for c in minus], report, tol)


def coverage_measure(traj: PoseTrajectory, cfg: SensorConfig, p, model: Optional[CoverageModel] = None,
                     **kw) -> int:
    """Number of times ``p`` was inside the visible set: sum of extended windings of all contours."""
    model = model or build_coverage_model(traj, cfg, **kw)
    x, y = (p.x, p.y) if hasattr(p, "x") else p
    return int(model.measure_many([[x, y]])[0])


# ---------------------------------------------------------------------------
# paving

@dataclass
class Paving:
    roi: Box2
    leaves: list[tuple[Box2, CoverageValue]]
    epsilon: float
    flagged: int = field(default=0, compare=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Paving):
            return NotImplemented
        return (self.roi.bounds == other.roi.bounds and self.epsilon == other.epsilon
                and len(self.leaves) == len(other.leaves)
                and all(b1.bounds == b2.bounds and v1 == v2
                        for (b1, v1), (b2, v2) in zip(self.leaves, other.leaves)))

    def value_at(self, p) -> CoverageValue:
        """Hull of the values of all leaves containing ``p`` (several on shared sides)."""
        x, y = (p.x, p.y) if hasattr(p, "x") else p
        vals = [v for b, v in self.leaves if b.x.lo <= x <= b.x.hi and b.y.lo <= y <= b.y.hi]
        if not vals:
            raise ValueError("point outside the paving")
        return CoverageValue(min(v.lo for v in vals), max(v.hi for v in vals))

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for _, v in self.leaves:
            out[str(v)] = out.get(str(v), 0) + 1
        return out


class _Deferred:
    __slots__ = ("center",)

    def __init__(self, center):
        self.center = center


def pave(roi: Box2, epsilon: float, classify: Callable, ctx0) -> list[tuple[Box2, object]]:
    """Depth-first SIVIA driver, lower child before upper child.

    ``classify(box, ctx, small)`` returns ``(value, child_ctx)``; a value of
    None asks for a bisection, and ``small`` is set when the box is no wider
    than ``epsilon``.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be > 0")
    if roi.is_empty or roi.width <= 0 or roi.height <= 0:
        raise ValueError("roi must be a nonempty box")
    leaves = []
    stack = [(roi, ctx0)]
    while stack:
        box, ctx = stack.pop()
        value, child = classify(box, ctx, box.max_side <= epsilon)
        if value is not None:
            leaves.append((box, value))
            continue
        lo, hi = box_bisect(box)
        stack.append((hi, child))
        stack.append((lo, child))
    return leaves


def sivia(roi: Box2, epsilon: float, plus: Sequence[CellComplex], minus: Sequence[CellComplex] = (),
          tol: float = DEFAULT_TOL) -> Paving:
    """Pave ``roi`` against the sum of the extended windings of all complexes."""
    complexes = list(plus) + list(minus)
    segs = [cx.segments() for cx in complexes]
    n_plus = len(plus)
    flagged = [0]

    def classify(box: Box2, ctx, small: bool):
        hits = []
        any_hit = False
        for (a, b, _, _), idx in zip(segs, ctx):
            if len(idx):
                m = segments_meet_box(a[idx], b[idx], box, pad=tol)
                sub = idx[m]
            else:
                sub = idx
            hits.append(sub)
            any_hit = any_hit or len(sub) > 0
        if not any_hit:
            return _Deferred(box.center), None
        if not small:
            return None, hits
        lo = hi = 0
        for (a, b, left, right), sub, cx in zip(segs, hits, complexes):
            if len(sub):
                lo += int(right[sub].min())
                hi += int(left[sub].max())
            else:
                c = box.center
                w = int(winding_off_curve(cx, [[c.x, c.y]])[0])
                lo += w
                hi += w
        if any(len(h) for h in hits[:n_plus]) and any(len(h) for h in hits[n_plus:]):
            flagged[0] += 1
        return CoverageValue(max(lo, 0), max(hi, 0)), None

    ctx0 = [np.arange(len(s[0])) for s in segs]
    leaves = pave(roi, epsilon, classify, ctx0)
    deferred = [k for k, (_, v) in enumerate(leaves) if isinstance(v, _Deferred)]
    if deferred:
        pts = np.array([[leaves[k][1].center.x, leaves[k][1].center.y] for k in deferred])
        total = np.zeros(len(pts), dtype=np.int64)
        for cx in complexes:
            total += winding_off_curve(cx, pts)
        for k, w in zip(deferred, total):
            leaves[k] = (leaves[k][0], CoverageValue(int(w), int(w)))
    return Paving(roi, leaves, epsilon, flagged[0])


def classify_roi(traj: PoseTrajectory, cfg: SensorConfig, roi: Box2, epsilon: float = 0.05,
                 model: Optional[CoverageModel] = None, **kw) -> Paving:
    """SIVIA classification of ``roi`` by coverage measure."""
    model = model or build_coverage_model(traj, cfg, **kw)
    return sivia(roi, epsilon, model.plus, model.minus, model.tol)


def explored_area(p: Paving):
    """Inner and outer approximations of the explored area (coverage at least 1)."""
    inner = [b for b, v in p.leaves if v.lo >= 1]
    outer = [b for b, v in p.leaves if v.hi >= 1]
    return inner, outer, float(sum(b.area for b in inner)), float(sum(b.area for b in outer))
