"""Self-intersections of a cycle and checks of the transversality assumptions."""
from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .contour import Cycle
from .core_geom import CROSS, DEFAULT_TOL, TOUCH, Vec2, classify_segment_pairs, cross2

MIN_SIN = 0.01
# crossings closer than this many tol to the start point cannot be told apart from the closure
CLOSURE_RADIUS = 3.0


class AssumptionViolation(ValueError):
    """The curve breaks the genericity assumptions the numbering relies on."""


@dataclass(frozen=True)
class SelfIntersection:
    tau1: float
    tau2: float
    point: Vec2
    tangent1: Vec2
    tangent2: Vec2
    update: int
    seg1: int = field(default=-1, compare=False)
    s1: float = field(default=math.nan, compare=False)
    seg2: int = field(default=-1, compare=False)
    s2: float = field(default=math.nan, compare=False)


@dataclass(frozen=True)
class Violation:
    kind: str  # "tangential", "multiplicity" or "closure"
    point: Vec2
    detail: str = ""


@dataclass
class AssumptionReport:
    violations: list[Violation]

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def __str__(self) -> str:
        if self.ok:
            return "pass"
        return "fail: " + "; ".join(f"{v.kind} at ({v.point.x:.6g}, {v.point.y:.6g})"
                                   + (f" {v.detail}" if v.detail else "")
                                   for v in self.violations)


def candidate_pairs(p0: np.ndarray, p1: np.ndarray, cell: float | None = None) -> np.ndarray:
    """Segment index pairs (i < j) whose bounding boxes share a uniform grid cell."""
    n = len(p0)
    lo = np.minimum(p0, p1)
    hi = np.maximum(p0, p1)
    if cell is None:
        lengths = np.hypot(*(p1 - p0).T)
        ext = float(max(np.ptp(lo[:, 0]), np.ptp(lo[:, 1]), 1e-12))
        cell = max(2.0 * float(np.median(lengths)), ext / 2048, 1e-12)
    origin = lo.min(axis=0)
    c_lo = np.floor((lo - origin) / cell).astype(np.int64)
    c_hi = np.floor((hi - origin) / cell).astype(np.int64)
    buckets: dict[tuple[int, int], list[int]] = defaultdict(list)
    for i in range(n):
        for cx in range(c_lo[i, 0], c_hi[i, 0] + 1):
            for cy in range(c_lo[i, 1], c_hi[i, 1] + 1):
                buckets[(cx, cy)].append(i)
    pairs = []
    for members in buckets.values():
        if len(members) > 1:
            pairs.extend(itertools.combinations(members, 2))
    if not pairs:
        return np.empty((0, 2), dtype=np.int64)
    arr = np.unique(np.array(pairs, dtype=np.int64), axis=0)
    return arr


def _scan(c: Cycle, tol: float, min_sin: float):
    p0, p1 = c.segments
    n = len(p0)
    pairs = candidate_pairs(p0, p1)
    if len(pairs):
        i, j = pairs[:, 0], pairs[:, 1]
        adjacent = (j - i == 1) | ((i == 0) & (j == n - 1))
        pairs = pairs[~adjacent]
    violations: list[Violation] = []
    raw: list[SelfIntersection] = []
    if len(pairs) == 0:
        return raw, violations
    i, j = pairs[:, 0], pairs[:, 1]
    kind, s, t = classify_segment_pairs(p0[i], p1[i], p0[j], p1[j], tol)
    params_next = np.append(c.params[1:], 1.0)
    for k in np.nonzero(kind == TOUCH)[0]:
        a, b = int(i[k]), int(j[k])
        pt = p0[a] if math.isnan(s[k]) else p0[a] + s[k] * (p1[a] - p0[a])
        violations.append(Violation("tangential", Vec2(*map(float, pt)),
                                    f"non-transversal contact of segments {a} and {b}"))
    for k in np.nonzero(kind == CROSS)[0]:
        a, b = int(i[k]), int(j[k])
        d1 = p1[a] - p0[a]
        d2 = p1[b] - p0[b]
        u1 = Vec2(*(d1 / math.hypot(*d1)))
        u2 = Vec2(*(d2 / math.hypot(*d2)))
        pt = Vec2(*map(float, p0[a] + s[k] * d1))
        c12 = cross2(u1, u2)
        if abs(c12) < min_sin:
            violations.append(Violation("tangential", pt, f"sin(angle) = {abs(c12):.3g}"))
            continue
        tau1 = c.params[a] + s[k] * (params_next[a] - c.params[a])
        tau2 = c.params[b] + t[k] * (params_next[b] - c.params[b])
        raw.append(SelfIntersection(float(tau1), float(tau2), pt, u1, u2, 1 if c12 > 0 else -1,
                                    a, float(s[k]), b, float(t[k])))
    raw.sort(key=lambda x: (x.tau1, x.tau2))

    # merge duplicates produced by neighbouring segments, flag true coincidences
    merged: list[SelfIntersection] = []
    for x in raw:
        dup = False
        for y in merged:
            if math.hypot(x.point.x - y.point.x, x.point.y - y.point.y) <= 3 * tol:
                if abs(x.seg1 - y.seg1) <= 1 and abs(x.seg2 - y.seg2) <= 1:
                    dup = True
                else:
                    violations.append(Violation("multiplicity", x.point,
                                                "three or more passes through one point"))
                    dup = True
                break
        if not dup:
            merged.append(x)
    start = c.points[0]
    for x in merged:
        if math.hypot(x.point.x - start[0], x.point.y - start[1]) <= CLOSURE_RADIUS * tol:
            violations.append(Violation("closure", x.point, "crossing at the closure point"))
    return merged, violations


def find_self_intersections(c: Cycle, tol: float = DEFAULT_TOL,
                            min_sin: float = MIN_SIN) -> list[SelfIntersection]:
    """Transversal self-crossings of the polyline, sorted by (tau1, tau2)."""
    xs, violations = _scan(c, tol, min_sin)
    for v in violations:
        if v.kind == "tangential":
            raise AssumptionViolation(f"tangential self-intersection at ({v.point.x:.6g}, {v.point.y:.6g})")
    for v in violations:
        if v.kind == "multiplicity":
            raise AssumptionViolation(f"multiplicity greater than one at ({v.point.x:.6g}, {v.point.y:.6g})")
    return xs


def validate_assumptions(c: Cycle, xs: list[SelfIntersection] | None = None,
                         tol: float = DEFAULT_TOL, min_sin: float = MIN_SIN) -> AssumptionReport:
    """Report every violation instead of stopping at the first one."""
    _, violations = _scan(c, tol, min_sin)
    if xs:
        start = c.points[0]
        for x in xs:
            if abs(cross2(x.tangent1, x.tangent2)) < min_sin:
                violations.append(Violation("tangential", x.point))
            if (math.hypot(x.point.x - start[0], x.point.y - start[1]) <= CLOSURE_RADIUS * tol
                    and not any(v.kind == "closure" for v in violations)):
                violations.append(Violation("closure", x.point))
    return AssumptionReport(violations)
