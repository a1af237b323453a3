"""Scalar intervals, planar points, boxes, segments and the geometric predicates.

Floating point intervals are widened by one ULP after every arithmetic
operation, which keeps the enclosures conservative without touching the FPU
rounding mode.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional

import numpy as np

DEFAULT_TOL = 1e-9


def _down(x: float) -> float:
    return math.nextafter(x, -math.inf) if math.isfinite(x) else x


def _up(x: float) -> float:
    return math.nextafter(x, math.inf) if math.isfinite(x) else x


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise ValueError("interval bound is NaN")
        if self.lo > self.hi and not (self.lo == math.inf and self.hi == -math.inf):
            raise ValueError(f"invalid interval [{self.lo}, {self.hi}]")

    @classmethod
    def empty(cls) -> "Interval":
        return cls(math.inf, -math.inf)

    @classmethod
    def point(cls, x: float) -> "Interval":
        return cls(x, x)

    @classmethod
    def hull_of(cls, values: Iterable[float]) -> "Interval":
        vals = list(values)
        if not vals:
            return cls.empty()
        return cls(min(vals), max(vals))

    @property
    def is_empty(self) -> bool:
        return self.lo > self.hi

    @property
    def width(self) -> float:
        return 0.0 if self.is_empty else self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return other.is_empty or (self.lo <= other.lo and other.hi <= self.hi)

    def intersects(self, other: "Interval") -> bool:
        return not (self.is_empty or other.is_empty) and self.lo <= other.hi and other.lo <= self.hi

    def hull(self, other: "Interval") -> "Interval":
        if self.is_empty:
            return other
        if other.is_empty:
            return self
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def intersection(self, other: "Interval") -> "Interval":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return Interval(lo, hi) if lo <= hi else Interval.empty()

    def inflate(self, r: float) -> "Interval":
        if self.is_empty:
            return self
        return Interval(_down(self.lo - r), _up(self.hi + r))

    def __add__(self, other) -> "Interval":
        other = _as_interval(other)
        if self.is_empty or other.is_empty:
            return Interval.empty()
        return Interval(_down(self.lo + other.lo), _up(self.hi + other.hi))

    __radd__ = __add__

    def __neg__(self) -> "Interval":
        if self.is_empty:
            return self
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other) -> "Interval":
        return self + (-_as_interval(other))

    def __rsub__(self, other) -> "Interval":
        return _as_interval(other) - self

    def __mul__(self, other) -> "Interval":
        other = _as_interval(other)
        if self.is_empty or other.is_empty:
            return Interval.empty()
        prods = [self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi]
        prods = [0.0 if math.isnan(p) else p for p in prods]  # 0 * inf
        return Interval(_down(min(prods)), _up(max(prods)))

    __rmul__ = __mul__

    def cos(self) -> "Interval":
        if self.is_empty:
            return self
        if self.width >= 2.0 * math.pi:
            return Interval(-1.0, 1.0)
        vals = [math.cos(self.lo), math.cos(self.hi)]
        lo, hi = min(vals), max(vals)
        # any multiple of 2*pi inside -> max 1; any odd multiple of pi -> min -1
        if math.ceil(self.lo / (2.0 * math.pi)) <= math.floor(self.hi / (2.0 * math.pi)):
            hi = 1.0
        if math.ceil((self.lo - math.pi) / (2.0 * math.pi)) <= math.floor((self.hi - math.pi) / (2.0 * math.pi)):
            lo = -1.0
        return Interval(max(-1.0, lo - 4e-16), min(1.0, hi + 4e-16))

    def sin(self) -> "Interval":
        if self.is_empty:
            return self
        shifted = Interval(_down(self.lo - math.pi / 2), _up(self.hi - math.pi / 2))
        return shifted.cos()

    def __repr__(self) -> str:
        if self.is_empty:
            return "Interval(empty)"
        return f"[{self.lo!r}, {self.hi!r}]"


def _as_interval(x) -> Interval:
    return x if isinstance(x, Interval) else Interval(float(x), float(x))


@dataclass(frozen=True)
class Vec2:
    x: float
    y: float

    def __add__(self, o: "Vec2") -> "Vec2":
        return Vec2(self.x + o.x, self.y + o.y)

    def __sub__(self, o: "Vec2") -> "Vec2":
        return Vec2(self.x - o.x, self.y - o.y)

    def __mul__(self, k: float) -> "Vec2":
        return Vec2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def __neg__(self) -> "Vec2":
        return Vec2(-self.x, -self.y)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


Point2 = Vec2


def cross2(a: Vec2, b: Vec2) -> float:
    return a.x * b.y - a.y * b.x


def dot2(a: Vec2, b: Vec2) -> float:
    return a.x * b.x + a.y * b.y


@dataclass(frozen=True)
class Box2:
    x: Interval
    y: Interval

    @classmethod
    def from_bounds(cls, xlo: float, xhi: float, ylo: float, yhi: float) -> "Box2":
        return cls(Interval(xlo, xhi), Interval(ylo, yhi))

    @classmethod
    def empty(cls) -> "Box2":
        return cls(Interval.empty(), Interval.empty())

    @classmethod
    def around(cls, p: Vec2, r: float = 0.0) -> "Box2":
        return cls(Interval(p.x - r, p.x + r), Interval(p.y - r, p.y + r))

    @property
    def is_empty(self) -> bool:
        return self.x.is_empty or self.y.is_empty

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        return (self.x.lo, self.x.hi, self.y.lo, self.y.hi)

    @property
    def width(self) -> float:
        return self.x.width

    @property
    def height(self) -> float:
        return self.y.width

    @property
    def max_side(self) -> float:
        return max(self.width, self.height)

    @property
    def area(self) -> float:
        return 0.0 if self.is_empty else self.width * self.height

    @property
    def center(self) -> Vec2:
        return Vec2(self.x.mid, self.y.mid)

    def corners(self) -> list[Vec2]:
        return [Vec2(self.x.lo, self.y.lo), Vec2(self.x.hi, self.y.lo),
                Vec2(self.x.hi, self.y.hi), Vec2(self.x.lo, self.y.hi)]

    def contains_point(self, p: Vec2) -> bool:
        return self.x.contains(p.x) and self.y.contains(p.y)

    def contains_box(self, other: "Box2") -> bool:
        return self.x.contains_interval(other.x) and self.y.contains_interval(other.y)

    def intersects(self, other: "Box2") -> bool:
        return self.x.intersects(other.x) and self.y.intersects(other.y)

    def intersection(self, other: "Box2") -> "Box2":
        bx, by = self.x.intersection(other.x), self.y.intersection(other.y)
        if bx.is_empty or by.is_empty:
            return Box2.empty()
        return Box2(bx, by)

    def hull(self, other: "Box2") -> "Box2":
        if self.is_empty:
            return other
        if other.is_empty:
            return self
        return Box2(self.x.hull(other.x), self.y.hull(other.y))

    def inflate(self, r: float) -> "Box2":
        return Box2(self.x.inflate(r), self.y.inflate(r))

    def __add__(self, other: "Box2") -> "Box2":
        return Box2(self.x + other.x, self.y + other.y)


def box_bisect(b: Box2) -> tuple[Box2, Box2]:
    """Split a box in two along its longest side (x wins ties)."""
    if b.is_empty or b.max_side <= 0.0:
        raise ValueError("degenerate bisect")
    if b.width >= b.height:
        m = b.x.mid
        return Box2(Interval(b.x.lo, m), b.y), Box2(Interval(m, b.x.hi), b.y)
    m = b.y.mid
    return Box2(b.x, Interval(b.y.lo, m)), Box2(b.x, Interval(m, b.y.hi))


@dataclass(frozen=True)
class Segment2:
    a: Vec2
    b: Vec2

    @property
    def is_degenerate(self) -> bool:
        return self.a == self.b

    def length(self) -> float:
        return (self.b - self.a).norm()


class Contact(NamedTuple):
    """Outcome of a segment/segment test that found some contact.

    ``kind`` is ``"cross"`` for a proper transversal crossing and ``"touch"``
    for collinear overlap or endpoint contact.
    """

    kind: str
    point: Vec2
    params: tuple[float, float]


CROSS, TOUCH, NONE = 1, 2, 0


def classify_segment_pairs(a0, a1, b0, b1, tol: float = DEFAULT_TOL):
    """Vectorised segment/segment classification.

    All arguments are ``(n, 2)`` arrays. Returns ``(kind, s, t)`` where kind
    holds CROSS / TOUCH / NONE and s, t are the parameters of the contact
    along each segment (NaN when there is none or the pair is collinear).
    """
    a0 = np.asarray(a0, float)
    a1 = np.asarray(a1, float)
    b0 = np.asarray(b0, float)
    b1 = np.asarray(b1, float)
    d1 = a1 - a0
    d2 = b1 - b0
    r = b0 - a0
    l1 = np.hypot(d1[:, 0], d1[:, 1])
    l2 = np.hypot(d2[:, 0], d2[:, 1])
    denom = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    rxd2 = r[:, 0] * d2[:, 1] - r[:, 1] * d2[:, 0]
    rxd1 = r[:, 0] * d1[:, 1] - r[:, 1] * d1[:, 0]
    n = len(a0)
    kind = np.zeros(n, dtype=np.int8)
    s = np.full(n, np.nan)
    t = np.full(n, np.nan)

    parallel = np.abs(denom) <= 1e-12 * l1 * l2
    ok = ~parallel & (l1 > 0) & (l2 > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ss = np.where(ok, rxd2 / denom, np.nan)
        tt = np.where(ok, rxd1 / denom, np.nan)
        ts = tol / l1
        tt_tol = tol / l2
    inner = ok & (ss > ts) & (ss < 1 - ts) & (tt > tt_tol) & (tt < 1 - tt_tol)
    near = ok & ~inner & (ss >= -ts) & (ss <= 1 + ts) & (tt >= -tt_tol) & (tt <= 1 + tt_tol)
    kind[inner] = CROSS
    kind[near] = TOUCH
    s[inner | near] = ss[inner | near]
    t[inner | near] = tt[inner | near]

    # parallel pairs: touching only if collinear within tol and overlapping
    par = np.nonzero(parallel)[0]
    if len(par):
        for k in par:
            kind[k] = _parallel_contact(a0[k], a1[k], b0[k], b1[k], tol)
    return kind, s, t


def _parallel_contact(a0, a1, b0, b1, tol) -> int:
    def pt_seg(p, q0, q1):
        d = q1 - q0
        L2 = float(d @ d)
        if L2 == 0.0:
            return float(np.hypot(*(p - q0)))
        u = min(1.0, max(0.0, float((p - q0) @ d) / L2))
        return float(np.hypot(*(p - (q0 + u * d))))

    dmin = min(pt_seg(a0, b0, b1), pt_seg(a1, b0, b1), pt_seg(b0, a0, a1), pt_seg(b1, a0, a1))
    return TOUCH if dmin <= tol else NONE


def segment_intersect(s1: Segment2, s2: Segment2, tol: float = DEFAULT_TOL) -> Optional[Contact]:
    if tol <= 0:
        raise ValueError("tol must be positive")
    a0 = np.array([[s1.a.x, s1.a.y]])
    a1 = np.array([[s1.b.x, s1.b.y]])
    b0 = np.array([[s2.a.x, s2.a.y]])
    b1 = np.array([[s2.b.x, s2.b.y]])
    kind, s, t = classify_segment_pairs(a0, a1, b0, b1, tol)
    if kind[0] == NONE:
        return None
    if np.isnan(s[0]):
        return Contact("touch", s1.a, (math.nan, math.nan))
    p = s1.a + (s1.b - s1.a) * float(s[0])
    return Contact("cross" if kind[0] == CROSS else "touch", p, (float(s[0]), float(t[0])))


def segments_meet_box(p0: np.ndarray, p1: np.ndarray, box: Box2, pad: float = 0.0) -> np.ndarray:
    """Boolean mask of segments ``p0[i] -> p1[i]`` meeting the (padded) closed box."""
    xlo, xhi, ylo, yhi = box.x.lo - pad, box.x.hi + pad, box.y.lo - pad, box.y.hi + pad
    sxlo = np.minimum(p0[:, 0], p1[:, 0])
    sxhi = np.maximum(p0[:, 0], p1[:, 0])
    sylo = np.minimum(p0[:, 1], p1[:, 1])
    syhi = np.maximum(p0[:, 1], p1[:, 1])
    mask = (sxhi >= xlo) & (sxlo <= xhi) & (syhi >= ylo) & (sylo <= yhi)
    if not mask.any():
        return mask
    idx = np.nonzero(mask)[0]
    d = p1[idx] - p0[idx]
    cx = np.array([xlo, xhi, xhi, xlo])
    cy = np.array([ylo, ylo, yhi, yhi])
    side = d[:, 0:1] * (cy[None, :] - p0[idx, 1:2]) - d[:, 1:2] * (cx[None, :] - p0[idx, 0:1])
    straddle = (side.min(axis=1) <= 0.0) & (side.max(axis=1) >= 0.0)
    mask[idx] = straddle
    return mask


def point_segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distances from point ``p`` (shape (2,)) to segments ``a[i] -> b[i]``."""
    d = b - a
    L2 = np.einsum("ij,ij->i", d, d)
    w = p[None, :] - a
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(L2 > 0, np.einsum("ij,ij->i", w, d) / L2, 0.0)
    u = np.clip(u, 0.0, 1.0)
    q = a + u[:, None] * d
    return np.hypot(p[0] - q[:, 0], p[1] - q[:, 1])
