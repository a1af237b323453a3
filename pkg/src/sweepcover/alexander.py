"""Planar cell complex of a cycle, Alexander numbering of its faces and winding sets.

The cycle is cut at its self-intersections into 1-cells. Faces are traced on a
half-edge structure: every half-edge keeps its face on the left, and at a vertex
the walk continues with the outgoing half-edge that comes first clockwise after
the reverse of the incoming one.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .contour import Cycle
from .core_geom import DEFAULT_TOL, NONE, classify_segment_pairs
from .intersect import AssumptionViolation, SelfIntersection


class ArrangementError(AssumptionViolation):
    pass


@dataclass(frozen=True, eq=False)
class Edge:
    from_tau: float
    to_tau: float
    polyline: np.ndarray
    left_face: int
    right_face: int
    start_vertex: int = -1
    end_vertex: int = -1


@dataclass(frozen=True, eq=False)
class Face:
    id: int
    boundary: tuple[tuple[int, ...], ...]  # loops of half-edge ids (2e forward, 2e+1 backward)
    winding: Optional[int]
    is_unbounded: bool
    area: float
    sample: Optional[tuple[float, float]]


@dataclass(frozen=True, eq=False)
class CellComplex:
    cycle: Cycle
    vertices: tuple[SelfIntersection, ...]
    edges: tuple[Edge, ...]
    faces: tuple[Face, ...]
    tol: float = DEFAULT_TOL
    _seg_cache: dict = field(default_factory=dict, repr=False)

    @property
    def unbounded(self) -> int:
        return next(f.id for f in self.faces if f.is_unbounded)

    @property
    def labeled(self) -> bool:
        return all(f.winding is not None for f in self.faces)

    @property
    def max_label(self) -> int:
        return max(f.winding for f in self.faces)

    @property
    def min_label(self) -> int:
        return min(f.winding for f in self.faces)

    def edge_labels(self) -> list[tuple[int, int]]:
        """(left winding, right winding) for every edge."""
        w = [f.winding for f in self.faces]
        return [(w[e.left_face], w[e.right_face]) for e in self.edges]

    def segments(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """All edge segments as arrays (a, b, left label, right label)."""
        if "all" not in self._seg_cache:
            a, b, lo, ro = [], [], [], []
            labels = self.edge_labels() if self.labeled else [(0, 0)] * len(self.edges)
            for e, (wl, wr) in zip(self.edges, labels):
                pl = e.polyline
                a.append(pl[:-1])
                b.append(pl[1:])
                lo.append(np.full(len(pl) - 1, wl))
                ro.append(np.full(len(pl) - 1, wr))
            self._seg_cache["all"] = (np.concatenate(a), np.concatenate(b),
                                      np.concatenate(lo), np.concatenate(ro))
        return self._seg_cache["all"]


def _event_tangent(x: SelfIntersection, which: int) -> np.ndarray:
    t = x.tangent1 if which == 1 else x.tangent2
    return np.array([t.x, t.y])


def _polygon_area(pts: np.ndarray) -> float:
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _split_edges(c: Cycle, xs: list[SelfIntersection]):
    """Cut the cycle at the intersection events; returns edges as raw tuples."""
    pts = c.points
    n = len(pts)
    events = []
    for k, x in enumerate(xs):
        events.append((x.seg1, x.s1, x.tau1, k, 1))
        events.append((x.seg2, x.s2, x.tau2, k, 2))
    events.sort(key=lambda ev: (ev[0], ev[1], ev[2]))
    out = []
    m = len(events)
    for e in range(m):
        seg0, s0, tau0, k0, w0 = events[e]
        seg1, s1, tau1, k1, w1 = events[(e + 1) % m]
        p0 = np.array([xs[k0].point.x, xs[k0].point.y])
        p1 = np.array([xs[k1].point.x, xs[k1].point.y])
        end = seg1 if e + 1 < m else seg1 + n
        mid = [pts[(i % n)] for i in range(seg0 + 1, end + 1)]
        poly = np.vstack([p0] + mid + [p1]) if mid else np.vstack([p0, p1])
        out.append((tau0, tau1, poly, k0, k1, _event_tangent(xs[k0], w0), _event_tangent(xs[k1], w1)))
    return out


def _face_sample(c: Cycle, poly: np.ndarray, tol: float) -> Optional[tuple[float, float]]:
    """A point strictly inside the face lying to the left of ``poly``.

    Tries the midpoints of the longest segments, offset to the left by a
    shrinking distance, and accepts the first one whose offset path crosses
    nothing and which keeps clear of the curve.
    """
    a0, a1 = c.segments
    d = poly[1:] - poly[:-1]
    lens = np.hypot(d[:, 0], d[:, 1])
    for k in np.argsort(-lens, kind="stable")[:16]:
        ln = lens[k]
        if ln <= 0:
            continue
        m = 0.5 * (poly[k] + poly[k + 1])
        nrm = np.array([-d[k, 1], d[k, 0]]) / ln
        dist = 0.25 * ln
        for _ in range(40):
            if dist < 100 * tol:
                break
            q = m + dist * nrm
            start = m + 1e-6 * dist * nrm
            kind, _, _ = classify_segment_pairs(np.broadcast_to(start, a0.shape), np.broadcast_to(q, a0.shape),
                                                a0, a1, tol)
            if np.all(kind == NONE):
                gap = _point_polyline_distance(q, a0, a1)
                if gap > max(0.2 * dist, 100 * tol):
                    return float(q[0]), float(q[1])
            dist *= 0.5
    return None


def _point_polyline_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    ab = b - a
    den = np.einsum("ij,ij->i", ab, ab)
    s = np.clip(np.einsum("ij,ij->i", p - a, ab) / np.where(den > 0, den, 1.0), 0.0, 1.0)
    q = a + s[:, None] * ab
    return float(np.min(np.hypot(q[:, 0] - p[0], q[:, 1] - p[1])))


def build_cell_complex(c: Cycle, xs: list[SelfIntersection], tol: float = DEFAULT_TOL) -> CellComplex:
    """Half-edge arrangement of ``c`` cut at the crossings ``xs``."""
    if not xs:
        poly = np.vstack([c.points, c.points[:1]])
        inside_left = c.signed_area() > 0
        left, right = (0, 1) if inside_left else (1, 0)
        edge = Edge(0.0, 1.0, poly, left, right)
        area = abs(c.signed_area())
        inner_poly = poly if inside_left else poly[::-1]
        inner_sample = _face_sample(c, inner_poly, tol)
        outer_sample = _face_sample(c, poly[::-1] if inside_left else poly, tol)
        faces = [None, None]
        faces[left] = Face(left, ((0,),), None, not inside_left, area if inside_left else -area,
                           inner_sample if inside_left else outer_sample)
        faces[right] = Face(right, ((1,),), None, inside_left, -area if inside_left else area,
                            outer_sample if inside_left else inner_sample)
        return CellComplex(c, (), (edge,), tuple(faces), tol)

    raw = _split_edges(c, xs)
    n_e = len(raw)
    origin = np.empty(2 * n_e, dtype=int)
    angle = np.empty(2 * n_e)
    for e, (_, _, _, k0, k1, d0, d1) in enumerate(raw):
        origin[2 * e] = k0
        origin[2 * e + 1] = k1
        angle[2 * e] = math.atan2(d0[1], d0[0])
        angle[2 * e + 1] = math.atan2(-d1[1], -d1[0])
    outgoing: dict[int, list[int]] = {}
    for h in range(2 * n_e):
        outgoing.setdefault(int(origin[h]), []).append(h)
    for v, hs in outgoing.items():
        hs.sort(key=lambda h: angle[h])
        if len(hs) != 4:
            raise ArrangementError(f"arrangement failure at vertex {v}: degree {len(hs)}")
        ang = sorted(angle[h] for h in hs)
        if min(np.diff(ang + [ang[0] + 2 * math.pi])) <= 0:
            raise ArrangementError(f"arrangement failure at vertex {v}: coincident directions")

    def nxt(h: int) -> int:
        twin = h ^ 1
        hs = outgoing[int(origin[twin])]
        i = hs.index(twin)
        return hs[(i - 1) % len(hs)]

    face_of = np.full(2 * n_e, -1, dtype=int)
    loops: list[list[int]] = []
    for h0 in range(2 * n_e):
        if face_of[h0] >= 0:
            continue
        loop = []
        h = h0
        while face_of[h] < 0:
            face_of[h] = len(loops)
            loop.append(h)
            h = nxt(h)
            if len(loop) > 2 * n_e:
                break
        if h != h0:
            raise ArrangementError(f"arrangement failure at vertex {int(origin[h0])}: open face trace")
        loops.append(loop)

    def half_poly(h: int) -> np.ndarray:
        pl = raw[h // 2][2]
        return pl if h % 2 == 0 else pl[::-1]

    polys = [np.vstack([half_poly(h)[:-1] for h in loop]) for loop in loops]
    areas = [_polygon_area(p) for p in polys]
    negative = [i for i, a in enumerate(areas) if a < 0]
    if len(negative) != 1:
        raise ArrangementError(f"arrangement failure at vertex {int(origin[0])}: "
                               f"{len(negative)} candidate unbounded faces")
    n_v = len(xs)
    if n_v - n_e + len(loops) != 2:
        raise ArrangementError(f"arrangement failure at vertex {int(origin[0])}: Euler relation")

    faces = []
    for i, loop in enumerate(loops):
        sample = None
        for h in sorted(loop, key=lambda h: -len(raw[h // 2][2])):
            sample = _face_sample(c, half_poly(h), tol)
            if sample is not None:
                break
        faces.append(Face(i, (tuple(loop),), None, i == negative[0], areas[i], sample))
    edges = tuple(Edge(r[0], r[1], r[2], int(face_of[2 * e]), int(face_of[2 * e + 1]), r[3], r[4])
                  for e, r in enumerate(raw))
    return CellComplex(c, tuple(xs), edges, tuple(faces), tol)


def alexander_numbering(cx: CellComplex) -> CellComplex:
    """Label faces breadth-first from the unbounded face (label 0).

    Across every edge the face on its left is one more than the face on its right.
    """
    n_f = len(cx.faces)
    nbrs: list[list[tuple[int, int]]] = [[] for _ in range(n_f)]
    for e in cx.edges:
        nbrs[e.right_face].append((e.left_face, +1))
        nbrs[e.left_face].append((e.right_face, -1))
    label: list[Optional[int]] = [None] * n_f
    start = cx.unbounded
    label[start] = 0
    queue = deque([start])
    while queue:
        f = queue.popleft()
        for g, step in nbrs[f]:
            want = label[f] + step
            if label[g] is None:
                label[g] = want
                queue.append(g)
            elif label[g] != want:
                raise ArrangementError(f"non-orientable numbering at face {g}")
    if any(v is None for v in label):
        raise ArrangementError("non-orientable numbering: unreachable face")
    faces = tuple(replace(f, winding=label[f.id]) for f in cx.faces)
    return CellComplex(cx.cycle, cx.vertices, cx.edges, faces, cx.tol)


def crossing_parity(points: np.ndarray, a: np.ndarray, b: np.ndarray, chunk: int = 4096) -> np.ndarray:
    """Half-open ray crossing parity of ``points`` against the closed segment set (a, b)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    out = np.zeros(len(points), dtype=bool)
    if len(a) == 0:
        return out
    ay, by = a[:, 1], b[:, 1]
    dy = by - ay
    safe = np.where(dy != 0, dy, 1.0)
    step = max(1, int(2e7 // max(1, len(a))))
    step = min(step, chunk)
    for s in range(0, len(points), step):
        P = points[s:s + step]
        py = P[:, 1:2]
        px = P[:, 0:1]
        straddle = (ay > py) != (by > py)
        xi = a[:, 0] + (py - ay) * (b[:, 0] - a[:, 0]) / safe
        hits = straddle & (px < xi)
        out[s:s + step] = (np.count_nonzero(hits, axis=1) % 2) == 1
    return out


@dataclass(frozen=True, eq=False)
class WindingSet:
    """Closed region where the winding number is at least ``level``.

    Negative levels describe the mirrored construction: the closure of the
    region where the winding is at most ``level``.
    """

    level: int
    edges: tuple[int, ...]
    a: np.ndarray
    b: np.ndarray
    tol: float = DEFAULT_TOL

    @property
    def boundary(self) -> list[np.ndarray]:
        return [np.vstack([self.a[i:i + 1], self.b[i:i + 1]]) for i in range(len(self.a))]

    def near_boundary(self, points: np.ndarray, dist: float) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.zeros(len(points), dtype=bool)
        if len(self.a) == 0:
            return out
        ab = self.b - self.a
        den = np.einsum("ij,ij->i", ab, ab)
        den = np.where(den > 0, den, 1.0)
        for s in range(0, len(points), 1024):
            P = points[s:s + 1024, None, :]
            t = np.clip(np.einsum("mkj,kj->mk", P - self.a, ab) / den, 0.0, 1.0)
            q = self.a + t[..., None] * ab
            d = np.hypot(q[..., 0] - P[..., 0], q[..., 1] - P[..., 1])
            out[s:s + 1024] = d.min(axis=1) <= dist
        return out

    def contains_many(self, points) -> np.ndarray:
        return crossing_parity(points, self.a, self.b) | self.near_boundary(points, self.tol)

    def contains(self, p) -> bool:
        x, y = (p.x, p.y) if hasattr(p, "x") else p
        return bool(self.contains_many(np.array([[x, y]]))[0])


def winding_sets(cx: CellComplex, negative: bool = False) -> list[WindingSet]:
    """W_1 .. W_max of a labeled complex; with ``negative`` the mirrored sets W_-1 .. W_min."""
    if not cx.labeled:
        raise ValueError("complex is not labeled")
    labels = cx.edge_labels()
    top = -cx.min_label if negative else cx.max_label
    out = []
    for i in range(1, top + 1):
        if negative:
            chosen = [k for k, (_, wr) in enumerate(labels) if wr == -i]
        else:
            chosen = [k for k, (wl, _) in enumerate(labels) if wl == i]
        a = np.concatenate([cx.edges[k].polyline[:-1] for k in chosen])
        b = np.concatenate([cx.edges[k].polyline[1:] for k in chosen])
        out.append(WindingSet(-i if negative else i, tuple(chosen), a, b, cx.tol))
    return out


def complex_of(c: Cycle, tol: float = DEFAULT_TOL) -> CellComplex:
    """Intersections, arrangement and numbering in one call."""
    from .intersect import find_self_intersections

    return alexander_numbering(build_cell_complex(c, find_self_intersections(c, tol), tol))
