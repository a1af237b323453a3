"""Brute-force reference computations used to check the main pipeline.

Nothing here is called by the pipeline itself. The kernel counter evaluates the
trajectory with its own Hermite formula from the raw samples, so it does not
depend on the interpolation used elsewhere.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import ndimage

from .core_geom import DEFAULT_TOL


class OracleError(ValueError):
    pass


def _xy(p) -> tuple[float, float]:
    return (float(p.x), float(p.y)) if hasattr(p, "x") else (float(p[0]), float(p[1]))


def _min_distance(px: float, py: float, pts: np.ndarray) -> float:
    a = pts
    b = np.roll(pts, -1, axis=0)
    ab = b - a
    den = np.einsum("ij,ij->i", ab, ab)
    s = np.clip(((px - a[:, 0]) * ab[:, 0] + (py - a[:, 1]) * ab[:, 1]) / np.where(den > 0, den, 1.0), 0, 1)
    return float(np.min(np.hypot(a[:, 0] + s * ab[:, 0] - px, a[:, 1] + s * ab[:, 1] - py)))


def winding_angle_sum(c, p, tol: float = DEFAULT_TOL) -> int:
    """Winding number of the closed polyline ``c`` around ``p`` by summing turn angles."""
    pts = np.asarray(c.points if hasattr(c, "points") else c, dtype=float)
    px, py = _xy(p)
    if _min_distance(px, py, pts) <= 2 * tol:
        raise OracleError(f"point on curve: ({px:.6g}, {py:.6g})")
    ang = np.arctan2(pts[:, 1] - py, pts[:, 0] - px)
    d = np.diff(np.append(ang, ang[0]))
    d = (d + math.pi) % (2 * math.pi) - math.pi
    turns = float(np.sum(d)) / (2 * math.pi)
    k = round(turns)
    if abs(turns - k) > 1e-6:
        raise OracleError(f"point on curve: angle sum {turns!r} is not an integer")
    return int(k)


def _hermite(t: np.ndarray, y: np.ndarray, m: np.ndarray, tq: np.ndarray) -> np.ndarray:
    k = np.clip(np.searchsorted(t, tq, side="right") - 1, 0, len(t) - 2)
    h = t[k + 1] - t[k]
    s = ((tq - t[k]) / h)[:, None]
    s2, s3 = s * s, s * s * s
    return ((2 * s3 - 3 * s2 + 1) * y[k] + (s3 - 2 * s2 + s) * h[:, None] * m[k]
            + (-2 * s3 + 3 * s2) * y[k + 1] + (s3 - s2) * h[:, None] * m[k + 1])


class KernelCounter:
    """Counts preimages of query points on a fine waterfall grid.

    The grid and its image are computed once; ``count`` can then be called for
    many points.
    """

    def __init__(self, traj, cfg, grid_n: int = 50):
        if grid_n < 50:
            raise OracleError("grid_n must be >= 50")
        t = np.asarray(traj.t, float)
        pose = np.asarray(traj.pose, float)
        vel = np.asarray(traj.vel, float)
        L = float(cfg.range_L)
        if cfg.side == "left":
            lam = np.linspace(0.0, L, grid_n + 1)
        elif cfg.side == "right":
            lam = np.linspace(0.0, -L, grid_n + 1)
        else:
            lam = np.linspace(-L, L, 2 * grid_n + 1)
        speed = float(np.max(np.hypot(vel[:, 0], vel[:, 1]) + np.abs(lam).max() * np.abs(vel[:, 2])))
        step = L / grid_n
        n_t = int(math.ceil(1.25 * (t[-1] - t[0]) * speed / step)) + 1
        tq = np.linspace(t[0], t[-1], n_t)
        st = _hermite(t, pose, vel, tq)
        nx, ny = -np.sin(st[:, 2]), np.cos(st[:, 2])
        self.image = np.stack([st[:, 0:1] + lam[None, :] * nx[:, None],
                               st[:, 1:2] + lam[None, :] * ny[:, None]], axis=-1)
        im = self.image
        steps = [np.hypot(*(im[1:, :] - im[:-1, :]).transpose(2, 0, 1)).max(),
                 np.hypot(*(im[:, 1:] - im[:, :-1]).transpose(2, 0, 1)).max(),
                 np.hypot(*(im[1:, 1:] - im[:-1, :-1]).transpose(2, 0, 1)).max(),
                 np.hypot(*(im[1:, :-1] - im[:-1, 1:]).transpose(2, 0, 1)).max()]
        self.r = 2.0 * float(max(steps))
        # image of the grid boundary and of the fold (sign changes of the local area form)
        du = im[:, 1:] - im[:, :-1]
        dt = im[1:, :] - im[:-1, :]
        area = du[:-1, :, 0] * dt[:, :-1, 1] - du[:-1, :, 1] * dt[:, :-1, 0]
        area = -area  # orientation: positive when moving forward with the beam to the left
        sgn = np.sign(area)
        fold = np.zeros(im.shape[:2], dtype=bool)
        flip_t = sgn[1:, :] != sgn[:-1, :]
        flip_u = sgn[:, 1:] != sgn[:, :-1]
        fold[1:-1, :-1] |= flip_t
        fold[:-1, 1:-1] |= flip_u
        fold[:-1, :-1] |= sgn == 0
        edge = np.zeros(im.shape[:2], dtype=bool)
        edge[0, :] = edge[-1, :] = edge[:, 0] = edge[:, -1] = True
        self._boundary = im[edge | fold]

    def count(self, p) -> int:
        px, py = _xy(p)
        b = self._boundary
        if np.min(np.hypot(b[:, 0] - px, b[:, 1] - py)) < self.r:
            raise OracleError(f"near boundary, count unreliable: ({px:.6g}, {py:.6g})")
        near = np.hypot(self.image[..., 0] - px, self.image[..., 1] - py) < self.r
        _, n = ndimage.label(near, structure=np.ones((3, 3), dtype=int))
        return int(n)


def kernel_count(traj, cfg, p, grid_n: int = 50) -> int:
    """Number of waterfall points mapped onto ``p``, by connected components on a grid."""
    return KernelCounter(traj, cfg, grid_n).count(p)
