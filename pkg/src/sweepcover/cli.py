"""Command line front end: ingestion, mission runs, paving files, summaries and SVG."""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .contour import DEFAULT_SAMPLING
from .core_geom import DEFAULT_TOL, Box2
from .coverage import CoverageValue, Paving, build_coverage_model, explored_area, sivia
from .intersect import AssumptionViolation
from .sweep_model import PoseTrajectory, SensorConfig

EXIT_OK, EXIT_ASSUMPTION, EXIT_INPUT = 0, 2, 3
PAVING_FORMAT = "sweepcover-paving 1"


class InputError(ValueError):
    pass


# ---------------------------------------------------------------------------
# ingestion

def _read_rows(path: str, required: Sequence[str]) -> tuple[list[str], list[list[float]]]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}") from e
    rows = [r for r in rows if r and any(c.strip() for c in r)]
    if not rows:
        raise InputError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    missing = [c for c in required if c not in header]
    if missing:
        raise InputError(f"{path}: missing columns {', '.join(missing)}")
    data = []
    for line, r in enumerate(rows[1:], start=2):
        if len(r) != len(header):
            raise InputError(f"{path}: invalid value at row {line}: expected {len(header)} fields")
        try:
            vals = [float(c) for c in r]
        except ValueError:
            raise InputError(f"{path}: invalid value at row {line}") from None
        if not all(math.isfinite(v) for v in vals):
            raise InputError(f"{path}: invalid value at row {line}")
        data.append(vals)
    return header, data


def ingest_trajectory(path: str) -> PoseTrajectory:
    """Read a ``t,x,y,psi[,vx,vy,ax,ay]`` CSV file into a validated trajectory."""
    header, data = _read_rows(path, ("t", "x", "y", "psi"))
    if len(data) < 2:
        raise InputError(f"{path}: too short: {len(data)} data rows")
    arr = np.array(data)
    col = {name: arr[:, k] for k, name in enumerate(header)}
    t = col["t"]
    bad = np.nonzero(np.diff(t) <= 0)[0]
    if len(bad):
        raise InputError(f"{path}: time order violated at row {int(bad[0]) + 3}")
    report = []
    psi = np.unwrap(col["psi"])
    if "vx" in col and "vy" in col:
        vx, vy = col["vx"], col["vy"]
    else:
        vx = np.gradient(col["x"], t)
        vy = np.gradient(col["y"], t)
        report.append("velocity reconstructed by finite differences")
    vpsi = np.gradient(psi, t)
    vel = np.column_stack([vx, vy, vpsi])
    if "ax" in col and "ay" in col:
        acc = np.column_stack([col["ax"], col["ay"], np.gradient(vpsi, t)])
    else:
        acc = None
        report.append("acceleration reconstructed by finite differences")
    try:
        return PoseTrajectory(t, np.column_stack([col["x"], col["y"], psi]), vel, acc, report=report)
    except ValueError as e:
        raise InputError(f"{path}: {e}") from e


def read_tube(path: str):
    from .uncertain import Tube

    cols = ("t", "x_lo", "x_hi", "y_lo", "y_hi", "vx_lo", "vx_hi", "vy_lo", "vy_hi")
    header, data = _read_rows(path, cols)
    if len(data) < 2:
        raise InputError(f"{path}: too short: {len(data)} data rows")
    arr = np.array(data)
    c = {name: arr[:, k] for k, name in enumerate(header)}
    try:
        return Tube(c["t"], np.column_stack([c["x_lo"], c["y_lo"]]), np.column_stack([c["x_hi"], c["y_hi"]]),
                    np.column_stack([c["vx_lo"], c["vy_lo"]]), np.column_stack([c["vx_hi"], c["vy_hi"]]))
    except ValueError as e:
        if isinstance(e, AssumptionViolation):
            raise
        raise InputError(f"{path}: {e}") from e


# ---------------------------------------------------------------------------
# configuration

@dataclass(frozen=True)
class MissionConfig:
    traj: str
    range_L: float
    side: str = "left"
    roi: Optional[Box2] = None
    epsilon: float = 0.05
    tol: float = DEFAULT_TOL
    tube: Optional[str] = None
    inflate: Optional[tuple[float, float]] = None
    out: str = "out"
    svg: Optional[str] = None
    split: tuple[float, ...] = ()
    trace: Optional[str] = None
    sampling: float = DEFAULT_SAMPLING

    def __post_init__(self):
        if not self.epsilon > 0:
            raise InputError("epsilon must be > 0")
        if not self.range_L > 0:
            raise InputError("range must be > 0")
        if self.side not in ("left", "right", "both"):
            raise InputError(f"unknown side {self.side!r}")
        if self.roi is not None and (self.roi.is_empty or self.roi.width <= 0 or self.roi.height <= 0):
            raise InputError("roi must be a nonempty box")
        if self.tube and self.inflate:
            raise InputError("--tube and --inflate are exclusive")


def _floats(text, n: Optional[int] = None, name: str = "value") -> tuple[float, ...]:
    if isinstance(text, (list, tuple)):
        vals = tuple(float(v) for v in text)
    else:
        try:
            vals = tuple(float(v) for v in str(text).split(",") if v.strip())
        except ValueError:
            raise InputError(f"invalid {name}: {text!r}") from None
    if n is not None and len(vals) != n:
        raise InputError(f"invalid {name}: expected {n} numbers")
    return vals


def config_from_args(ns: argparse.Namespace) -> MissionConfig:
    merged: dict = {}
    if ns.config:
        try:
            with open(ns.config, encoding="utf-8") as fh:
                merged.update(json.load(fh))
        except (OSError, json.JSONDecodeError) as e:
            raise InputError(f"cannot read config {ns.config}: {e}") from e
    for key in ("traj", "range", "side", "roi", "epsilon", "tol", "tube", "inflate", "out", "svg",
                "split", "trace", "sampling"):
        val = getattr(ns, key, None)
        if val is not None:
            merged[key] = val
    if "traj" not in merged or "range" not in merged:
        raise InputError("--traj and --range are required")
    roi = None
    if merged.get("roi") is not None:
        x0, x1, y0, y1 = _floats(merged["roi"], 4, "roi")
        roi = Box2.from_bounds(x0, x1, y0, y1)
    inflate = None
    if merged.get("inflate") is not None:
        vals = _floats(merged["inflate"], None, "inflate")
        if len(vals) not in (1, 2) or min(vals) < 0:
            raise InputError("invalid inflate: expected r or r,rv with nonnegative values")
        inflate = (vals[0], vals[1] if len(vals) == 2 else 0.0)
    return MissionConfig(
        traj=str(merged["traj"]), range_L=float(merged["range"]), side=str(merged.get("side", "left")),
        roi=roi, epsilon=float(merged.get("epsilon", 0.05)), tol=float(merged.get("tol", DEFAULT_TOL)),
        tube=merged.get("tube"), inflate=inflate, out=str(merged.get("out", "out")), svg=merged.get("svg"),
        split=_floats(merged["split"], None, "split") if merged.get("split") is not None else (),
        trace=merged.get("trace"), sampling=float(merged.get("sampling", DEFAULT_SAMPLING)))


# ---------------------------------------------------------------------------
# paving file

def _fmt(x: float) -> str:
    return repr(float(x))


def write_paving(p: Paving, path: str) -> None:
    lines = [f"# {PAVING_FORMAT}", f"# tool sweepcover {__version__}",
             "# roi " + " ".join(_fmt(v) for v in p.roi.bounds), f"# epsilon {_fmt(p.epsilon)}",
             "# columns x_lo x_hi y_lo y_hi cm_lo cm_hi"]
    for b, v in p.leaves:
        lines.append(" ".join(_fmt(x) for x in b.bounds) + f" {v.lo} {v.hi}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_paving(path: str) -> Paving:
    roi = None
    eps = None
    leaves = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if parts[:1] == ["roi"]:
                    roi = Box2.from_bounds(*map(float, parts[1:5]))
                elif parts[:1] == ["epsilon"]:
                    eps = float(parts[1])
                continue
            f = line.split()
            leaves.append((Box2.from_bounds(*map(float, f[:4])), CoverageValue(int(f[4]), int(f[5]))))
    if roi is None or eps is None:
        raise InputError(f"{path}: missing paving header")
    return Paving(roi, leaves, eps)


# ---------------------------------------------------------------------------
# SVG

PALETTE = {0: "#ffffff", 1: "#d9d9d9", 2: "#a6a6a6"}
DARK, UNCERTAIN = "#595959", "#000000"


def leaf_color(v: CoverageValue) -> str:
    if not v.is_singleton:
        return UNCERTAIN
    return PALETTE.get(v.lo, DARK)


def render_svg(p: Paving, contours: Sequence[np.ndarray], path: str, width: int = 800) -> None:
    x0, x1, y0, y1 = p.roi.bounds
    scale = width / (x1 - x0)
    height = max(1, int(round((y1 - y0) * scale)))

    def X(x):
        return f"{(x - x0) * scale:.3f}"

    def Y(y):
        return f"{(y1 - y) * scale:.3f}"

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">']
    for b, v in p.leaves:
        bx0, bx1, by0, by1 = b.bounds
        out.append(f'<rect x="{X(bx0)}" y="{Y(by1)}" width="{(bx1 - bx0) * scale:.3f}" '
                   f'height="{(by1 - by0) * scale:.3f}" fill="{leaf_color(v)}" stroke="none"/>')
    for pts in contours:
        coords = " ".join(f"{X(x)},{Y(y)}" for x, y in pts)
        out.append(f'<polygon points="{coords}" fill="none" stroke="#d62728" stroke-width="1"/>')
    out.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")


# ---------------------------------------------------------------------------
# trace export

def complex_trace(cx) -> dict:
    return {
        "vertices": [{"tau1": x.tau1, "tau2": x.tau2, "point": [x.point.x, x.point.y], "update": x.update}
                     for x in cx.vertices],
        "edges": [{"from_tau": e.from_tau, "to_tau": e.to_tau, "left_face": e.left_face,
                   "right_face": e.right_face, "n_points": int(len(e.polyline))} for e in cx.edges],
        "faces": [{"id": f.id, "winding": f.winding, "is_unbounded": f.is_unbounded, "area": f.area,
                   "sample": list(f.sample) if f.sample else None} for f in cx.faces],
    }


# ---------------------------------------------------------------------------
# orchestration

def _windows(traj: PoseTrajectory, cuts: Sequence[float]) -> list[PoseTrajectory]:
    edges = [traj.t_start] + sorted(c for c in cuts if traj.t_start < c < traj.t_end) + [traj.t_end]
    if len(edges) == 2:
        return [traj]
    return [traj.window(a, b) for a, b in zip(edges[:-1], edges[1:])]


def _default_roi(contours: Sequence[np.ndarray], margin: float) -> Box2:
    pts = np.concatenate(contours)
    return Box2.from_bounds(pts[:, 0].min() - margin, pts[:, 0].max() + margin,
                            pts[:, 1].min() - margin, pts[:, 1].max() + margin)


def run_mission(cfg: MissionConfig) -> dict:
    """Classify the region of interest and write the paving, the summary and optional extras."""
    traj = ingest_trajectory(cfg.traj)
    sensor = SensorConfig(cfg.range_L, cfg.side)
    trace = None
    if cfg.tube or cfg.inflate:
        from .uncertain import Tube, build_uncertain, classify_uncertain

        tube = read_tube(cfg.tube) if cfg.tube else Tube.from_trajectory(traj, *cfg.inflate)
        cts, vertices = build_uncertain(tube, sensor, cfg.split, cfg.sampling, cfg.tol)
        contours = [ct.cycle.points for ct in cts]
        roi = cfg.roi or _default_roi(contours, max(ct.max_radius for ct in cts) + cfg.epsilon)
        paving = classify_uncertain(cts, roi, cfg.epsilon)
        mode = "uncertain"
        violations = "pass"
        if cfg.trace:
            trace = {"parts": [complex_trace(ct.complex()) for ct in cts],
                     "uncertain_vertices": [[{"windows": v.windows, "update": v.update} for v in vs]
                                            for vs in vertices]}
    else:
        models = [build_coverage_model(w, sensor, cfg.sampling, cfg.tol) for w in _windows(traj, cfg.split)]
        plus = [cx for m in models for cx in m.plus]
        minus = [cx for m in models for cx in m.minus]
        contours = [cx.cycle.points for cx in plus + minus]
        roi = cfg.roi or _default_roi(contours, cfg.epsilon)
        paving = sivia(roi, cfg.epsilon, plus, minus, cfg.tol)
        mode = "certain"
        violations = "; ".join(str(m.report) for m in models)
        if cfg.trace:
            trace = {"parts": [{"plus": [complex_trace(cx) for cx in m.plus],
                                "minus": [complex_trace(cx) for cx in m.minus]} for m in models]}

    _, _, inner_area, outer_area = explored_area(paving)
    summary = {
        "mode": mode,
        "roi": list(paving.roi.bounds),
        "epsilon": cfg.epsilon,
        "inner_area": inner_area,
        "outer_area": outer_area,
        "max_level": max([v.hi for _, v in paving.leaves] + [0]),
        "max_certain_level": max([v.lo for _, v in paving.leaves] + [0]),
        "leaf_counts": paving.counts(),
        "n_leaves": len(paving.leaves),
        "flagged_leaves": paving.flagged,
        "assumptions": violations,
        "load_report": list(traj.report),
        "split": list(cfg.split),
    }
    os.makedirs(cfg.out, exist_ok=True)
    paving_path = os.path.join(cfg.out, "paving.txt")
    summary_path = os.path.join(cfg.out, "summary.json")
    write_paving(paving, paving_path)
    with open(summary_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    artifacts = {"paving": paving_path, "summary": summary_path, "summary_data": summary, "paving_data": paving}
    if cfg.svg:
        render_svg(paving, contours, cfg.svg)
        artifacts["svg"] = cfg.svg
    if cfg.trace:
        with open(cfg.trace, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(trace, fh, indent=1, sort_keys=True)
            fh.write("\n")
        artifacts["trace"] = cfg.trace
    return artifacts


# ---------------------------------------------------------------------------
# entry point

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sweepcover", description="Coverage measure of a line-sweep sensor.")
    ap.add_argument("--version", action="version", version=f"sweepcover {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="classify a region of interest by coverage")
    run.add_argument("--config", help="JSON file with default values; flags win")
    run.add_argument("--traj", help="trajectory CSV (t,x,y,psi[,vx,vy,ax,ay])")
    run.add_argument("--range", type=float, help="sensor range L in metres")
    run.add_argument("--side", choices=("left", "right", "both"))
    run.add_argument("--roi", help="xmin,xmax,ymin,ymax (default: contour bounds)")
    run.add_argument("--epsilon", type=float, help="paving precision in metres (default 0.05)")
    run.add_argument("--tol", type=float, help="geometric tolerance (default 1e-9)")
    run.add_argument("--tube", help="tube CSV for an uncertain trajectory")
    run.add_argument("--inflate", help="r[,rv]: build a tube around the trajectory")
    run.add_argument("--split", help="t1,t2,...: cut the mission at these times")
    run.add_argument("--out", help="output directory (default: out)")
    run.add_argument("--svg", help="write an SVG rendering to this path")
    run.add_argument("--trace", help="write the cell complexes as JSON to this path")
    run.add_argument("--sampling", type=float, help="contour sampling step in metres (default 0.05)")

    orc = sub.add_parser("oracle", help="brute-force reference values at one point")
    orc.add_argument("--traj", required=True)
    orc.add_argument("--range", type=float, required=True)
    orc.add_argument("--side", choices=("left", "right", "both"), default="left")
    orc.add_argument("--point", required=True, help="x,y")
    orc.add_argument("--grid", type=int, default=50, help="waterfall grid size (>= 50)")
    return ap


def _oracle(ns) -> int:
    from .contour import build_contour
    from .oracle import kernel_count, winding_angle_sum

    traj = ingest_trajectory(ns.traj)
    sensor = SensorConfig(ns.range, ns.side)
    p = _floats(ns.point, 2, "point")
    out = {"point": list(p)}
    for key, fn in (("kernel_count", lambda: kernel_count(traj, sensor, p, ns.grid)),
                    ("contour_winding", lambda: winding_angle_sum(build_contour(traj, sensor), p))):
        try:
            out[key] = fn()
        except ValueError as e:
            out[key] = f"error: {e}"
    model = build_coverage_model(traj, sensor)
    out["coverage_measure"] = int(model.measure_many([p])[0])
    print(json.dumps(out, sort_keys=True))
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        if ns.command == "oracle":
            return _oracle(ns)
        cfg = config_from_args(ns)
        art = run_mission(cfg)
        s = art["summary_data"]
        print(f"inner_area {s['inner_area']!r} outer_area {s['outer_area']!r} "
              f"max_level {s['max_level']} leaves {s['n_leaves']}")
        print(f"wrote {art['paving']} and {art['summary']}")
        return EXIT_OK
    except AssumptionViolation as e:
        print(f"assumption violation: {e}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except (InputError, ValueError, OSError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
