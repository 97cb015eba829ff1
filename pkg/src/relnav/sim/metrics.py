"""Metric emission: CSV traces plus a JSON summary per run.

The files follow the quantities a mission operator would plot: the
rigidity eigenvalue over time, true versus estimated poses, the angular
separation seen by the tracker UGVs, per-MAV speed and acceleration
profiles and the planned tours.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .run import Trace


def _fmt(v: float) -> str:
    return f"{float(v):.9g}"


def _aligned_rmse(est: np.ndarray, truth: np.ndarray) -> float:
    """Planar RMSE after the optimal rototranslation (reflection allowed)
    aligning the estimate to the ground truth."""
    A = np.asarray(est, float)
    B = np.asarray(truth, float)
    A0 = A - A.mean(axis=0)
    B0 = B - B.mean(axis=0)
    U, _, Vt = np.linalg.svd(A0.T @ B0)
    R = Vt.T @ U.T
    diff = A0 @ R.T - B0
    return float(np.sqrt(np.mean(np.sum(diff ** 2, axis=1))))


def _eigenvalue_csv(trace: Trace) -> str:
    lines = ["t,rigidity_eigenvalue,gate_status"]
    for r in trace.records:
        lines.append(f"{_fmt(r.t)},{_fmt(r.eigenvalue)},{r.gate_status}")
    return "\n".join(lines) + "\n"


def _poses_csv(trace: Trace) -> str:
    lines = ["t,vertex,true_x,true_y,true_z,true_yaw,est_x,est_y,degraded"]
    for r in trace.records:
        for v, (x, y, z, yw) in sorted(r.truth.items()):
            if r.est_world is not None:
                ex, ey = _fmt(r.est_world[v][0]), _fmt(r.est_world[v][1])
            elif r.est is not None:
                ex, ey = _fmt(r.est[v][0]), _fmt(r.est[v][1])
            else:
                ex = ey = ""
            lines.append(
                f"{_fmt(r.t)},{v},{_fmt(x)},{_fmt(y)},{_fmt(z)},{_fmt(yw)},"
                f"{ex},{ey},{int(r.degraded)}")
    return "\n".join(lines) + "\n"


def _separation_csv(trace: Trace) -> str:
    lines = ["t,separation_rad"]
    for r in trace.records:
        lines.append(f"{_fmt(r.t)},{_fmt(r.separation)}")
    return "\n".join(lines) + "\n"


def _profiles_csv(trace: Trace) -> str:
    lines = ["t,mav,speed,accel"]
    for r in trace.records:
        for v in sorted(r.speeds):
            lines.append(f"{_fmt(r.t)},{v},{_fmt(r.speeds[v])},"
                         f"{_fmt(r.accels[v])}")
    return "\n".join(lines) + "\n"


def _tours_csv(trace: Trace) -> str:
    lines = ["mav,order,neighborhood,touch_x,touch_y,heading,length"]
    if trace.plan is not None:
        for m in sorted(trace.plan.tours):
            tour = trace.plan.tours[m]
            for k, (nid, tp, h) in enumerate(zip(tour.nbh_ids,
                                                 tour.touch_points,
                                                 tour.headings)):
                lines.append(f"{m},{k},{nid},{_fmt(tp[0])},{_fmt(tp[1])},"
                             f"{_fmt(h)},{_fmt(tour.length)}")
    return "\n".join(lines) + "\n"


def summarize(trace: Trace) -> dict:
    """Headline numbers for a run: worst angular separation, tour
    lengths, final-step estimation RMSE and the terminal status."""
    last = trace.records[-1] if trace.records else None
    rmse = None
    if last is not None and last.est is not None:
        truth = np.array([[last.truth[v][0], last.truth[v][1]]
                          for v in sorted(last.truth)])
        rmse = _aligned_rmse(last.est, truth)
    tour_lengths = {}
    if trace.plan is not None:
        tour_lengths = {str(m): trace.plan.tours[m].length
                        for m in sorted(trace.plan.tours)}
    return {
        "steps": len(trace.records),
        "dt": trace.scenario.dt,
        "seed": trace.scenario.seed,
        "baseline": trace.baseline,
        "max_separation": max((r.separation for r in trace.records),
                              default=0.0),
        "fov_limit": trace.scenario.fov.horizontal_fov,
        "n_neighborhoods": len(trace.neighborhoods),
        "tour_lengths": tour_lengths,
        "total_tour_length": sum(tour_lengths.values()),
        "rmse": rmse,
        "final_gate_status": last.gate_status if last else None,
        "final_phase": last.phase if last else None,
        "terminal": trace.terminal,
    }


def metrics_payload(trace: Trace) -> dict[str, str]:
    """All output files as name -> content, for writing or transport."""
    if not trace.records:
        raise ValueError("trace is empty")
    return {
        "eigenvalue.csv": _eigenvalue_csv(trace),
        "poses.csv": _poses_csv(trace),
        "separation.csv": _separation_csv(trace),
        "profiles.csv": _profiles_csv(trace),
        "tours.csv": _tours_csv(trace),
        "summary.json": json.dumps(summarize(trace), indent=2,
                                   sort_keys=True) + "\n",
    }


def emit_metrics(trace: Trace, out_dir) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for name, content in metrics_payload(trace).items():
        path = os.path.join(out_dir, name)
        with open(path, "w") as fh:
            fh.write(content)
        written.append(path)
    return written
