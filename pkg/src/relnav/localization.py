"""Collaborative relative localization.

Pipeline: wait for the ranging graph to be connected and the framework to
be rigid, solve gauge-fixed multilateration over the smoothed ranges,
recover the realization's orientation by searching for MAV-sized clusters
in the UGV point clouds, then assemble full poses.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import shortest_path

from .pointcloud import SpatialIndex, mav_presence_score
from .rigidity import (
    Framework,
    Graph,
    RigidityReport,
    is_connected,
    rigidity_report,
)
from .sensors import RangeMeasurement


class GaugeError(ValueError):
    """Edge (0, 1) is missing, the gauge cannot be fixed."""


class OrientationAmbiguousError(RuntimeError):
    """No orientation candidate passed the acceptance rules."""


class GateStatus(str, enum.Enum):
    WAITING_CONNECTIVITY = "waiting-connectivity"
    WAITING_RIGIDITY = "waiting-rigidity"
    LOCALIZING = "localizing"


@dataclass(frozen=True)
class LocalizationGate:
    status: GateStatus
    last_report: RigidityReport


@dataclass(frozen=True)
class PlanarEstimate:
    """Gauge-fixed planar positions: agent 0 at the origin, agent 1 on the
    +y axis at the measured range."""

    positions: np.ndarray  # (N, 2)
    residual: float
    converged: bool = True

    def __post_init__(self):
        pts = np.asarray(self.positions, dtype=float).reshape(-1, 2)
        pts.setflags(write=False)
        object.__setattr__(self, "positions", pts)


@dataclass(frozen=True)
class FullPose:
    agent: int
    position: tuple[float, float, float]
    yaw: float
    planar_only: bool = False


@dataclass(frozen=True)
class OrientationResult:
    theta: float
    reflected: bool
    score: float


def _range_map(ranges) -> dict[tuple[int, int], float]:
    out: dict[tuple[int, int], float] = {}
    for m in ranges:
        i, j = m.edge
        out[(min(i, j), max(i, j))] = m.range
    return out


def graph_from_ranges(ranges, n_vertices: int) -> Graph:
    return Graph(n_vertices=n_vertices, edges=tuple(_range_map(ranges)))


def bootstrap_estimate(ranges, n_vertices: int) -> np.ndarray:
    """Classical MDS embedding of the shortest-path-completed distance
    matrix; used to initialize the solver and the rigidity check when no
    prior estimate exists."""
    rmap = _range_map(ranges)
    D = np.full((n_vertices, n_vertices), np.inf)
    np.fill_diagonal(D, 0.0)
    for (i, j), r in rmap.items():
        D[i, j] = D[j, i] = r
    D = shortest_path(D, method="D", directed=False)
    # unreachable pairs (disconnected graph): cap at a large hop distance
    finite = D[np.isfinite(D)]
    cap = 2.0 * finite.max() if finite.size else 1.0
    D = np.where(np.isfinite(D), D, cap)
    n = n_vertices
    J = np.eye(n) - np.ones((n, n)) / n
    B = -0.5 * J @ (D ** 2) @ J
    w, v = np.linalg.eigh(B)
    w2 = np.clip(w[-2:], 0.0, None)
    pts = v[:, -2:] * np.sqrt(w2)
    return pts


def gauge_fix(points: np.ndarray, r01: float | None = None) -> np.ndarray:
    """Rototranslate points so agent 0 sits at the origin and agent 1 on
    the +y axis; if r01 is given, agent 1 is pinned at (0, r01)."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2).copy()
    pts -= pts[0]
    d = np.linalg.norm(pts[1])
    if d > 0:
        phi = math.atan2(pts[1, 1], pts[1, 0])
        rot = math.pi / 2 - phi
        c, s = math.cos(rot), math.sin(rot)
        pts = pts @ np.array([[c, s], [-s, c]]).T
    if r01 is not None:
        pts[1] = (0.0, r01)
    return pts


def gate_step(ranges, n_vertices: int,
              prior: PlanarEstimate | None = None,
              eig_tol: float = 1e-6) -> LocalizationGate:
    """One poll of the startup/health gate.

    Connectivity is checked on the measurement graph itself; rigidity on
    the framework built from the prior estimate when available, else from
    a bootstrap embedding of the ranges.
    """
    graph = graph_from_ranges(ranges, n_vertices)
    connected, _ = is_connected(graph)
    pts = prior.positions if prior is not None else bootstrap_estimate(
        ranges, n_vertices)
    report = rigidity_report(Framework(graph=graph, positions=pts.ravel()),
                             tol=eig_tol)
    if not connected:
        status = GateStatus.WAITING_CONNECTIVITY
    elif not report.is_rigid or report.rigidity_eigenvalue <= eig_tol:
        status = GateStatus.WAITING_RIGIDITY
    else:
        status = GateStatus.LOCALIZING
    return LocalizationGate(status=status, last_report=report)


def minimize_triangulation_error(ranges, n_vertices: int,
                                 init: PlanarEstimate | None = None,
                                 max_iter: int = 100,
                                 step_tol: float = 1e-10) -> PlanarEstimate:
    """Gauge-fixed multilateration by damped Gauss-Newton.

    Minimizes the sum of squared range residuals over the free agents
    (everything except the two gauge-pinned ones). Deterministic given the
    initialization; non-convergence returns the best iterate flagged.
    """
    rmap = _range_map(ranges)
    if (0, 1) not in rmap:
        raise GaugeError("range for edge (0, 1) is required to fix the gauge")
    r01 = rmap[(0, 1)]
    n = n_vertices
    if init is not None:
        pts = gauge_fix(init.positions, r01)
    else:
        pts = gauge_fix(bootstrap_estimate(ranges, n), r01)
    edges = sorted(rmap)
    ranges_vec = np.array([rmap[e] for e in edges])

    free = list(range(2, n))  # vertices with optimizable coordinates

    def residuals(p):
        d = np.array([np.linalg.norm(p[i] - p[j]) for i, j in edges])
        return d - ranges_vec

    def jacobian(p):
        J = np.zeros((len(edges), 2 * len(free)))
        col = {v: k for k, v in enumerate(free)}
        for row, (i, j) in enumerate(edges):
            diff = p[i] - p[j]
            d = np.linalg.norm(diff)
            u = diff / d if d > 1e-12 else np.zeros(2)
            if i in col:
                J[row, 2 * col[i]: 2 * col[i] + 2] = u
            if j in col:
                J[row, 2 * col[j]: 2 * col[j] + 2] = -u
        return J

    lam = 1e-6
    r = residuals(pts)
    cost = float(r @ r)
    converged = n <= 2 or not free
    for _ in range(max_iter):
        if not free:
            break
        J = jacobian(pts)
        g = J.T @ r
        H = J.T @ J
        step = np.linalg.solve(H + lam * np.eye(H.shape[0]), -g)
        trial = pts.copy()
        trial[free] = pts[free] + step.reshape(-1, 2)
        r_trial = residuals(trial)
        cost_trial = float(r_trial @ r_trial)
        if cost_trial <= cost:
            pts, r, cost = trial, r_trial, cost_trial
            lam = max(lam * 0.3, 1e-12)
            if np.linalg.norm(step) < step_tol:
                converged = True
                break
        else:
            lam *= 10.0
            if lam > 1e8:
                break
    return PlanarEstimate(positions=pts, residual=cost, converged=converged)


@dataclass(frozen=True)
class SensingGraph:
    """UGV -> MAV visibility edges (i is a UGV, j a MAV it can see)."""

    edges: tuple[tuple[int, int], ...] = field(default=())

    def mavs_seen_by(self, ugv: int):
        return [j for i, j in self.edges if i == ugv]

    @property
    def ugvs(self):
        return sorted({i for i, _ in self.edges})


def _reflect(points: np.ndarray) -> np.ndarray:
    out = points.copy()
    out[:, 0] = -out[:, 0]
    return out


def estimate_graph_orientation(
    est: PlanarEstimate,
    clouds: dict[int, SpatialIndex],
    sensing: SensingGraph,
    r_mav: float,
    dtheta: float = math.radians(1.0),
    origin=(0.0, 0.0),
    altitudes: dict[int, float] | None = None,
    score_threshold_per_mav: float = 0.5,
    margin: float = 1.1,
    separation: float = math.radians(20.0),
) -> OrientationResult:
    """Sweep candidate rotations (and the reflection) of the realization,
    scoring each by MAV-cluster presence in the UGV clouds at the
    transformed MAV positions. The winner must clear the score threshold
    and beat every well-separated runner-up by the margin factor."""
    if not sensing.edges:
        raise OrientationAmbiguousError("empty sensing graph")
    altitudes = altitudes or {}
    origin = np.asarray(origin, dtype=float)
    thetas = np.arange(0.0, 2.0 * math.pi, dtheta)
    candidates = []  # (score, theta, reflected)
    for reflected in (False, True):
        base = _reflect(est.positions) if reflected else est.positions
        for theta in thetas:
            c, s = math.cos(theta), math.sin(theta)
            rot = np.array([[c, -s], [s, c]])
            total = 0.0
            for i, j in sensing.edges:
                index = clouds.get(i)
                if index is None:
                    continue
                q = origin + rot @ base[j]
                q3 = (q[0], q[1], altitudes.get(j, 0.0))
                total += mav_presence_score(index, q3, r_mav)
            candidates.append((total, float(theta), reflected))
    best = max(candidates, key=lambda c: c[0])
    threshold = score_threshold_per_mav * len(sensing.edges)
    if best[0] < threshold:
        raise OrientationAmbiguousError(
            f"best score {best[0]:.3f} below threshold {threshold:.3f}")
    runner = 0.0
    for score, theta, reflected in candidates:
        dth = abs((theta - best[1] + math.pi) % (2 * math.pi) - math.pi)
        if reflected != best[2] or dth > separation:
            runner = max(runner, score)
    if runner > 0 and best[0] < margin * runner:
        raise OrientationAmbiguousError(
            f"ambiguous orientation: best {best[0]:.3f} vs runner-up "
            f"{runner:.3f}")
    return OrientationResult(theta=best[1], reflected=best[2], score=best[0])


def full_poses(est: PlanarEstimate, orientation: OrientationResult,
               altitudes: dict[int, float], yaws: dict[int, float],
               origin=(0.0, 0.0),
               mav_ids: set[int] | None = None) -> list[FullPose]:
    """Lift the planar estimate into the common frame: rotate (and
    reflect) by the recovered orientation, translate to the origin agent,
    append fused altitudes. MAVs without an altitude are flagged
    planar-only; UGVs sit on the ground plane."""
    origin = np.asarray(origin, dtype=float)
    base = _reflect(est.positions) if orientation.reflected else est.positions
    c, s = math.cos(orientation.theta), math.sin(orientation.theta)
    rot = np.array([[c, -s], [s, c]])
    mav_ids = mav_ids or set()
    poses = []
    for k, p in enumerate(base):
        q = origin + rot @ p
        if k in mav_ids:
            h = altitudes.get(k)
            planar_only = h is None
            z = 0.0 if h is None else h
        else:
            planar_only = False
            z = 0.0
        poses.append(FullPose(agent=k, position=(float(q[0]), float(q[1]), z),
                              yaw=float(yaws.get(k, 0.0)),
                              planar_only=planar_only))
    return poses
