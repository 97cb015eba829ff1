"""Deterministic discrete-time execution of a scenario.

The run ties the pieces together: the UGVs scan for blind spots, the
localization gate polls connectivity and rigidity, multilateration starts
once the framework is rigid, the MAVs take off, the realization's
orientation is recovered from the UGV point clouds, coverage is planned
and the MAVs fly their schedules while localization keeps running and the
rigidity eigenvalue is monitored. Module errors are recorded as a
terminal status in the trace instead of aborting the run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..localization import (
    GateStatus,
    OrientationAmbiguousError,
    OrientationResult,
    PlanarEstimate,
    SensingGraph,
    estimate_graph_orientation,
    gate_step,
    minimize_triangulation_error,
)
from ..planner import InfeasiblePlanError, blind_spot_neighborhoods
from ..planner.pipeline import PlanResult, plan_coverage
from ..pointcloud import build_index, in_fov, render_ugv_cloud
from ..sensors import (
    VioDelta,
    fuse_altitude,
    init_range_filter,
    simulate_altitude,
    simulate_uwb,
    simulate_vio,
    smooth_range,
)
from .scenario import Scenario

_MAX_ORIENT_TRIES = 5


@dataclass(frozen=True)
class StepRecord:
    t: float
    phase: str
    gate_status: str
    eigenvalue: float
    degraded: bool
    truth: dict[int, tuple[float, float, float, float]]  # x, y, z, yaw
    est: np.ndarray | None  # gauge-frame planar estimate (N, 2)
    est_world: np.ndarray | None  # world-frame estimate once oriented
    separation: float
    speeds: dict[int, float]
    accels: dict[int, float]
    ranges_raw: dict[tuple[int, int], float]
    ranges_smoothed: dict[tuple[int, int], float]


@dataclass
class Trace:
    scenario: Scenario
    records: list[StepRecord] = field(default_factory=list)
    neighborhoods: tuple = ()
    plan: PlanResult | None = None
    orientation: OrientationResult | None = None
    terminal: str | None = None

    @property
    def baseline(self) -> bool:
        return self.plan.baseline if self.plan is not None else False


def _rot(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def _world_estimate(est: PlanarEstimate, orientation: OrientationResult,
                    origin) -> np.ndarray:
    pts = est.positions.copy()
    if orientation.reflected:
        pts[:, 0] = -pts[:, 0]
    return np.asarray(origin, float) + pts @ _rot(orientation.theta).T


def _sample_trajectory(traj, tf: float):
    """Position, heading, speed and acceleration at flight time tf; the
    MAV hovers at the final sample once its tour is done."""
    tt = traj.t
    if tf >= tt[-1]:
        s = traj.samples[-1]
        return (s[1], s[2]), s[3], 0.0, 0.0
    x = float(np.interp(tf, tt, traj.samples[:, 1]))
    y = float(np.interp(tf, tt, traj.samples[:, 2]))
    h = float(np.interp(tf, tt, traj.samples[:, 3]))
    v = float(np.interp(tf, tt, traj.samples[:, 4]))
    a = float(np.interp(tf, tt, traj.samples[:, 5]))
    return (x, y), h, v, a


def _wrap_abs(a: float) -> float:
    return abs((a + math.pi) % (2 * math.pi) - math.pi)


def run(scn: Scenario, baseline: bool = False) -> Trace:
    n = scn.n_vertices
    n_robots = len(scn.robots)
    mav_vertices = [k for k, r in enumerate(scn.robots) if r.kind == "mav"]
    ugv_vertices = [k for k, r in enumerate(scn.robots) if r.kind == "ugv"]
    r_mav = max((r.r_mav for r in scn.mavs), default=0.25)

    # mutable ground truth: planar position, altitude, yaw per vertex
    pos = {v: np.array(scn.vertex_position(v), float) for v in range(n)}
    alt = {v: 0.0 for v in range(n)}
    yaw = {v: (scn.robots[v].pose[2] if v < n_robots else 0.0)
           for v in range(n)}
    prev_pose = {v: (pos[v][0], pos[v][1], yaw[v]) for v in range(n)}

    trace = Trace(scenario=scn)
    if scn.grid is not None:
        ugv_xy = [tuple(pos[v]) for v in ugv_vertices]
        nbhs = []
        for v in ugv_vertices:
            pose = (pos[v][0], pos[v][1], yaw[v])
            for nb in blind_spot_neighborhoods(scn.grid, pose, scn.fov,
                                               ugv_positions=ugv_xy):
                nbhs.append(type(nb)(id=len(nbhs), center=nb.center,
                                     radius=nb.radius))
        trace.neighborhoods = tuple(nbhs)

    filters: dict[tuple[int, int], object] = {}
    removed: set[int] = set()
    est: PlanarEstimate | None = None
    orientation: OrientationResult | None = None
    phase = "scan"
    orient_tries = 0
    flight_t0 = 0.0
    steps = int(math.ceil(scn.duration / scn.dt))

    for k in range(steps):
        t = k * scn.dt
        for e in scn.events:
            if float(e["t"]) <= t:
                if "remove_transceiver" in e:
                    removed.add(n_robots + int(e["remove_transceiver"]))
                else:
                    removed.add(int(e["remove_vertex"]))
        active = [v for v in range(n) if v not in removed]

        # flight motion happens before this step's measurements
        speeds = {v: 0.0 for v in mav_vertices}
        accels = {v: 0.0 for v in mav_vertices}
        if phase == "flight" and trace.plan is not None:
            tf = t - flight_t0
            done = True
            for v in mav_vertices:
                traj = trace.plan.trajectories.get(v)
                if traj is None:
                    continue
                xy, heading, v_now, a_now = _sample_trajectory(traj, tf)
                pos[v] = np.array(xy)
                yaw[v] = heading
                speeds[v], accels[v] = v_now, a_now
                done = done and tf >= traj.duration
            if done:
                phase = "done"

        # measurements for this step
        p3 = {v: np.array([pos[v][0], pos[v][1], alt[v]]) for v in range(n)}
        raw: dict[tuple[int, int], float] = {}
        meas = {}
        for a in range(len(active)):
            for b in range(a + 1, len(active)):
                i, j = active[a], active[b]
                if np.linalg.norm(p3[i] - p3[j]) > scn.uwb_max_range:
                    continue
                m = simulate_uwb(p3[i], p3[j], i, j, scn.noise, k, timestamp=t)
                raw[m.edge] = m.range
                meas[m.edge] = m

        vio = {}
        for v in range(n):
            if v < n_robots:
                now = (pos[v][0], pos[v][1], yaw[v])
                vio[v] = simulate_vio(v, prev_pose[v], now, scn.dt,
                                      scn.noise, k)
                prev_pose[v] = now
            else:
                vio[v] = VioDelta(agent=v, yaw_delta=0.0,
                                  translation=(0.0, 0.0), dt=scn.dt)

        smoothed: dict[tuple[int, int], float] = {}
        for edge, m in meas.items():
            i, j = edge
            state = filters.get(edge)
            if state is None:
                state = init_range_filter(m, pos[i], pos[j], yaw[i], yaw[j])
                smoothed[edge] = m.range
                filters[edge] = state
            else:
                smoothed[edge], filters[edge] = smooth_range(
                    state, m, vio[i], vio[j])

        # altitude fusion, then project ranges onto the plane
        fused_alt = {v: 0.0 for v in range(n)}
        for v in mav_vertices:
            reading = simulate_altitude(v, alt[v], scn.noise, k)
            fused_alt[v] = fuse_altitude(reading)
        planar = []
        for edge, r in smoothed.items():
            i, j = edge
            dh = fused_alt[i] - fused_alt[j]
            pr = math.sqrt(max(r * r - dh * dh, 0.0))
            planar.append(type(meas[edge])(edge=edge, range=pr, timestamp=t))

        gate = gate_step(planar, n, prior=est)
        degraded = est is not None and gate.status != GateStatus.LOCALIZING
        if gate.status == GateStatus.LOCALIZING or est is not None:
            est = minimize_triangulation_error(planar, n, init=est)

        # phase machine
        if phase == "scan":
            phase = "gating"
        elif phase == "gating" and est is not None:
            for v in mav_vertices:
                alt[v] = scn.planner.survey_altitude
            phase = "orient"
        elif phase == "orient" and est is not None:
            sensing = []
            clouds = {}
            mav_p3 = [np.array([pos[v][0], pos[v][1], alt[v]])
                      for v in mav_vertices]
            for u in ugv_vertices:
                upose = (pos[u][0], pos[u][1], yaw[u])
                for v, q in zip(mav_vertices, mav_p3):
                    if in_fov((upose[0], upose[1]), upose[2], q,
                              scn.fov.horizontal_fov, scn.fov.max_range,
                              scn.fov.vertical_fov):
                        sensing.append((u, v))
                cloud = render_ugv_cloud(upose, mav_p3, r_mav,
                                         scn.fov.horizontal_fov,
                                         scn.fov.vertical_fov,
                                         scn.fov.max_range, source_agent=u,
                                         seed=scn.seed * 97 + u)
                clouds[u] = build_index(cloud)
            try:
                orientation = estimate_graph_orientation(
                    est, clouds, SensingGraph(edges=tuple(sensing)), r_mav,
                    origin=tuple(pos[0]),
                    altitudes={v: fused_alt[v] for v in mav_vertices})
                trace.orientation = orientation
                phase = "plan"
            except OrientationAmbiguousError as exc:
                orient_tries += 1
                if orient_tries >= _MAX_ORIENT_TRIES:
                    trace.terminal = f"orientation-ambiguous: {exc}"
                    phase = "hold"
        elif phase == "plan":
            if not trace.neighborhoods:
                phase = "hold"
            else:
                world = _world_estimate(est, orientation, pos[0])
                mav_states = {v: (float(world[v][0]), float(world[v][1]),
                                  yaw[v]) for v in mav_vertices}
                ugv_poses = {v: (pos[v][0], pos[v][1], yaw[v])
                             for v in ugv_vertices}
                try:
                    trace.plan = plan_coverage(
                        list(trace.neighborhoods), mav_states, ugv_poses,
                        scn.fov, scn.planner, baseline=baseline)
                    flight_t0 = t + scn.dt
                    phase = "flight"
                except InfeasiblePlanError as exc:
                    trace.terminal = f"infeasible: {exc}"
                    phase = "hold"

        # angular separation per UGV over its MAVs, from ground truth
        separation = 0.0
        groups: dict[int, list[int]] = {u: [] for u in ugv_vertices}
        if trace.plan is not None:
            for m, u in trace.plan.mav_to_ugv.items():
                groups.setdefault(u, []).append(m)
        else:
            for m in mav_vertices:
                u = min(ugv_vertices,
                        key=lambda u: float(np.linalg.norm(pos[m] - pos[u])))
                groups[u].append(m)
        for u, members in groups.items():
            bearings = [math.atan2(pos[m][1] - pos[u][1],
                                   pos[m][0] - pos[u][0]) for m in members]
            for a in range(len(bearings)):
                for b in range(a + 1, len(bearings)):
                    separation = max(separation,
                                     _wrap_abs(bearings[a] - bearings[b]))

        world_now = None
        if est is not None and orientation is not None:
            world_now = _world_estimate(est, orientation, pos[0])
        trace.records.append(StepRecord(
            t=t, phase=phase, gate_status=gate.status.value,
            eigenvalue=gate.last_report.rigidity_eigenvalue,
            degraded=degraded,
            truth={v: (float(pos[v][0]), float(pos[v][1]), float(alt[v]),
                       float(yaw[v])) for v in range(n)},
            est=None if est is None else est.positions.copy(),
            est_world=world_now,
            separation=separation,
            speeds=dict(speeds), accels=dict(accels),
            ranges_raw=raw, ranges_smoothed=smoothed,
        ))
    return trace
