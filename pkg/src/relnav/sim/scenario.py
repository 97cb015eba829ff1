"""Scenario files: a self-describing JSON schema for simulation runs.

A scenario lists the robots (UGVs and MAVs), optional static ground
transceivers, an optional obstacle grid (rows run-length encoded so the
files stay diff-able), noise levels, the UGV field of view, planner
parameters and timing. Vertices of the localization graph are numbered
robots first (in file order) and transceivers after them.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ..planner import FovSpec, Neighborhood, OccupancyGrid, PlannerParams
from ..pointcloud import in_fov
from ..sensors import NoiseConfig


class ScenarioError(ValueError):
    """A scenario file violates an invariant; the message names the field."""


@dataclass(frozen=True)
class Robot:
    id: int
    kind: str  # "ugv" or "mav"
    pose: tuple[float, float, float]  # x, y, yaw
    r_mav: float = 0.25


@dataclass(frozen=True)
class Scenario:
    robots: tuple[Robot, ...]
    transceivers: tuple[tuple[float, float], ...] = ()
    grid: OccupancyGrid | None = None
    noise: NoiseConfig = NoiseConfig()
    fov: FovSpec = FovSpec(horizontal_fov=math.pi / 2)
    planner: PlannerParams = PlannerParams()
    duration: float = 10.0
    dt: float = 0.1
    seed: int = 0
    uwb_max_range: float = math.inf
    events: tuple[dict, ...] = field(default=())

    @property
    def ugvs(self) -> list[Robot]:
        return [r for r in self.robots if r.kind == "ugv"]

    @property
    def mavs(self) -> list[Robot]:
        return [r for r in self.robots if r.kind == "mav"]

    @property
    def n_vertices(self) -> int:
        return len(self.robots) + len(self.transceivers)

    def vertex_of_robot(self, robot_id: int) -> int:
        for k, r in enumerate(self.robots):
            if r.id == robot_id:
                return k
        raise KeyError(robot_id)

    def vertex_position(self, v: int) -> tuple[float, float]:
        if v < len(self.robots):
            return self.robots[v].pose[:2]
        return self.transceivers[v - len(self.robots)]


def decode_rle(rows: list[str]) -> np.ndarray:
    """Decode run-length-encoded grid rows; row 0 is nearest the origin.

    Each row is a space-separated list of "COUNTxVALUE" tokens, e.g.
    "10x0 4x1 26x0" for ten free cells, four obstacle cells, 26 free.
    """
    decoded = []
    for k, row in enumerate(rows):
        cells: list[int] = []
        for token in row.split():
            try:
                count, value = token.split("x")
                count, value = int(count), int(value)
            except ValueError:
                raise ScenarioError(
                    f"grid.rows[{k}]: bad RLE token {token!r}") from None
            if count <= 0 or value not in (0, 1, 2):
                raise ScenarioError(
                    f"grid.rows[{k}]: count must be > 0 and value in 0..2")
            cells.extend([value] * count)
        decoded.append(cells)
    widths = {len(r) for r in decoded}
    if len(widths) > 1:
        raise ScenarioError("grid.rows: rows have unequal widths")
    return np.asarray(decoded, dtype=np.uint8)


def encode_rle(cells: np.ndarray) -> list[str]:
    rows = []
    for row in np.asarray(cells):
        tokens = []
        run_val, run_len = int(row[0]), 0
        for v in row:
            if int(v) == run_val:
                run_len += 1
            else:
                tokens.append(f"{run_len}x{run_val}")
                run_val, run_len = int(v), 1
        tokens.append(f"{run_len}x{run_val}")
        rows.append(" ".join(tokens))
    return rows


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ScenarioError(message)


def scenario_from_dict(data: dict) -> Scenario:
    """Build and validate a Scenario from parsed JSON."""
    _require(isinstance(data, dict), "scenario must be a JSON object")
    robots = []
    raw_robots = data.get("robots")
    _require(isinstance(raw_robots, list) and raw_robots,
             "robots: at least one robot is required")
    for k, r in enumerate(raw_robots):
        kind = r.get("kind")
        _require(kind in ("ugv", "mav"), f"robots[{k}].kind: must be ugv or mav")
        pose = r.get("pose")
        _require(isinstance(pose, list) and len(pose) == 3,
                 f"robots[{k}].pose: expected [x, y, yaw]")
        r_mav = float(r.get("r_mav", 0.25))
        _require(r_mav > 0, f"robots[{k}].r_mav: must be > 0")
        robots.append(Robot(id=int(r.get("id", k)), kind=kind,
                            pose=tuple(float(v) for v in pose), r_mav=r_mav))
    ids = [r.id for r in robots]
    _require(len(set(ids)) == len(ids), "robots: ids must be unique")
    _require(robots[0].kind == "ugv",
             "robots[0]: the first robot is the reference agent and must "
             "be a UGV")

    transceivers = tuple(
        (float(t[0]), float(t[1])) for t in data.get("transceivers", []))

    grid = None
    if data.get("grid") is not None:
        g = data["grid"]
        res = float(g.get("resolution", 0))
        _require(res > 0, "grid.resolution: must be > 0")
        origin = tuple(float(v) for v in g.get("origin", (0.0, 0.0)))
        cells = decode_rle(g.get("rows", []))
        _require(cells.size > 0, "grid.rows: grid must be nonempty")
        grid = OccupancyGrid(cells=cells, resolution=res, origin=origin)

    try:
        noise = NoiseConfig(seed=int(data.get("seed", 0)),
                            **data.get("noise", {}))
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"noise: {exc}") from None
    try:
        fov = FovSpec(**{"horizontal_fov": math.pi / 2, **data.get("fov", {})})
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"fov: {exc}") from None
    try:
        planner = PlannerParams(**data.get("planner", {}))
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"planner: {exc}") from None

    duration = float(data.get("duration", 10.0))
    dt = float(data.get("dt", 0.1))
    _require(dt > 0, "dt: must be > 0")
    _require(duration > 0, "duration: must be > 0")

    events = tuple(dict(e) for e in data.get("events", []))
    for k, e in enumerate(events):
        _require("t" in e, f"events[{k}]: missing time field t")
        _require("remove_transceiver" in e or "remove_vertex" in e,
                 f"events[{k}]: expected remove_transceiver or remove_vertex")

    scn = Scenario(
        robots=tuple(robots),
        transceivers=transceivers,
        grid=grid,
        noise=noise,
        fov=fov,
        planner=planner,
        duration=duration,
        dt=dt,
        seed=int(data.get("seed", 0)),
        uwb_max_range=float(data.get("uwb_max_range", math.inf)),
        events=events,
    )
    _validate(scn)
    return scn


def _validate(scn: Scenario) -> None:
    n_ugv, n_mav = len(scn.ugvs), len(scn.mavs)
    _require(n_ugv >= 1, "robots: at least one UGV is required")
    if scn.grid is not None:
        _require(n_mav >= n_ugv,
                 "robots: planning requires N_MAV >= N_UGV (the number of "
                 "neighborhoods must also be >= N_MAV, checked after the "
                 "scan)")
    for m in scn.mavs:
        seen = any(
            in_fov(u.pose[:2], u.pose[2], (m.pose[0], m.pose[1], 0.0),
                   scn.fov.horizontal_fov, scn.fov.max_range,
                   scn.fov.vertical_fov)
            for u in scn.ugvs)
        _require(seen, f"robots: MAV {m.id} is outside every UGV's field of "
                       "view at mission start")


def load_scenario(path) -> Scenario:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"parse error: {exc}") from None
    return scenario_from_dict(data)


def random_planning_inputs(seed: int, n_mavs: int = 2,
                           spread_deg: float | None = None):
    """Random planning instance: neighborhoods fanned over a bounded
    angular span in front of a single UGV, with each MAV starting near
    the beginning of its own angular arc.

    Returns (neighborhoods, mav_states, ugv_poses) ready for
    plan_coverage. The total span exceeds the pi/2 FoV, so unconstrained
    timing can spread the MAVs past it, but candidate layouts are
    rejected until the planner's own partition leaves the final tour
    positions well inside the FoV; only then is the constrained schedule
    geometrically satisfiable.
    """
    from ..planner.assign import assign_neighborhoods

    rng = np.random.default_rng(np.random.SeedSequence([seed, 11]))
    for _ in range(200):
        if spread_deg is None:
            span = math.radians(float(rng.uniform(115.0, 140.0)))
        else:
            span = math.radians(spread_deg)
        n_nbh = int(rng.integers(6, 13))
        angles = np.sort(rng.uniform(0.0, span, n_nbh))
        dists = rng.uniform(5.0, 9.0, n_nbh)
        radii = rng.uniform(0.4, 0.9, n_nbh)
        nbhs = [Neighborhood(id=k,
                             center=(float(d * math.cos(a)),
                                     float(d * math.sin(a))),
                             radius=float(r))
                for k, (a, d, r) in enumerate(zip(angles, dists, radii))]
        starts = [float(angles[0]) + math.radians(4.0),
                  float(angles[n_nbh // 2]) + math.radians(4.0)][:n_mavs]
        mav_states = {}
        for m, a in enumerate(starts):
            r = 2.5 + 0.5 * m
            mav_states[m + 1] = (r * math.cos(a), r * math.sin(a),
                                 a + math.pi / 2)
        ugv_poses = {0: (0.0, 0.0, span / 2)}

        arcs = assign_neighborhoods(
            nbhs, [mav_states[m][:2] for m in sorted(mav_states)],
            ugv_poses[0])
        if any(not arc for arc in arcs):
            continue
        finals = [math.atan2(arc[-1].center[1], arc[-1].center[0])
                  for arc in arcs]
        firsts = [math.atan2(arc[0].center[1], arc[0].center[0])
                  for arc in arcs]
        limit = math.radians(72.0)
        gap = max(finals) - min(finals)
        start_gap = max(abs(firsts[k] - starts[k]) for k in range(len(arcs)))
        if gap <= limit and start_gap <= limit:
            return nbhs, mav_states, ugv_poses
    raise RuntimeError(f"no acceptable layout found for seed {seed}")
