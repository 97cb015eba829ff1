"""Decoupled coverage-planning pipeline.

Partition work, solve each MAV's TSPN, smooth with Dubins, then schedule
speeds. Deliberately sequential with no global re-optimization: each
stage's output is frozen before the next runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .assign import assign_mavs_to_ugvs, assign_neighborhoods
from .grid import FovSpec, Neighborhood, OccupancyGrid, blind_spot_neighborhoods
from .schedule import Trajectory, schedule_velocities
from .tspn import Tour, solve_tspn


@dataclass(frozen=True)
class PlannerParams:
    rho: float = 1.0
    v_max: float = 2.0
    a_max: float = 1.0
    ugv_yaw_rate_max: float = 1.0
    sample_dt: float = 0.05
    survey_altitude: float = 1.5

    def __post_init__(self):
        if min(self.rho, self.v_max, self.a_max, self.sample_dt) <= 0:
            raise ValueError("planner parameters must be > 0")


@dataclass(frozen=True)
class PlanResult:
    neighborhoods: tuple[Neighborhood, ...]
    mav_to_ugv: dict[int, int]
    tours: dict[int, Tour]
    trajectories: dict[int, Trajectory]
    baseline: bool = field(default=False)

    @property
    def total_length(self) -> float:
        return sum(t.length for t in self.tours.values())


def _heading_towards(p, q) -> float:
    return math.atan2(q[1] - p[1], q[0] - p[0])


def plan_coverage(neighborhoods: list[Neighborhood],
                  mav_states: dict[int, tuple[float, float, float]],
                  ugv_poses: dict[int, tuple[float, float, float]],
                  fov: FovSpec,
                  params: PlannerParams = PlannerParams(),
                  baseline: bool = False) -> PlanResult:
    """Plan all MAV tours and schedules for a set of neighborhoods.

    mav_states and ugv_poses map agent ids to (x, y, heading). Baseline
    mode drops the angular-sweep ordering and the FoV enforcement, giving
    the unconstrained comparison solver.
    """
    mav_ids = sorted(mav_states)
    ugv_ids = sorted(ugv_poses)
    assignment = assign_mavs_to_ugvs(
        [mav_states[m][:2] for m in mav_ids],
        [ugv_poses[u][:2] for u in ugv_ids])
    mav_to_ugv = {m: ugv_ids[a] for m, a in zip(mav_ids, assignment)}

    tours: dict[int, Tour] = {}
    trajectories: dict[int, Trajectory] = {}
    for u in ugv_ids:
        members = [m for m in mav_ids if mav_to_ugv[m] == u]
        if not members or not neighborhoods:
            continue
        arcs = assign_neighborhoods(
            list(neighborhoods), [mav_states[m][:2] for m in members],
            ugv_poses[u])
        ugv_tours: dict[int, Tour] = {}
        for m, arc in zip(members, arcs):
            if not arc:
                continue
            ugv_tours[m] = solve_tspn(arc, mav_states[m], params.rho,
                                      allow_reorder=baseline)
        if not ugv_tours:
            continue
        trajectories.update(schedule_velocities(
            ugv_tours, ugv_poses[u], fov,
            v_max=params.v_max, a_max=params.a_max,
            ugv_yaw_rate_max=params.ugv_yaw_rate_max,
            sample_dt=params.sample_dt,
            enforce_fov=not baseline))
        tours.update(ugv_tours)
    return PlanResult(
        neighborhoods=tuple(neighborhoods),
        mav_to_ugv=mav_to_ugv,
        tours=tours,
        trajectories=trajectories,
        baseline=baseline,
    )


def plan_from_grid(grid: OccupancyGrid,
                   mav_states: dict[int, tuple[float, float, float]],
                   ugv_poses: dict[int, tuple[float, float, float]],
                   fov: FovSpec,
                   params: PlannerParams = PlannerParams(),
                   baseline: bool = False) -> PlanResult:
    """Extract blind-spot neighborhoods from each UGV's scan and plan."""
    ugv_xy = [ugv_poses[u][:2] for u in sorted(ugv_poses)]
    nbhs: list[Neighborhood] = []
    for u in sorted(ugv_poses):
        for nb in blind_spot_neighborhoods(grid, ugv_poses[u], fov,
                                           ugv_positions=ugv_xy):
            nbhs.append(Neighborhood(id=len(nbhs), center=nb.center,
                                     radius=nb.radius))
    return plan_coverage(nbhs, mav_states, ugv_poses, fov, params, baseline)
