"""HTTP service wrapping the simulator.

Endpoints mirror the CLI verbs: /run executes a scenario and returns the
metric files inline, /plan runs planning only, /rigidity analyzes a
single framework. Scenario invariant violations map to 422 and plan
infeasibility to 409 so clients can distinguish bad input from a solver
that gave up.
"""

from __future__ import annotations

import math
from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .planner import InfeasiblePlanError, InvalidScenarioError
from .rigidity import Framework, Graph, rigidity_report
from .sim import (
    ScenarioError,
    emit_metrics,
    metrics_payload,
    run as run_sim,
    scenario_from_dict,
    summarize,
)

app = FastAPI(title="relnav", version="0.1.0")


class FrameworkModel(BaseModel):
    n_vertices: int = Field(ge=1)
    edges: list[tuple[int, int]]
    positions: list[float]


class RigidityResponse(BaseModel):
    laplacian_lambda2: float
    rigidity_rank: int
    rigidity_eigenvalue: float
    is_connected: bool
    is_rigid: bool
    degenerate: bool


class RunRequest(BaseModel):
    scenario: dict
    seed: Optional[int] = None
    baseline: bool = False


class RunResponse(BaseModel):
    summary: dict
    files: dict[str, str]


class PlanRequest(BaseModel):
    scenario: dict
    baseline: bool = False


class NeighborhoodModel(BaseModel):
    id: int
    center: tuple[float, float]
    radius: float


class TourModel(BaseModel):
    mav: int
    neighborhood_ids: list[int]
    touch_points: list[tuple[float, float]]
    headings: list[float]
    length: float


class PlanResponse(BaseModel):
    neighborhoods: list[NeighborhoodModel]
    mav_to_ugv: dict[int, int]
    tours: list[TourModel]
    total_length: float
    max_separation: float
    baseline: bool


def _load(data: dict, seed: Optional[int] = None):
    if seed is not None:
        data = {**data, "seed": seed}
    try:
        return scenario_from_dict(data)
    except (ScenarioError, InvalidScenarioError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/rigidity", response_model=RigidityResponse)
def rigidity(fw: FrameworkModel) -> RigidityResponse:
    try:
        graph = Graph(n_vertices=fw.n_vertices,
                      edges=tuple((i, j) for i, j in fw.edges))
        framework = Framework(graph=graph, positions=fw.positions)
        report = rigidity_report(framework)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None
    return RigidityResponse(
        laplacian_lambda2=report.laplacian_lambda2,
        rigidity_rank=report.rigidity_rank,
        rigidity_eigenvalue=report.rigidity_eigenvalue,
        is_connected=report.is_connected,
        is_rigid=report.is_rigid,
        degenerate=report.degenerate,
    )


@app.post("/run", response_model=RunResponse)
def run_endpoint(req: RunRequest) -> RunResponse:
    scn = _load(req.scenario, req.seed)
    try:
        trace = run_sim(scn, baseline=req.baseline)
    except InvalidScenarioError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None
    return RunResponse(summary=summarize(trace),
                       files=metrics_payload(trace))


@app.post("/plan", response_model=PlanResponse)
def plan_endpoint(req: PlanRequest) -> PlanResponse:
    from .planner.pipeline import plan_from_grid

    scn = _load(req.scenario)
    if scn.grid is None:
        raise HTTPException(status_code=422,
                            detail="scenario has no obstacle grid to plan on")
    mav_states = {scn.vertex_of_robot(r.id): r.pose for r in scn.mavs}
    ugv_poses = {scn.vertex_of_robot(r.id): r.pose for r in scn.ugvs}
    try:
        result = plan_from_grid(scn.grid, mav_states, ugv_poses, scn.fov,
                                scn.planner, baseline=req.baseline)
    except InvalidScenarioError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None
    except InfeasiblePlanError as exc:
        raise HTTPException(
            status_code=409,
            detail={"message": str(exc), "interval": list(exc.interval)},
        ) from None

    max_sep = 0.0
    if result.trajectories:
        from .planner import angular_separation_series

        by_ugv: dict[int, list] = {}
        for m, traj in result.trajectories.items():
            by_ugv.setdefault(result.mav_to_ugv[m], []).append(traj)
        for u, trajs in by_ugv.items():
            _, seps = angular_separation_series(trajs, ugv_poses[u],
                                                scn.planner.sample_dt)
            if len(seps):
                max_sep = max(max_sep, float(seps.max()))
    return PlanResponse(
        neighborhoods=[NeighborhoodModel(id=n.id, center=n.center,
                                         radius=n.radius)
                       for n in result.neighborhoods],
        mav_to_ugv=result.mav_to_ugv,
        tours=[TourModel(mav=m,
                         neighborhood_ids=list(t.nbh_ids),
                         touch_points=[tuple(p) for p in t.touch_points],
                         headings=list(t.headings),
                         length=t.length)
               for m, t in sorted(result.tours.items())],
        total_length=result.total_length,
        max_separation=max_sep,
        baseline=req.baseline,
    )
