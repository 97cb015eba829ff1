from .assign import assign_mavs_to_ugvs, assign_neighborhoods
from .dubins import DubinsPath, dubins_shortest, sample_chain
from .grid import (
    FovSpec,
    InvalidScenarioError,
    Neighborhood,
    OccupancyGrid,
    blind_spot_neighborhoods,
)
from .pipeline import PlannerParams, PlanResult, plan_coverage
from .schedule import (
    InfeasiblePlanError,
    Trajectory,
    angular_separation_series,
    schedule_velocities,
)
from .tspn import Tour, solve_tspn

__all__ = [
    "DubinsPath", "dubins_shortest", "sample_chain",
    "OccupancyGrid", "Neighborhood", "blind_spot_neighborhoods", "FovSpec",
    "InvalidScenarioError",
    "assign_mavs_to_ugvs", "assign_neighborhoods",
    "Tour", "solve_tspn",
    "Trajectory", "schedule_velocities", "angular_separation_series",
    "InfeasiblePlanError",
    "PlannerParams", "PlanResult", "plan_coverage",
]
