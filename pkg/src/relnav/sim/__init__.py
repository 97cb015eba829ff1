from .metrics import emit_metrics, metrics_payload, summarize
from .run import StepRecord, Trace, run
from .scenario import (
    Robot,
    Scenario,
    ScenarioError,
    decode_rle,
    encode_rle,
    load_scenario,
    random_planning_inputs,
    scenario_from_dict,
)

__all__ = [
    "Robot", "Scenario", "ScenarioError",
    "load_scenario", "scenario_from_dict",
    "decode_rle", "encode_rle", "random_planning_inputs",
    "run", "Trace", "StepRecord",
    "emit_metrics", "metrics_payload", "summarize",
]
