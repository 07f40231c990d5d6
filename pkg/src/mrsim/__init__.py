"""Deterministic discrete-event simulator for a multi-robot request/plan/task
architecture, with performance metrics and a live control surface."""

from .domain import (
    FailureKind,
    FailureReason,
    KnowledgeBase,
    PlanBlueprint,
    Request,
    RequestStatus,
    RobotRecord,
    RobotState,
    TaskSpec,
    VerifiedPlan,
    satisfies,
    validate_blueprint,
)
from .engine import Engine, RngStreams
from .harness import RunReport, run
from .scenario import Scenario, ScenarioError, bundled_scenario_path, load_scenario, load_scenario_file
from .simulation import Simulation

__version__ = "0.1.0"

__all__ = [
    "Engine",
    "FailureKind",
    "FailureReason",
    "KnowledgeBase",
    "PlanBlueprint",
    "Request",
    "RequestStatus",
    "RngStreams",
    "RobotRecord",
    "RobotState",
    "RunReport",
    "Scenario",
    "ScenarioError",
    "Simulation",
    "TaskSpec",
    "VerifiedPlan",
    "bundled_scenario_path",
    "load_scenario",
    "load_scenario_file",
    "run",
    "satisfies",
    "validate_blueprint",
]
