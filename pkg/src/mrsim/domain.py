"""Core value types: capabilities, tasks, blueprints, requests, plans, robots."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

CapabilityId = str


class RobotState(str, Enum):
    UNREGISTERED = "Unregistered"
    IDLE = "Idle"
    CONTROLLED = "Controlled"


class RequestStatus(str, Enum):
    QUEUED = "Queued"
    IN_PROGRESS = "InProgress"
    SUCCEEDED = "Succeeded"
    FAILED = "Failed"

TERMINAL_STATUSES = {RequestStatus.SUCCEEDED, RequestStatus.FAILED}


class FailureKind(str, Enum):
    NO_BLUEPRINT_MATCH = "NoBlueprintMatch"
    INSUFFICIENT_ROBOTS = "InsufficientRobots"
    NO_CAPABLE_ROBOT = "NoCapableRobot"
    PLAN_FEEDBACK_TIMEOUT = "PlanFeedbackTimeout"
    TASK_FEEDBACK_TIMEOUT = "TaskFeedbackTimeout"
    TASK_NEGATIVE_FEEDBACK = "TaskNegativeFeedback"
    ROBOT_UNAVAILABLE = "RobotUnavailable"


@dataclass(frozen=True)
class FailureReason:
    kind: FailureKind
    detail: Optional[str] = None

    def describe(self) -> str:
        if self.detail:
            return f"{self.kind.value}({self.detail})"
        return self.kind.value


@dataclass(frozen=True)
class TaskSpec:
    label: str
    required: frozenset[CapabilityId]

    def __post_init__(self) -> None:
        if not self.label:
            raise ValueError("task label must be non-empty")
        object.__setattr__(self, "required", frozenset(self.required))
        if not self.required:
            raise ValueError(f"task {self.label!r} requires no capabilities")

    def to_doc(self) -> dict:
        return {"label": self.label, "required": sorted(self.required)}

    @classmethod
    def from_doc(cls, doc: dict) -> "TaskSpec":
        return cls(label=doc["label"], required=frozenset(doc["required"]))


@dataclass(frozen=True)
class PlanBlueprint:
    id: str
    tasks: tuple[TaskSpec, ...]

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("blueprint id must be non-empty")
        object.__setattr__(self, "tasks", tuple(self.tasks))

    def to_doc(self) -> dict:
        return {"id": self.id, "tasks": [t.to_doc() for t in self.tasks]}

    @classmethod
    def from_doc(cls, doc: dict) -> "PlanBlueprint":
        return cls(id=doc["id"], tasks=tuple(TaskSpec.from_doc(t) for t in doc["tasks"]))


@dataclass
class Request:
    id: str
    requestor: str
    blueprint_id: str
    arrival_time: int
    status: RequestStatus = RequestStatus.QUEUED
    start_time: Optional[int] = None
    end_time: Optional[int] = None
    failure: Optional[FailureReason] = None

    def __post_init__(self) -> None:
        if self.arrival_time < 0:
            raise ValueError("arrival_time must be >= 0")

    def to_doc(self) -> dict:
        return {
            "id": self.id,
            "requestor": self.requestor,
            "blueprint_id": self.blueprint_id,
            "arrival_time": self.arrival_time,
            "status": self.status.value,
            "start_time": self.start_time,
            "end_time": self.end_time,
            "failure": self.failure.describe() if self.failure else None,
        }


@dataclass(frozen=True)
class VerifiedPlan:
    plan_id: str
    request_id: str
    assignments: tuple[tuple[TaskSpec, str], ...]

    def to_doc(self) -> dict:
        return {
            "plan_id": self.plan_id,
            "request_id": self.request_id,
            "assignments": [
                {"task": task.to_doc(), "robot_id": robot} for task, robot in self.assignments
            ],
        }


@dataclass
class RobotRecord:
    id: str
    capabilities: frozenset[CapabilityId]
    history: int = 0
    state: RobotState = RobotState.UNREGISTERED
    current_task: Optional[str] = None
    pending_deregister: bool = False

    def to_doc(self) -> dict:
        return {
            "id": self.id,
            "capabilities": sorted(self.capabilities),
            "history": self.history,
            "state": self.state.value,
            "current_task": self.current_task,
            "pending_deregister": self.pending_deregister,
        }


@dataclass
class KnowledgeBase:
    blueprints: dict[str, PlanBlueprint] = field(default_factory=dict)
    robot_directory: dict[str, RobotRecord] = field(default_factory=dict)

    def registered_robots(self) -> list[RobotRecord]:
        return [
            r
            for r in self.robot_directory.values()
            if r.state is not RobotState.UNREGISTERED
        ]


def satisfies(robot_caps: Iterable[CapabilityId], task: TaskSpec) -> bool:
    """A robot can execute a task iff it holds every required capability."""
    return task.required <= frozenset(robot_caps)


def validate_blueprint(bp: PlanBlueprint, universe: Iterable[CapabilityId]) -> list[str]:
    """Return a list of violated rules; empty list means the blueprint is valid."""
    universe = frozenset(universe)
    errors: list[str] = []
    if not bp.tasks:
        errors.append(f"blueprint {bp.id}: empty task list")
    seen: set[str] = set()
    for task in bp.tasks:
        if task.label in seen:
            errors.append(f"blueprint {bp.id}: duplicate task label {task.label}")
        seen.add(task.label)
        for cap in sorted(task.required - universe):
            errors.append(f"blueprint {bp.id}, task {task.label}: unknown capability {cap}")
    return errors
