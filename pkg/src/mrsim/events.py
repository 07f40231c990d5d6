"""Non-envelope event payloads: commands, timers, and churn steps."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .domain import PlanBlueprint, Request


@dataclass(frozen=True)
class SubmitRequest:
    request: Request

    def trace_summary(self) -> dict:
        return {
            "kind": "submit_request",
            "request_id": self.request.id,
            "requestor": self.request.requestor,
            "blueprint_id": self.request.blueprint_id,
        }


@dataclass(frozen=True)
class BlueprintCrud:
    op: str  # add | delete | modify
    blueprint_id: str
    blueprint: Optional[PlanBlueprint] = None

    def trace_summary(self) -> dict:
        return {"kind": "blueprint_crud", "op": self.op, "blueprint_id": self.blueprint_id}


@dataclass(frozen=True)
class PlanFeedbackTimeout:
    request_id: str

    def trace_summary(self) -> dict:
        return {"kind": "plan_feedback_timeout", "request_id": self.request_id}


@dataclass(frozen=True)
class TaskFeedbackTimeout:
    request_id: str
    task_index: int

    def trace_summary(self) -> dict:
        return {
            "kind": "task_feedback_timeout",
            "request_id": self.request_id,
            "task_index": self.task_index,
        }


@dataclass(frozen=True)
class TaskCompletion:
    robot_id: str
    request_id: str
    task_index: int
    task_label: str

    def trace_summary(self) -> dict:
        return {
            "kind": "task_completion",
            "robot_id": self.robot_id,
            "request_id": self.request_id,
            "task_index": self.task_index,
            "task_label": self.task_label,
        }


@dataclass(frozen=True)
class RegistrationCommand:
    op: str  # register | deregister
    robot_id: str
    capabilities: Optional[frozenset[str]] = None

    def trace_summary(self) -> dict:
        return {
            "kind": "registration_command",
            "op": self.op,
            "robot_id": self.robot_id,
            "capabilities": sorted(self.capabilities) if self.capabilities is not None else None,
        }


@dataclass(frozen=True)
class ChurnStep:
    def trace_summary(self) -> dict:
        return {"kind": "churn_step"}
