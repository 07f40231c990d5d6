"""Typed message envelopes with ordered delivery and dead-lettering."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable

from .engine import Engine, SimTime


class Performative(str, Enum):
    SUBMIT_REQUEST = "SUBMIT_REQUEST"
    BLUEPRINT_TO_PLANNER = "BLUEPRINT_TO_PLANNER"
    PLAN_VERIFIED = "PLAN_VERIFIED"
    PLAN_FAIL = "PLAN_FAIL"
    TASK_ASSIGN = "TASK_ASSIGN"
    TASK_DONE = "TASK_DONE"
    TASK_FAIL = "TASK_FAIL"
    PLAN_EXEC_SUCCESS = "PLAN_EXEC_SUCCESS"
    PLAN_EXEC_FAIL = "PLAN_EXEC_FAIL"
    REQUEST_SUCCESS = "REQUEST_SUCCESS"
    REQUEST_FAIL = "REQUEST_FAIL"
    REGISTER = "REGISTER"
    DEREGISTER = "DEREGISTER"


def _content_summary(content: dict) -> dict:
    out: dict[str, Any] = {}
    for key in sorted(content):
        value = content[key]
        if hasattr(value, "to_doc"):
            out[key] = value.to_doc()
        elif hasattr(value, "describe"):
            out[key] = value.describe()
        else:
            out[key] = value
    return out


@dataclass(frozen=True)
class Envelope:
    performative: Performative
    sender: str
    receiver: str
    conversation_id: str
    content: dict
    sent_at: SimTime

    def trace_summary(self) -> dict:
        return {
            "kind": "envelope",
            "performative": self.performative.value,
            "sender": self.sender,
            "receiver": self.receiver,
            "conversation_id": self.conversation_id,
            "content": _content_summary(self.content),
            "sent_at": self.sent_at,
        }


@dataclass
class DeadLetter:
    at: SimTime
    reason: str
    envelope: Envelope

    def to_doc(self) -> dict:
        return {"at": self.at, "reason": self.reason, "envelope": self.envelope.trace_summary()}


class MessageBus:
    """Schedules envelope deliveries on the engine; unknown receivers dead-letter."""

    def __init__(self, engine: Engine, latency: SimTime = 0) -> None:
        self.engine = engine
        self.latency = latency
        self.dead_letters: list[DeadLetter] = []
        engine.on_undeliverable = self._on_undeliverable

    def subscribe(self, receiver: str, handler: Callable[[Any], None]) -> None:
        self.engine.register(receiver, handler)

    def send(
        self,
        performative: Performative,
        sender: str,
        receiver: str,
        conversation_id: str,
        content: dict | None = None,
    ) -> Envelope:
        env = Envelope(
            performative=performative,
            sender=sender,
            receiver=receiver,
            conversation_id=conversation_id,
            content=content or {},
            sent_at=self.engine.now(),
        )
        self.engine.schedule(env.sent_at + self.latency, receiver, env)
        return env

    def dead_letter(self, env: Envelope, reason: str) -> None:
        self.dead_letters.append(DeadLetter(at=self.engine.now(), reason=reason, envelope=env))

    def _on_undeliverable(self, target: str, payload: Any) -> None:
        if isinstance(payload, Envelope):
            self.dead_letter(payload, "unknown receiver")
