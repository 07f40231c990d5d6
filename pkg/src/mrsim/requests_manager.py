"""FCFS request intake, blueprint matching, and plan-feedback arbitration."""

from __future__ import annotations

from collections import deque
from typing import Iterable, Optional

from .bus import Envelope, MessageBus, Performative
from .domain import (
    FailureKind,
    FailureReason,
    KnowledgeBase,
    PlanBlueprint,
    Request,
    RequestStatus,
    validate_blueprint,
)
from .engine import Engine, EventHandle
from .events import BlueprintCrud, PlanFeedbackTimeout, SubmitRequest
from .metrics import MetricsCollector

REQUESTS_MANAGER = "requests_manager"
PLANNER = "planner"


class RequestsManager:
    """Serializes request processing: one plan in flight, arrival order kept."""

    def __init__(
        self,
        engine: Engine,
        bus: MessageBus,
        kb: KnowledgeBase,
        metrics: MetricsCollector,
        capability_universe: Iterable[str],
        plan_feedback_timeout: int = 20,
    ) -> None:
        self.engine = engine
        self.bus = bus
        self.kb = kb
        self.metrics = metrics
        self.universe = frozenset(capability_universe)
        self.plan_feedback_timeout = plan_feedback_timeout
        self.queue: deque[Request] = deque()
        self.in_flight: Optional[Request] = None
        self.feedback_timer: Optional[EventHandle] = None
        self.requests: dict[str, Request] = {}
        self.stale_feedback: list[dict] = []
        self.crud_errors: list[str] = []
        bus.subscribe(REQUESTS_MANAGER, self.handle)

    def handle(self, payload) -> None:
        if isinstance(payload, SubmitRequest):
            self.on_request(payload.request)
        elif isinstance(payload, BlueprintCrud):
            self.blueprint_crud(payload)
        elif isinstance(payload, PlanFeedbackTimeout):
            self.on_plan_timeout(payload)
        elif isinstance(payload, Envelope):
            self.on_plan_feedback(payload)

    # -- intake ------------------------------------------------------------

    def on_request(self, rq: Request) -> None:
        if rq.id in self.requests:
            # Conversation ids must stay unique; the duplicate is rejected
            # without entering the lifecycle.
            self.bus.send(
                Performative.REQUEST_FAIL,
                REQUESTS_MANAGER,
                rq.requestor,
                rq.id,
                {"request_id": rq.id, "reason": "DuplicateRequestId"},
            )
            return
        self.requests[rq.id] = rq
        self.metrics.on_arrival(rq.id, self.engine.now())
        self.queue.append(rq)
        self.process_next()

    def process_next(self) -> None:
        while self.in_flight is None and self.queue:
            rq = self.queue.popleft()
            now = self.engine.now()
            rq.status = RequestStatus.IN_PROGRESS
            rq.start_time = now
            self.metrics.on_start(rq.id, now)
            bp = self.match_blueprint(rq)
            if bp is None:
                self._terminal(rq, RequestStatus.FAILED, FailureReason(FailureKind.NO_BLUEPRINT_MATCH))
                continue
            self.in_flight = rq
            self.dispatch_to_planner(bp, rq)

    def match_blueprint(self, rq: Request) -> Optional[PlanBlueprint]:
        """KB state at this instant decides the match; prior CRUD edits count."""
        return self.kb.blueprints.get(rq.blueprint_id)

    def dispatch_to_planner(self, bp: PlanBlueprint, rq: Request) -> None:
        # Blueprints are immutable values; a later modify replaces the KB
        # entry, so the planner keeps working on this exact snapshot.
        self.bus.send(
            Performative.BLUEPRINT_TO_PLANNER,
            REQUESTS_MANAGER,
            PLANNER,
            rq.id,
            {"blueprint": bp, "request_id": rq.id},
        )
        self.feedback_timer = self.engine.schedule(
            self.engine.now() + self.plan_feedback_timeout,
            REQUESTS_MANAGER,
            PlanFeedbackTimeout(rq.id),
        )

    # -- feedback ----------------------------------------------------------

    def on_plan_feedback(self, env: Envelope) -> None:
        if self.in_flight is None or env.conversation_id != self.in_flight.id:
            self.stale_feedback.append(
                {"at": self.engine.now(), "conversation_id": env.conversation_id,
                 "performative": env.performative.value}
            )
            return
        rq = self.in_flight
        if self.feedback_timer is not None:
            self.engine.cancel(self.feedback_timer)
            self.feedback_timer = None
        self.in_flight = None
        if env.performative is Performative.PLAN_EXEC_SUCCESS:
            self._terminal(rq, RequestStatus.SUCCEEDED, None)
        elif env.performative in (Performative.PLAN_FAIL, Performative.PLAN_EXEC_FAIL):
            self._terminal(rq, RequestStatus.FAILED, env.content.get("reason"))
        else:
            self.stale_feedback.append(
                {"at": self.engine.now(), "conversation_id": env.conversation_id,
                 "performative": env.performative.value}
            )
            self.in_flight = rq
            return
        self.process_next()

    def on_plan_timeout(self, evt: PlanFeedbackTimeout) -> None:
        if self.in_flight is None or self.in_flight.id != evt.request_id:
            return
        rq = self.in_flight
        self.feedback_timer = None
        self.in_flight = None
        self._terminal(rq, RequestStatus.FAILED, FailureReason(FailureKind.PLAN_FEEDBACK_TIMEOUT))
        self.process_next()

    def _terminal(self, rq: Request, status: RequestStatus, reason) -> None:
        now = self.engine.now()
        rq.status = status
        rq.end_time = now
        if isinstance(reason, FailureReason):
            rq.failure = reason
        described = reason.describe() if isinstance(reason, FailureReason) else reason
        self.metrics.on_terminal(rq.id, now, status, described)
        performative = (
            Performative.REQUEST_SUCCESS
            if status is RequestStatus.SUCCEEDED
            else Performative.REQUEST_FAIL
        )
        content = {"request_id": rq.id}
        if reason is not None:
            content["reason"] = reason
        self.bus.send(performative, REQUESTS_MANAGER, rq.requestor, rq.id, content)

    # -- blueprint CRUD ----------------------------------------------------

    def blueprint_crud(self, cmd: BlueprintCrud) -> Optional[str]:
        error = self.check_crud(cmd)
        if error is not None:
            self.crud_errors.append(error)
            return error
        if cmd.op == "delete":
            del self.kb.blueprints[cmd.blueprint_id]
        else:
            self.kb.blueprints[cmd.blueprint.id] = cmd.blueprint
        return None

    def check_crud(self, cmd: BlueprintCrud) -> Optional[str]:
        """Validate a CRUD command against the current KB without applying it."""
        if cmd.op == "add":
            if cmd.blueprint_id in self.kb.blueprints:
                return f"duplicate blueprint id {cmd.blueprint_id}"
            return self._validation_error(cmd.blueprint)
        if cmd.op == "delete":
            if cmd.blueprint_id not in self.kb.blueprints:
                return f"unknown blueprint id {cmd.blueprint_id}"
            return None
        if cmd.op == "modify":
            if cmd.blueprint_id not in self.kb.blueprints:
                return f"unknown blueprint id {cmd.blueprint_id}"
            return self._validation_error(cmd.blueprint)
        return f"unknown CRUD op {cmd.op!r}"

    def _validation_error(self, bp: PlanBlueprint) -> Optional[str]:
        errors = validate_blueprint(bp, self.universe)
        return "; ".join(errors) if errors else None
