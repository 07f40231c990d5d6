"""Scenario documents: schema, validation, and loading."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from .domain import PlanBlueprint, TaskSpec, validate_blueprint
from .robot_agent import RobotAgentConfig
from .robots_manager import DEREGISTRATION_POLICIES

SCRIPT_OPS = (
    "submit_request",
    "add_blueprint",
    "modify_blueprint",
    "delete_blueprint",
    "register_robot",
    "deregister_robot",
)


class ScenarioError(Exception):
    def __init__(self, errors: list[str]) -> None:
        super().__init__("; ".join(errors))
        self.errors = errors


@dataclass(frozen=True)
class RobotSetup:
    config: RobotAgentConfig
    registered_at_start: bool = False
    initial_history: int = 0


@dataclass(frozen=True)
class WorkloadEntry:
    time: int
    request_id: str
    blueprint_id: str
    requestor: str = "requestor"


@dataclass(frozen=True)
class GeneratorSpec:
    requests_per_tick: int
    blueprint_pool: tuple[str, ...]


@dataclass(frozen=True)
class ScriptEntry:
    time: int
    op: str
    payload: dict


@dataclass
class Scenario:
    master_seed: int
    duration: int
    capability_universe: frozenset[str]
    robots: list[RobotSetup]
    blueprints: list[PlanBlueprint]
    units_per_tick: int = 1
    workload: Union[list[WorkloadEntry], GeneratorSpec, None] = None
    script: list[ScriptEntry] = field(default_factory=list)
    churn_enabled: bool = False
    churn_steps_per_tick: int = 1
    plan_feedback_timeout: int = 20
    task_feedback_timeout: int = 10
    min_robots: int = 2
    deregistration_policy: str = "defer"

    @property
    def n_ticks(self) -> int:
        return -(-self.duration // self.units_per_tick)


def _clean(doc: dict) -> dict:
    return {k: v for k, v in doc.items() if not k.startswith("_")}


def load_scenario(doc: dict) -> Scenario:
    """Build a fully cross-checked Scenario; raises ScenarioError listing
    every offending field."""
    errors: list[str] = []
    doc = _clean(doc)

    def need(key, default=None):
        if key in doc:
            return doc[key]
        if default is not None:
            return default
        errors.append(f"{key}: missing")
        return None

    master_seed = doc.get("master_seed", 0)
    duration = need("duration")
    if isinstance(duration, int) and duration <= 0:
        errors.append("duration: must be > 0")
    units_per_tick = doc.get("units_per_tick", 1)
    if units_per_tick < 1:
        errors.append("units_per_tick: must be >= 1")

    universe = frozenset(doc.get("capability_universe", []))
    if not universe:
        errors.append("capability_universe: missing or empty")

    robots: list[RobotSetup] = []
    robot_ids: set[str] = set()
    for i, rdoc in enumerate(doc.get("robots", [])):
        rdoc = _clean(rdoc)
        path = f"robots[{i}]"
        rid = rdoc.get("id")
        if not rid:
            errors.append(f"{path}.id: missing")
            continue
        if rid in robot_ids:
            errors.append(f"{path}.id: duplicate robot id {rid}")
        robot_ids.add(rid)
        caps = frozenset(rdoc.get("capabilities", []))
        for cap in sorted(caps - universe):
            errors.append(f"{path}.capabilities: unknown capability {cap}")
        try:
            config = RobotAgentConfig(
                id=rid,
                capabilities=caps,
                duration_range=tuple(rdoc.get("duration_range", [1, 3])),
                fail_probability=rdoc.get("fail_probability", 0.0),
            )
        except ValueError as exc:
            errors.append(f"{path}: {exc}")
            continue
        robots.append(
            RobotSetup(
                config=config,
                registered_at_start=rdoc.get("registered_at_start", False),
                initial_history=rdoc.get("initial_history", 0),
            )
        )
    if not robots and "robots" not in doc:
        errors.append("robots: missing")

    blueprints: list[PlanBlueprint] = []
    bp_ids: set[str] = set()
    for i, bdoc in enumerate(doc.get("blueprints", [])):
        path = f"blueprints[{i}]"
        try:
            bp = PlanBlueprint.from_doc(_clean(bdoc))
        except (KeyError, ValueError) as exc:
            errors.append(f"{path}: {exc}")
            continue
        if bp.id in bp_ids:
            errors.append(f"{path}.id: duplicate blueprint id {bp.id}")
        bp_ids.add(bp.id)
        for msg in validate_blueprint(bp, universe):
            errors.append(f"{path}: {msg}")
        blueprints.append(bp)

    workload: Union[list[WorkloadEntry], GeneratorSpec, None] = None
    wdoc = doc.get("workload")
    if wdoc is not None:
        wdoc = _clean(wdoc)
        if "explicit" in wdoc:
            workload = []
            seen_rq: set[str] = set()
            for i, e in enumerate(wdoc["explicit"]):
                e = _clean(e)
                path = f"workload.explicit[{i}]"
                entry = WorkloadEntry(
                    time=e.get("time", 0),
                    request_id=e.get("request_id", f"Rq{i + 1}"),
                    blueprint_id=e.get("blueprint_id", ""),
                    requestor=e.get("requestor", "requestor"),
                )
                if isinstance(duration, int) and entry.time >= duration:
                    errors.append(f"{path}.time: {entry.time} >= duration {duration}")
                if entry.time < 0:
                    errors.append(f"{path}.time: negative")
                if entry.request_id in seen_rq:
                    errors.append(f"{path}.request_id: duplicate {entry.request_id}")
                seen_rq.add(entry.request_id)
                workload.append(entry)
        elif "generator" in wdoc:
            g = _clean(wdoc["generator"])
            pool = tuple(g.get("blueprint_pool", sorted(bp_ids)))
            for bp_id in pool:
                if bp_id not in bp_ids:
                    errors.append(f"workload.generator.blueprint_pool: unknown blueprint {bp_id}")
            workload = GeneratorSpec(
                requests_per_tick=g.get("requests_per_tick", 1),
                blueprint_pool=pool,
            )
        else:
            errors.append("workload: expected 'explicit' or 'generator'")

    script: list[ScriptEntry] = []
    for i, sdoc in enumerate(doc.get("script", [])):
        sdoc = _clean(sdoc)
        path = f"script[{i}]"
        op = sdoc.get("op")
        if op not in SCRIPT_OPS:
            errors.append(f"{path}.op: unknown op {op!r}")
            continue
        at = sdoc.get("time", 0)
        if isinstance(duration, int) and at > duration:
            errors.append(f"{path}.time: {at} > duration {duration}")
        payload = {k: v for k, v in sdoc.items() if k not in ("time", "op")}
        if op in ("add_blueprint", "modify_blueprint"):
            try:
                bp = PlanBlueprint.from_doc(_clean(payload["blueprint"]))
                for msg in validate_blueprint(bp, universe):
                    errors.append(f"{path}: {msg}")
                payload = {"blueprint": bp}
            except (KeyError, ValueError) as exc:
                errors.append(f"{path}.blueprint: {exc}")
                continue
        script.append(ScriptEntry(time=at, op=op, payload=payload))

    churn = _clean(doc.get("churn", {}))
    timeouts = _clean(doc.get("timeouts", {}))
    policies = _clean(doc.get("policies", {}))
    policy = policies.get("deregistration", "defer")
    if policy not in DEREGISTRATION_POLICIES:
        errors.append(f"policies.deregistration: unknown policy {policy!r}")

    if errors:
        raise ScenarioError(errors)

    return Scenario(
        master_seed=master_seed,
        duration=duration,
        units_per_tick=units_per_tick,
        capability_universe=universe,
        robots=robots,
        blueprints=blueprints,
        workload=workload,
        script=script,
        churn_enabled=churn.get("enabled", False),
        churn_steps_per_tick=churn.get("steps_per_tick", 1),
        plan_feedback_timeout=timeouts.get("plan_feedback", 20),
        task_feedback_timeout=timeouts.get("task_feedback", 10),
        min_robots=policies.get("min_robots", 2),
        deregistration_policy=policy,
    )


def load_scenario_file(path: Union[str, Path]) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return load_scenario(json.load(fh))


def bundled_scenario_path(name: str) -> Path:
    return Path(__file__).parent / "scenarios" / f"{name}.json"
