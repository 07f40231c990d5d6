import copy

import pytest

from mrsim import load_scenario
from mrsim.harness import run
from mrsim.simulation import Simulation

PB2_TASKS = [
    {"label": "T1", "required": ["C1", "C3", "C4"]},
    {"label": "T2", "required": ["C2"]},
    {"label": "T3", "required": ["C2", "C5"]},
]

BASE_DOC = {
    "master_seed": 42,
    "duration": 30,
    "capability_universe": ["C1", "C2", "C3", "C4", "C5"],
    "robots": [
        {
            "id": "R1",
            "capabilities": ["C1", "C2", "C3", "C4"],
            "duration_range": [2, 2],
            "registered_at_start": True,
        },
        {
            "id": "R3",
            "capabilities": ["C2", "C5"],
            "duration_range": [2, 2],
            "registered_at_start": True,
        },
    ],
    "blueprints": [{"id": "Pb2", "tasks": PB2_TASKS}],
}


def scenario_doc(**over) -> dict:
    doc = copy.deepcopy(BASE_DOC)
    doc.update(copy.deepcopy(over))
    return doc


def make_scenario(**over):
    return load_scenario(scenario_doc(**over))


def make_sim(**over) -> Simulation:
    return Simulation(make_scenario(**over))


def run_doc(**over):
    return run(make_scenario(**over))


@pytest.fixture
def sim() -> Simulation:
    return make_sim()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion at the end of the run."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py" not in getattr(report, "nodeid", ""):
                continue
            name = report.nodeid.split("::")[-1]
            criterion = name.removeprefix("test_criterion_").replace("_", " ")
            lines.append((criterion, "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.write_line("")
        terminalreporter.write_line("acceptance criteria:")
        for criterion, verdict in lines:
            terminalreporter.write_line(f"  {criterion}: {verdict}")
