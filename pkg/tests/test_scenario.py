import pytest

from conftest import scenario_doc

from mrsim.scenario import (
    GeneratorSpec,
    ScenarioError,
    bundled_scenario_path,
    load_scenario,
    load_scenario_file,
)


class TestLoad:
    def test_minimal_document(self):
        sc = load_scenario(scenario_doc())
        assert sc.master_seed == 42
        assert sc.duration == 30
        assert [r.config.id for r in sc.robots] == ["R1", "R3"]
        assert [bp.id for bp in sc.blueprints] == ["Pb2"]

    def test_defaults(self):
        sc = load_scenario(scenario_doc())
        assert sc.units_per_tick == 1
        assert sc.plan_feedback_timeout == 20
        assert sc.task_feedback_timeout == 10
        assert sc.min_robots == 2
        assert sc.deregistration_policy == "defer"
        assert sc.churn_enabled is False
        assert sc.workload is None

    def test_underscore_keys_ignored(self):
        doc = scenario_doc(_comment="ignored")
        doc["robots"][0]["_note"] = "also ignored"
        load_scenario(doc)

    def test_generator_workload(self):
        sc = load_scenario(
            scenario_doc(workload={"generator": {"requests_per_tick": 2}})
        )
        assert sc.workload == GeneratorSpec(requests_per_tick=2, blueprint_pool=("Pb2",))

    def test_explicit_workload_sorted_later(self):
        sc = load_scenario(
            scenario_doc(
                workload={
                    "explicit": [
                        {"time": 5, "request_id": "RqB", "blueprint_id": "Pb2"},
                        {"time": 2, "request_id": "RqA", "blueprint_id": "Pb2"},
                    ]
                }
            )
        )
        assert [e.request_id for e in sc.workload] == ["RqB", "RqA"]

    def test_ticks_round_up(self):
        sc = load_scenario(scenario_doc(duration=7, units_per_tick=3))
        assert sc.n_ticks == 3


class TestDiagnostics:
    def errors_of(self, **over):
        with pytest.raises(ScenarioError) as exc:
            load_scenario(scenario_doc(**over))
        return exc.value.errors

    def test_missing_duration(self):
        doc = scenario_doc()
        del doc["duration"]
        with pytest.raises(ScenarioError) as exc:
            load_scenario(doc)
        assert "duration: missing" in exc.value.errors

    def test_unknown_robot_capability_has_path(self):
        doc = scenario_doc()
        doc["robots"][1]["capabilities"] = ["C2", "C9"]
        with pytest.raises(ScenarioError) as exc:
            load_scenario(doc)
        assert "robots[1].capabilities: unknown capability C9" in exc.value.errors

    def test_duplicate_robot_id(self):
        doc = scenario_doc()
        doc["robots"][1]["id"] = "R1"
        with pytest.raises(ScenarioError) as exc:
            load_scenario(doc)
        assert any("duplicate robot id R1" in e for e in exc.value.errors)

    def test_bad_duration_range(self):
        doc = scenario_doc()
        doc["robots"][0]["duration_range"] = [3, 1]
        with pytest.raises(ScenarioError) as exc:
            load_scenario(doc)
        assert any(e.startswith("robots[0]:") for e in exc.value.errors)

    def test_blueprint_unknown_capability(self):
        errors = self.errors_of(
            blueprints=[{"id": "PbX", "tasks": [{"label": "T1", "required": ["C9"]}]}]
        )
        assert any("blueprints[0]" in e and "C9" in e for e in errors)

    def test_workload_entry_beyond_horizon(self):
        errors = self.errors_of(
            workload={"explicit": [{"time": 30, "request_id": "Rq1", "blueprint_id": "Pb2"}]}
        )
        assert "workload.explicit[0].time: 30 >= duration 30" in errors

    def test_generator_unknown_pool_entry(self):
        errors = self.errors_of(
            workload={"generator": {"requests_per_tick": 1, "blueprint_pool": ["PbZ"]}}
        )
        assert any("unknown blueprint PbZ" in e for e in errors)

    def test_unknown_script_op(self):
        errors = self.errors_of(script=[{"time": 0, "op": "explode"}])
        assert any("script[0].op" in e for e in errors)

    def test_unknown_policy(self):
        errors = self.errors_of(policies={"deregistration": "linger"})
        assert any("policies.deregistration" in e for e in errors)

    def test_multiple_errors_reported_together(self):
        doc = scenario_doc(policies={"deregistration": "linger"})
        del doc["duration"]
        with pytest.raises(ScenarioError) as exc:
            load_scenario(doc)
        assert len(exc.value.errors) >= 2


class TestBundledScenario:
    def test_thirty_tick_showcase_loads(self):
        sc = load_scenario_file(bundled_scenario_path("paper_sec6"))
        assert sc.duration == 30
        assert len(sc.robots) == 3
        assert len(sc.blueprints) == 3
        assert sc.churn_enabled is True
        assert isinstance(sc.workload, GeneratorSpec)
        registered = [r.config.id for r in sc.robots if r.registered_at_start]
        assert registered == ["R1", "R3"]
