import pytest
from hypothesis import given
from hypothesis import strategies as st

from mrsim.domain import (
    PlanBlueprint,
    Request,
    TaskSpec,
    satisfies,
    validate_blueprint,
)

CAPS = ["C1", "C2", "C3", "C4", "C5"]


def task(label, *caps):
    return TaskSpec(label=label, required=frozenset(caps))


class TestSatisfies:
    def test_superset_of_required(self):
        assert satisfies({"C1", "C2", "C3", "C4"}, task("T1", "C1", "C3", "C4"))

    def test_missing_capability(self):
        assert not satisfies({"C2", "C5"}, task("T1", "C1", "C3", "C4"))

    def test_empty_robot(self):
        assert not satisfies(set(), task("T", "C1"))

    def test_exact_match(self):
        assert satisfies({"C2", "C5"}, task("T3", "C2", "C5"))

    @given(
        caps=st.frozensets(st.sampled_from(CAPS)),
        extra=st.frozensets(st.sampled_from(CAPS)),
        required=st.frozensets(st.sampled_from(CAPS), min_size=1),
    )
    def test_monotone_in_capabilities(self, caps, extra, required):
        t = TaskSpec(label="T", required=required)
        if satisfies(caps, t):
            assert satisfies(caps | extra, t)


class TestTaskSpec:
    def test_requires_nonempty_capability_set(self):
        with pytest.raises(ValueError):
            TaskSpec(label="T1", required=frozenset())

    def test_duplicate_capabilities_collapse(self):
        t = TaskSpec(label="T1", required=frozenset(["C1", "C1"]))
        assert t.required == frozenset(["C1"])

    def test_doc_round_trip(self):
        t = task("T1", "C2", "C1")
        assert TaskSpec.from_doc(t.to_doc()) == t


class TestValidateBlueprint:
    def test_fig10_blueprint_is_valid(self):
        bp = PlanBlueprint(
            id="Pb2",
            tasks=(task("T1", "C1", "C3", "C4"), task("T2", "C2"), task("T3", "C2", "C5")),
        )
        assert validate_blueprint(bp, CAPS) == []

    def test_empty_task_list(self):
        bp = PlanBlueprint(id="Pb0", tasks=())
        errors = validate_blueprint(bp, CAPS)
        assert any("empty task list" in e for e in errors)

    def test_unknown_capability_named(self):
        bp = PlanBlueprint(id="Pb9", tasks=(task("T1", "C9"),))
        errors = validate_blueprint(bp, CAPS)
        assert any("unknown capability C9" in e for e in errors)

    def test_duplicate_task_labels(self):
        bp = PlanBlueprint(id="Pb1", tasks=(task("T1", "C1"), task("T1", "C2")))
        errors = validate_blueprint(bp, CAPS)
        assert any("duplicate task label T1" in e for e in errors)


class TestRequest:
    def test_negative_arrival_rejected(self):
        with pytest.raises(ValueError):
            Request(id="Rq1", requestor="req", blueprint_id="Pb1", arrival_time=-1)
