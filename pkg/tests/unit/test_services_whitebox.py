from __future__ import annotations
"""
White-box unit tests for the service layer (group_service, scenario_service).

What these tests are
--------------------
Coverage-guided tests on the orchestration branches: the verdict table, the
hypothesis gate short-circuit, errors raised inside a check, group axiom runs
on the builtin families and rejected group files.

Why stubs are used
------------------
The scenario runner's observable behavior is the order and status of the
records it assembles. Individual checks are numerically heavy and covered by
the domain tests, so the runner tests swap them for capture stubs.

How to read each test
---------------------
Arrange: stub check functions or write an input file
Act: call exactly one service function
Assert: records, statuses and the verdict
"""
import pytest

from app.domain.enums import CheckName, CheckStatus, GroupKind, Verdict
from app.domain.exceptions import ConfigError, SupportNotContained
from app.domain.models.Scenario import GroupSource
from app.domain.models.VerificationReport import CheckRecord, VerificationReport
from app.repository.scenarios_repo import parse_scenario
from app.services import scenario_service
from app.services.group_service import check_group, check_group_file, load_group
from app.services.scenario_service import prepare, run_scenario, scenario_hash, verdict_for

ALL_CHECKS = tuple(CheckName)
CONDITIONS = (CheckName.LIPSCHITZ, CheckName.RESIDUAL, CheckName.LAGRANGIAN)

SCENARIO = """
name = "stubbed"
j = [2]
checks = ["holder_gate", "lipschitz", "residual", "lagrangian"]

[group]
kind = "heisenberg"
k = 1
eps = 0.5

[field]
kind = "linear_x2"

[datum]
kind = "constant"
value = 1.0

[domain]
lower = [0.0, -1.0]
upper = [1.0, 1.0]
counts = [5, 9]
"""


def _record(name: CheckName, passed: bool) -> CheckRecord:
    return CheckRecord(
        name=name.value,
        status=CheckStatus.PASS if passed else CheckStatus.FAIL,
        measured=0.0,
        tolerance=1.0,
    )


def _report(**outcomes: bool) -> VerificationReport:
    report = VerificationReport()
    for name in ALL_CHECKS:
        if name.value in outcomes:
            report.add(_record(name, outcomes[name.value]))
    return report


# ------------------------------------------------
# Verdict table
# ------------------------------------------------

@pytest.mark.parametrize("lipschitz, residual, lagrangian, expected", [
    (True, True, True, Verdict.EQUIVALENT_HOLD),
    (False, False, False, Verdict.EQUIVALENT_FAIL),
    (True, False, False, Verdict.DATUM_MISMATCH),
    (True, True, False, Verdict.COUNTEREXAMPLE),
    (True, False, True, Verdict.COUNTEREXAMPLE),
    (False, True, True, Verdict.COUNTEREXAMPLE),
    (False, False, True, Verdict.COUNTEREXAMPLE),
])
def test_verdict_table(lipschitz, residual, lagrangian, expected):
    # Arrange
    report = _report(holder_gate=True, lipschitz=lipschitz, residual=residual, lagrangian=lagrangian)

    # Act / Assert
    assert verdict_for(report, ALL_CHECKS) is expected


def test_failed_gate_overrides_conditions():
    report = _report(holder_gate=False, lipschitz=True, residual=True, lagrangian=True)
    assert verdict_for(report, ALL_CHECKS) is Verdict.HYPOTHESIS_FAILED


def test_missing_condition_is_incomplete():
    report = _report(lipschitz=True, residual=True)
    assert verdict_for(report, (CheckName.LIPSCHITZ, CheckName.RESIDUAL)) is Verdict.INCOMPLETE


# ------------------------------------------------
# Scenario runner
# ------------------------------------------------

@pytest.fixture
def stub_checks(monkeypatch):
    """Replace every check with a stub returning the given outcome; records the call order."""
    calls: list[str] = []

    def install(**outcomes: bool) -> list[str]:
        for name in ALL_CHECKS:
            attr = {
                CheckName.HOLDER_GATE: "_holder_gate",
                CheckName.LIPSCHITZ: "_lipschitz",
                CheckName.RESIDUAL: "_residual",
                CheckName.LAGRANGIAN: "_lagrangian",
                CheckName.MOLLIFICATION: "_mollification",
            }[name]

            def stub(ctx, name=name):
                calls.append(name.value)
                return _record(name, outcomes.get(name.value, True))

            monkeypatch.setattr(scenario_service, attr, stub)
        return calls

    return install


def test_runner_follows_fixed_order_and_attaches_verdict(stub_checks):
    # Arrange: scenario lists the checks out of order
    scenario = parse_scenario(SCENARIO.replace(
        '["holder_gate", "lipschitz", "residual", "lagrangian"]',
        '["lagrangian", "residual", "holder_gate", "lipschitz"]',
    ))
    calls = stub_checks()

    # Act
    report = run_scenario(scenario)

    # Assert
    assert calls == ["holder_gate", "lipschitz", "residual", "lagrangian"]
    assert [r.name for r in report.records] == calls
    assert report.verdict is Verdict.EQUIVALENT_HOLD
    assert report.provenance["scenario"] == "stubbed"
    assert report.provenance["scenario_hash"] == scenario_hash(scenario)
    assert report.created_at is not None


def test_failed_gate_skips_the_remaining_checks(stub_checks):
    # Arrange
    calls = stub_checks(holder_gate=False)

    # Act
    report = run_scenario(parse_scenario(SCENARIO))

    # Assert
    assert calls == ["holder_gate"]
    assert [r.status for r in report.records[1:]] == [CheckStatus.SKIPPED] * 3
    assert report.verdict is Verdict.HYPOTHESIS_FAILED


def test_lab_error_inside_a_check_becomes_error_record(stub_checks, monkeypatch):
    # Arrange
    stub_checks()

    def broken(ctx):
        raise SupportNotContained("support leaves the domain")

    monkeypatch.setattr(scenario_service, "_residual", broken)

    # Act
    report = run_scenario(parse_scenario(SCENARIO))

    # Assert
    record = report.get("residual")
    assert record.status is CheckStatus.ERROR
    assert record.details["error"] == "SupportNotContained"
    assert report.verdict is Verdict.COUNTEREXAMPLE
    assert report.all_passed is False


def test_prepare_wraps_build_errors_as_config_error():
    # Arrange: a levelset name the catalog does not know
    scenario = parse_scenario(SCENARIO.replace('kind = "linear_x2"', 'kind = "levelset"\nf = "x1_minus_nothing"'))

    # Act / Assert
    with pytest.raises(ConfigError):
        prepare(scenario)


def test_scenario_hash_is_stable_and_sensitive():
    first = parse_scenario(SCENARIO)
    second = parse_scenario(SCENARIO)
    changed = parse_scenario(SCENARIO.replace("value = 1.0", "value = 0.0"))

    assert scenario_hash(first) == scenario_hash(second)
    assert scenario_hash(first) != scenario_hash(changed)


# ------------------------------------------------
# Groups
# ------------------------------------------------

@pytest.mark.parametrize("source", [
    GroupSource(kind=GroupKind.HEISENBERG, params={"k": 1}),
    GroupSource(kind=GroupKind.HEISENBERG, params={"k": 2}),
    GroupSource(kind=GroupKind.FREE2, params={"m": 3}),
    GroupSource(kind=GroupKind.COMPLEXIFIED_HEISENBERG),
    GroupSource(kind=GroupKind.CORANK1, params={"B": [
        [0.0, 0.7, -1.2, 0.3],
        [-0.7, 0.0, 0.4, -0.9],
        [1.2, -0.4, 0.0, 0.5],
        [-0.3, 0.9, -0.5, 0.0],
    ]}),
])
def test_builtin_groups_pass_every_property(source):
    # Arrange
    spec = load_group(source, calibration_samples=20_000, seed=0)

    # Act
    report = check_group(spec, samples=10_000, seed=0, calibration_samples=20_000)

    # Assert
    assert report.get("associativity").resolution == {"samples": 10_000}
    assert report.all_passed, [r.to_dict() for r in report.records if r.failed]
    assert 0 < spec.eps <= 1
    assert len(report.records) == 8


def test_explicit_group_is_calibrated():
    # Arrange
    source = GroupSource(kind=None, params={"m": 2, "n": 1}, matrices=[[[0.0, 1.0], [-1.0, 0.0]]])

    # Act
    spec = load_group(source, calibration_samples=20_000)

    # Assert
    assert 0 < spec.eps <= 1


def test_non_skew_group_file_is_an_error_record(tmp_path):
    # Arrange
    path = tmp_path / "bad.toml"
    path.write_text("m = 2\nn = 1\nB = [[[0.0, 1.0], [1.0, 0.0]]]\n", encoding="utf-8")

    # Act
    report = check_group_file(path, samples=100)

    # Assert
    assert len(report.records) == 1
    assert report.records[0].name == "NotSkewSymmetric"
    assert report.records[0].status is CheckStatus.ERROR
    assert report.all_passed is False
