import pytest

from src.acceptance import CHECKS, format_report, run_checks
from src.models import CheckResult, VerificationReport

FAST = ["AC1", "AC2", "AC4", "AC8", "AC9", "AC11", "AC12"]


def test_battery_is_complete():
    assert [check_id for check_id, _, _ in CHECKS] == [f"AC{i}" for i in range(1, 13)]


@pytest.mark.parametrize("check_id", FAST)
def test_fast_checks_pass(check_id):
    report = run_checks(20240101, [check_id])
    assert [r.id for r in report.results] == [check_id]
    assert report.passed, report.results[0].detail


@pytest.mark.slow
def test_full_battery():
    report = run_checks(20240101)
    assert len(report.results) == 12
    failed = [r for r in report.results if not r.passed]
    assert failed == []


def test_same_seed_same_report():
    assert run_checks(3, ["AC9"]) == run_checks(3, ["AC9"])


def test_format_report():
    report = VerificationReport(
        results=[
            CheckResult(id="AC1", title="first", passed=True, detail="ok"),
            CheckResult(id="AC2", title="second", passed=False, detail="broken"),
        ],
        passed=False,
    )
    text = format_report(report)
    assert "✓ AC1   first: ok" in text
    assert "❌ AC2   second: broken" in text
    assert text.endswith("1 passed, 1 failed")
