"""
Test check results, severities and report selection
"""
import warnings

import pytest

from bost_connes.core.checks import (
    Report,
    Severity,
    Status,
    check,
    first_failure,
    info,
    is_strict,
    set_strict,
)
from bost_connes.exceptions import DeviationWarning, VerificationError


@pytest.fixture(autouse=True)
def lenient():
    set_strict(False)
    yield
    set_strict(False)


def test_passing_check_drops_witness():
    r = check("demo.pass", True, "fine", witness={"x": 1})
    assert r.status is Status.PASS
    assert r.ok and not r.is_fatal
    assert "witness" not in r.to_dict()


def test_fatal_failure_recorded_when_lenient():
    r = check("demo.fail", False, "broken", witness=(1, 2))
    assert r.is_fatal
    assert r.to_dict()["witness"] == [1, 2]


def test_fatal_failure_raises_when_strict():
    set_strict(True)
    assert is_strict()
    with pytest.raises(VerificationError) as exc:
        check("demo.strict", False, "broken", witness=3)
    assert exc.value.check_id == "demo.strict"
    assert exc.value.witness == 3


def test_deviation_warns_and_never_fails():
    set_strict(True)
    with pytest.warns(DeviationWarning):
        r = check("demo.audit", False, "claim off", severity=Severity.DEVIATION)
    assert r.status is Status.DEVIATION
    assert not r.is_fatal


def test_report_summary_and_select():
    report = Report("demo")
    report.add(check("a.one", True))
    report.add(info("a.two", "numbers", value=5))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DeviationWarning)
        report.add(check("b.one", False, severity=Severity.DEVIATION))
    report.add(check("b.two", False))
    summary = report.summary()
    assert summary == {"pass": 1, "fail": 1, "deviation": 1, "info": 1}
    assert not report.passed
    assert [r.check_id for r in report.select(["a.*"]).results] == ["a.one", "a.two"]
    assert report.select(["a.*"]).passed
    assert report.select([]).results == []
    assert len(report.deviations) == 1


def test_report_json_is_plain():
    report = Report("demo")
    report.add(info("x.y", "sets sort", items={3, 1, 2}))
    d = report.to_dict()
    assert d["results"][0]["data"]["items"] == [1, 2, 3]
    assert '"title": "demo"' in report.to_json()


def test_first_failure():
    assert first_failure([2, 4, 5, 6], lambda v: v % 2 == 0) == 5
    assert first_failure([2, 4], lambda v: v % 2 == 0) is None
