import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from reflmap.groebner import gb_settings
from reflmap.problem import load_problem

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"

settings.register_profile(
    "repo",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))


@pytest.fixture(autouse=True)
def checked_bases():
    """Every Groebner and standard basis computed by a test is verified on the spot."""
    with gb_settings(self_check=True):
        yield


_cache = {}


def problem(name, **kw):
    key = (name, tuple(sorted(kw.items())))
    if key not in _cache:
        _cache[key] = load_problem(PROBLEMS / f"{name}.json", **kw)
    return _cache[key]


@pytest.fixture
def load():
    return problem


# -- acceptance summary ---------------------------------------------------------------

_criteria = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    item = _items.get(report.nodeid)
    if item is None:
        return
    mark = item.get_closest_marker("criterion")
    number, title = mark.args[0], mark.args[1]
    ok = report.passed
    prev = _criteria.get(number)
    _criteria[number] = (title, (prev[1] if prev else True) and ok, (prev[2] if prev else 0.0) + report.duration)


_items = {}


def pytest_collection_modifyitems(items):
    for item in items:
        if item.get_closest_marker("criterion") is not None:
            _items[item.nodeid] = item


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok, secs = _criteria[number]
        tr.write_line(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {secs:7.1f} s  {title}")
