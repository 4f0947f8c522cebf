from __future__ import annotations

import functools
import warnings

import pytest

from cohforce.scenarios import get_scenario, run_scenario

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@functools.lru_cache(maxsize=None)
def _cached_run(name: str):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return run_scenario(get_scenario(name))


@pytest.fixture(scope="session")
def scenario_run():
    """Catalogue runs shared across tests; each scenario is propagated once per session."""
    return _cached_run


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marks = dict(report.user_properties).get("criterion")
    if marks is None:
        return
    number, title = marks
    entry = _CRITERIA.setdefault(number, {"title": title, "ok": True, "notes": []})
    note = dict(report.user_properties).get("measured")
    if report.failed:
        entry["ok"] = False
        msg = report.longrepr.reprcrash.message if hasattr(report.longrepr, "reprcrash") else str(report.longrepr)
        entry["notes"].append(msg.splitlines()[0][:160])
    elif note:
        entry["notes"].append(str(note))


@pytest.hookimpl(tryfirst=True)
def pytest_runtest_setup(item):
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        item.user_properties.append(("criterion", tuple(mark.args)))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        e = _CRITERIA[number]
        status = "PASS" if e["ok"] else "FAIL"
        tr.write_line(f"criterion {number:2d} [{status}] {e['title']}")
        for note in e["notes"]:
            tr.write_line(f"    {note}")
