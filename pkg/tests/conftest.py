"""Collects acceptance outcomes and prints one line per criterion at the end of the run."""

import pytest

_outcomes: dict[int, tuple[str, bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): an acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    report = outcome.get_result()
    if report.when == "call" or report.failed:
        passed = _outcomes.get(number, (title, True))[1] and report.passed
        _outcomes[number] = (title, passed)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        title, passed = _outcomes[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {title}")
