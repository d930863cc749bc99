"""Collects acceptance-criterion outcomes and prints one line per criterion."""

import pytest

_ACCEPTANCE = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or not marker.args:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        measured = dict(item.user_properties).get("measured", "")
        _ACCEPTANCE[marker.args[0]] = (rep.outcome, item.name, measured)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        outcome, name, measured = _ACCEPTANCE[number]
        status = "PASS" if outcome == "passed" else "FAIL"
        detail = f" ({measured})" if measured else ""
        terminalreporter.write_line(f"criterion {number}: {status}  {name}{detail}")
