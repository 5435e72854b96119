import re

import pytest

_ACCEPTANCE: dict[int, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    m = re.match(r"test_acceptance_(\d+)_", item.name)
    if not m or report.when not in ("setup", "call"):
        return
    k = int(m.group(1))
    if report.failed or (report.when == "call") or k not in _ACCEPTANCE:
        status = "PASS" if report.passed else "FAIL"
        if report.when == "setup" and report.passed:
            return
        _ACCEPTANCE[k] = (status, item.name)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        status, name = _ACCEPTANCE[k]
        terminalreporter.write_line(f"acceptance {k}: {status} ({name})")
