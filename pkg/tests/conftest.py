import re

_CRITERIA: dict = {}
_PAT = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_")


def pytest_runtest_logreport(report):
    m = _PAT.search(report.nodeid)
    if not m:
        return
    num = int(m.group(1))
    if report.when == "call" or report.failed:
        _CRITERIA[num] = _CRITERIA.get(num, True) and report.passed


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        terminalreporter.write_line(f"CRITERION {num}: {'PASS' if _CRITERIA[num] else 'FAIL'}")
