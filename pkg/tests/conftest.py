import pytest

_VERDICTS: dict[int, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        verdict = "PASS" if report.outcome == "passed" else "FAIL"
        # several tests can share a criterion; any failure fails it
        previous = _VERDICTS.get(number)
        if previous is None or previous[1] == "PASS":
            _VERDICTS[number] = (title, verdict)


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_VERDICTS):
        title, verdict = _VERDICTS[number]
        terminalreporter.write_line(f"criterion {number:>2}: {verdict}  {title}")
