import pytest

_VERDICTS = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    # one verdict per test: the call phase, or setup if that already failed
    if marker is None or not (report.when == "call" or (report.when == "setup" and report.failed)):
        return
    number, text = marker.args
    line = f"[{'PASS' if report.passed else 'FAIL'}] criterion {number}: {text}"
    _VERDICTS.append((number, line))
    print(f"\n{line}")


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_VERDICTS, key=lambda t: t[0]):
        terminalreporter.write_line(line)
