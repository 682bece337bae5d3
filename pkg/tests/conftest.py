import pytest

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): an acceptance criterion, reported by label")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    label = marker.args[0]
    if rep.when == "call" or rep.failed:
        if rep.failed or label not in _CRITERIA:
            _CRITERIA[label] = ("PASS" if rep.passed else "FAIL", rep.duration)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label, (status, seconds) in _CRITERIA.items():
        terminalreporter.write_line(f"{status}  {label}  ({seconds:.1f} s)")
