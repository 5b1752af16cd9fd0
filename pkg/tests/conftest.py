import re

from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("default")

_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    key = (int(m.group(1)), m.group(2))
    if report.when == "call" or report.failed:
        prev = _ACCEPTANCE.get(key, True)
        _ACCEPTANCE[key] = prev and report.passed


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for (num, name), ok in sorted(_ACCEPTANCE.items()):
        terminalreporter.write_line(f"criterion {num} ({name.replace('_', ' ')}): {'PASS' if ok else 'FAIL'}")
