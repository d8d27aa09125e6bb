import numpy as np
import pytest

_ACCEPTANCE: dict[str, tuple[str, str]] = {}


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        props = dict(report.user_properties)
        name = props.get("criterion", report.nodeid.split("::")[-1])
        _ACCEPTANCE[name] = ("PASS" if report.passed else "FAIL", props.get("measured", ""))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
        status, measured = _ACCEPTANCE[name]
        terminalreporter.write_line(f"{status}  {name}  {measured}")
