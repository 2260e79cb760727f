import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

_ACCEPTANCE: list[str] = []


def pytest_addoption(parser):
    parser.addoption("--run-long", action="store_true", default=False,
                     help="also run the long family checks (n = 5..7)")


def long_enabled(config) -> bool:
    return config.getoption("--run-long") or os.environ.get("GENPOS_LONG") == "1"


def pytest_collection_modifyitems(config, items):
    if long_enabled(config):
        return
    skip = pytest.mark.skip(reason="long run; use --run-long or GENPOS_LONG=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def report(capsys):
    """Print one PASS/FAIL line for an acceptance criterion."""
    def emit(number, ok, detail=""):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}" + (f"  {detail}" if detail else "")
        _ACCEPTANCE.append(line)
        with capsys.disabled():
            print("\n" + line)
        return ok
    return emit


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
