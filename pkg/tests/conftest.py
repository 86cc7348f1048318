import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from hmcurve.io import load_shape

FIXTURES = Path(__file__).parent / "fixtures"
FIXTURE_NAMES = sorted(p.stem for p in FIXTURES.glob("*.txt"))

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def fixture_path(name: str) -> Path:
    return FIXTURES / f"{name}.txt"


def load_fixture(name: str):
    return load_shape(fixture_path(name))


@pytest.fixture(scope="session")
def fixture_shapes():
    return {name: load_fixture(name) for name in FIXTURE_NAMES}


# one line per acceptance criterion, echoed at the end of the run
CRITERIA: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[k])
