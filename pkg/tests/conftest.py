import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from bergmanlab.weights import RadialWeight

settings.register_profile("lab", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("lab")

ACCEPTANCE = {}


def record(number, passed, detail):
    """Store one acceptance line; printed in the terminal summary."""
    ACCEPTANCE[number] = (bool(passed), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def unweighted():
    return RadialWeight.standard(0.0)


@pytest.fixture(scope="session")
def standard1():
    return RadialWeight.standard(1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
