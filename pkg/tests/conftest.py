import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from gooddeal.cases import scaled_half, table_measure, two_state_illiquid
from gooddeal.spaces import SampleSpace

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def coin():
    return SampleSpace.uniform(2)


@pytest.fixture(scope="session")
def illiquid():
    return two_state_illiquid()


@pytest.fixture(scope="session")
def half():
    return scaled_half()


@pytest.fixture(scope="session")
def kinked():
    return table_measure()


def grid_oracle_superhedge(claims_fn, alphas, x):
    """min over a parameter grid of max_k -(m(a) + x)_k: brute-force superhedging cost."""
    M = claims_fn(alphas)
    return float(np.min(np.max(-(M + x), axis=1)))


CRITERIA = {}


@pytest.fixture
def criterion():
    """record(k, ok, detail): stores one acceptance line, printed in the terminal summary."""

    def record(k, ok, detail=""):
        CRITERIA[k] = (bool(ok), detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        ok, detail = CRITERIA[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
settings.register_profile("stress", deadline=2000, max_examples=400,
                          suppress_health_check=[HealthCheck.too_slow])
