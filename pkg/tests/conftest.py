import numpy as np
import pytest
from hypothesis import settings

from vlineq.lattice import GridConfig

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def coarse():
    """A cheaper grid for tests that only need grid_tol-level agreement."""
    return GridConfig(theta_points=512, lambda_points=256)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
