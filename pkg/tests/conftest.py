import sys

import numpy as np
import pytest

from flexneedlet import PowerSpectrum, WindowFamily, make_geometric


@pytest.fixture(scope="session")
def w2():
    """Geometric B=2 family with bands 0..5 (S up to 64)."""
    return WindowFamily(make_geometric(2.0, 6))


@pytest.fixture(scope="session")
def cubic():
    return PowerSpectrum.power_law(3.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)



def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
