import numpy as np
import pytest
from hypothesis import settings

from shiftgain import ControlSystem

# numerical properties: reproducible examples, no wall-clock deadline
settings.register_profile("default", derandomize=True, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def scalar_system():
    return ControlSystem([[2.0]], [[1.0]])


@pytest.fixture
def double_integrator():
    return ControlSystem([[0.0, 1.0], [0.0, 0.0]], [[0.0], [1.0]])


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance_report(request):
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])
    return lines.append


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
