import numpy as np
import pytest
from hypothesis import settings

from stable_clt_lab.grid import GridSpec
from stable_clt_lab.sublinear import LawFamily

settings.register_profile("lab", deadline=None, max_examples=40)
settings.load_profile("lab")


@pytest.fixture(scope="session")
def grid():
    return GridSpec.from_spacing(8, 1 / 64)


@pytest.fixture(scope="session")
def coarse_grid():
    return GridSpec.from_spacing(8, 1 / 16)


@pytest.fixture(scope="session")
def singleton():
    return LawFamily(0.25, 0.25, 0.5)


@pytest.fixture(scope="session")
def band():
    return LawFamily(0.25, 0.5, 0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES
    if LINES:
        terminalreporter.section("acceptance criteria")
        for num in sorted(LINES):
            terminalreporter.write_line(LINES[num])
