import numpy as np
import pytest

from potential_encoding import NAI, PotentialGrid, ShiftedExp, sample_model

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def nai4() -> PotentialGrid:
    return sample_model(NAI, 4, 0.0, 10.0)


@pytest.fixture
def shifted4() -> PotentialGrid:
    return sample_model(ShiftedExp(), 4, 0.0, 10.0)


def random_grid(rng, n, low=-1.0, high=1.0) -> PotentialGrid:
    return PotentialGrid(n=n, x_min=0.0, x_max=10.0, values=rng.uniform(low, high, 2**n))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
