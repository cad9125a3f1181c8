import numpy as np
import pytest
from hypothesis import settings

from ordqr.model import OrdinalDataset
from ordqr.simulate import DgpSpec, generate_or1_data, generate_or2_data

settings.register_profile("ordqr", max_examples=60, deadline=None)
settings.load_profile("ordqr")

# filled by tests/test_acceptance.py, echoed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_or1():
    return generate_or1_data(DgpSpec(120, (-4.0, 5.0, 6.0), (0.0, 2.0, 4.0), 0.25, seed=11))


@pytest.fixture(scope="session")
def small_or2():
    return generate_or2_data(DgpSpec(120, (-4.0, 6.0, 5.0), (0.0, 3.0), 0.25, seed=11))


@pytest.fixture
def toy_dataset():
    y = np.array([1, 2, 3, 3, 2, 1, 3])
    X = np.column_stack([np.ones(7), np.linspace(-1, 1, 7)])
    return OrdinalDataset(y, X, ["intercept", "x"])


@pytest.fixture(scope="session")
def short_fit_or1(small_or1):
    from ordqr.or1 import Or1Config, fit_or1
    return fit_or1(small_or1, config=Or1Config(burn=200, mcmc=800, seed=3))


@pytest.fixture(scope="session")
def short_fit_or2(small_or2):
    from ordqr.or2 import Or2Config, fit_or2
    return fit_or2(small_or2, config=Or2Config(burn=200, mcmc=800, seed=3))
