import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from steerport.states import RandomSource, random_density, random_three_qubit, random_x_state

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)
ranks = st.integers(min_value=1, max_value=4)


@st.composite
def densities(draw):
    return random_density(draw(ranks), RandomSource(draw(seeds)))


@st.composite
def x_states(draw):
    return random_x_state(RandomSource(draw(seeds)))


@st.composite
def three_qubit(draw):
    return random_three_qubit(RandomSource(draw(seeds)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# acceptance lines collected by test_acceptance and echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
