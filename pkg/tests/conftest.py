import math

import numpy as np
import pytest
from hypothesis import strategies as st

from squeezed_atom.master import max_squeeze, validate_params

SQRT2 = math.sqrt(2.0)
SQRT30 = math.sqrt(30.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@st.composite
def reservoir(draw, max_n=8.0):
    """Valid (gamma, N, M) with M anywhere in [0, sqrt(N(N+1))]."""
    gamma = draw(st.floats(0.2, 3.0))
    N = draw(st.floats(0.0, max_n))
    frac = draw(st.floats(0.0, 1.0))
    return validate_params(gamma, N, frac * max_squeeze(N))


@st.composite
def density(draw):
    parts = draw(st.lists(st.floats(-1, 1), min_size=8, max_size=8))
    g = np.array(parts[:4]).reshape(2, 2) + 1j * np.array(parts[4:]).reshape(2, 2)
    rho = g @ g.conj().T + 1e-3 * np.eye(2)
    return rho / np.trace(rho).real


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
