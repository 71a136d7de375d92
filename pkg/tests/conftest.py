import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from comonorisk.distributions import DiscretePosition

settings.register_profile(
    "repo",
    derandomize=True,
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

payoff = st.integers(-50, 50).map(float) | st.floats(-100, 100, allow_nan=False, allow_infinity=False)


@st.composite
def positions(draw, min_atoms=1, max_atoms=6, integer=False):
    n = draw(st.integers(min_atoms, max_atoms))
    elem = st.integers(-20, 20).map(float) if integer else payoff
    values = draw(st.lists(elem, min_size=n, max_size=n))
    weights = draw(st.lists(st.integers(1, 20), min_size=n, max_size=n))
    w = np.array(weights, float)
    return DiscretePosition(values, w / w.sum())


@st.composite
def comonotone_vectors(draw, n_states=None):
    """Two payoff vectors on equiprobable states, both nondecreasing in a shared order."""
    n = n_states or draw(st.integers(2, 6))
    a = sorted(draw(st.lists(st.integers(-10, 10), min_size=n, max_size=n)))
    b = sorted(draw(st.lists(st.integers(-10, 10), min_size=n, max_size=n)))
    perm = draw(st.permutations(range(n)))
    x = np.empty(n)
    y = np.empty(n)
    x[list(perm)] = a
    y[list(perm)] = b
    return x, y


levels = st.floats(0.0, 1.0, allow_nan=False)
interior_levels = st.floats(0.01, 0.99, allow_nan=False)


# Acceptance criteria report one PASS/FAIL line each; they are echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
