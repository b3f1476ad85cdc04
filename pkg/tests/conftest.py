import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from wavegraph.suites import random_weighted_graph

settings.register_profile(
    "default", max_examples=60, deadline=None, derandomize=True, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def graphs(draw, max_vertices=15):
    """Random connected weighted graph from a drawn numpy seed."""
    seed = draw(st.integers(0, 2**32 - 1))
    return random_weighted_graph(np.random.default_rng(seed), max_vertices=max_vertices)


# filled by test_acceptance.report; shown after the run even when output is captured
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
