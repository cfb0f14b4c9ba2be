import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from votecut.fixtures import example2_election
from votecut.profile import Election, WeightedMajorityGraph

settings.register_profile("default", deadline=None, max_examples=100,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def ex2():
    return example2_election()


@st.composite
def wmgs(draw, min_m=2, max_m=5, low=-10, high=10, even=False):
    m = draw(st.integers(min_m, max_m))
    names = [f"c{i}" for i in range(m)]
    M = np.zeros((m, m), dtype=np.int64)
    for i, j in itertools.combinations(range(m), 2):
        w = draw(st.integers(low, high))
        if even:
            w -= w % 2
        M[i, j], M[j, i] = w, -w
    return WeightedMajorityGraph(names, M)


@st.composite
def elections(draw, min_m=1, max_m=5, min_n=0, max_n=9, prefix="c"):
    m = draw(st.integers(min_m, max_m))
    names = [f"{prefix}{i}" for i in range(m)]
    n = draw(st.integers(min_n, max_n))
    ballots = tuple((tuple(draw(st.permutations(names))), 1) for _ in range(n))
    return Election(tuple(names), ballots)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
