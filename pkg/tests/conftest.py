import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_matrix(rng, k, l):
    """Random (k, l)-intersection matrix as a sum of l random permutation matrices."""
    grid = [[0] * k for _ in range(k)]
    for _ in range(l):
        p = rng.permutation(k)
        for i in range(k):
            grid[i][p[i]] += 1
    return grid


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
