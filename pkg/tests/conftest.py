import numpy as np
import pytest

from adaptsweep import make_grid, make_synthetic


@pytest.fixture(scope="session")
def grid400():
    return make_grid(1e9, 10e9, 400)


@pytest.fixture(scope="session")
def order8_2x2():
    return make_synthetic(0, 8, 2, 2)


def first_order(s):
    """Scalar ``1/(s+1)`` as an ``(N, 1, 1)`` array."""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    return (1.0 / (s + 1.0))[:, None, None]


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
