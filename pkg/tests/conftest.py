import numpy as np
import pytest

from triplepower.verify import make_rng

# Filled by test_acceptance; printed once at the end of the session.
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return make_rng(20240601)


def grid_argmax(fun, lo, hi, points=200_001):
    """Brute-force maximiser of ``fun`` on a linear grid."""
    u = np.linspace(lo, hi, points)
    v = fun(u)
    i = int(np.argmax(v))
    return float(u[i]), float(v[i])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
