import math

import pytest

from robinmag import SolverConfig

B0_GOLDEN = 1.6746516455  # lambda_0 = lambda_1 crossing; Galerkin and FD oracle agree to 2e-9
LAMBDA1_AT_1_9 = 0.628551509  # Galerkin 0.62855150893, FD oracle 0.62855150959


@pytest.fixture(scope="session")
def config():
    return SolverConfig()


def frange(lo, hi, step):
    n = math.floor((hi - lo) / step + 0.5)
    return [round(lo + k * step, 12) for k in range(n + 1)]


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
