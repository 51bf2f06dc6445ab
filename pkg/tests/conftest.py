import numpy as np
import pytest
from scipy.stats import poisson


def embedded_chain_probs(G: float, c: int, size: int = 600) -> np.ndarray:
    """Brute-force oracle: stationary law of X' = max(X - c, 0) + Poisson(G).

    Built from a plain truncated transition matrix (no tail model), so it
    shares nothing with the solver under test except the queue itself.
    """
    a = poisson.pmf(np.arange(size), G)
    P = np.zeros((size, size))
    for x in range(size):
        base = max(x - c, 0)
        P[x, base:] = a[: size - base]
    P /= P.sum(axis=1, keepdims=True)
    A = P.T - np.eye(size)
    A[-1, :] = 1.0
    b = np.zeros(size)
    b[-1] = 1.0
    return np.linalg.solve(A, b)


@pytest.fixture
def chain_oracle():
    return embedded_chain_probs


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
