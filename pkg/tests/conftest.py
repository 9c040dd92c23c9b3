import math

import numpy as np
import pytest

ALPHAS = (0.0, math.pi / 8, math.pi / 4, 3 * math.pi / 8, math.pi / 2)
C_GRID = (0.0, 0.2, 0.4, 0.6, 0.8, 0.99)


def brute_autocorr(alpha: float, x: float, n: int = 4096) -> float:
    """Trapezoid quadrature of int Delta(y) Delta(y + x) dy straight from the PRC formula."""
    y = np.arange(n) * (2 * np.pi / n)
    d0 = -np.sin(y + alpha) + np.sin(alpha)
    dx = -np.sin(y + x + alpha) + np.sin(alpha)
    return float(np.sum(d0 * dx) * 2 * np.pi / n)


@pytest.fixture
def brute_h():
    return brute_autocorr


ACCEPTANCE_LOG: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LOG:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LOG:
            terminalreporter.write_line(line)
