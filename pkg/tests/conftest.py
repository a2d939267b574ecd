import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_sl(rng, n, scale=1.0):
    """Random matrix of determinant 1 with moderate condition number."""
    while True:
        g = np.eye(n) + scale * rng.standard_normal((n, n))
        d = np.linalg.det(g)
        if d > 0.1:
            return g / d ** (1.0 / n)


# acceptance lines, printed once at the end of the session
ACCEPTANCE = {}


def record(number, title, ok, detail=""):
    line = f"[{number:02d}] {'PASS' if ok else 'FAIL'}  {title}" + (f"  ({detail})" if detail else "")
    ACCEPTANCE[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
