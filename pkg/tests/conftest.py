import numpy as np
import pytest
from hypothesis import settings

from pisometry.partial_isometry import validate

settings.register_profile("repro", derandomize=True, max_examples=30, deadline=None)
settings.load_profile("repro")


def jordan_pair():
    """The two nilpotent 4x4 partial isometries with Jordan types (3, 1) and (2, 2)."""
    A = np.zeros((4, 4))
    A[0, 1] = A[1, 2] = 1
    B = np.zeros((4, 4))
    B[0, 1] = B[2, 3] = 1
    return A, B


@pytest.fixture
def jordan():
    A, B = jordan_pair()
    return validate(A), validate(B)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def circle_quadrature(f, g, points=4096):
    """Trapezoid rule for the H^2 inner product; exponentially accurate for
    functions analytic across the circle."""
    z = np.exp(2j * np.pi * np.arange(points) / points)
    return complex(np.mean(f(z) * np.conj(g(z))))


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.summary_lines():
        terminalreporter.write_line(line)
