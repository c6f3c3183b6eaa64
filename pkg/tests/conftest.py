import math

import numpy as np
import pytest

from ripple.mode_space import ModeVector
from ripple.zero_mode import build_initial

TWO_PI = 2.0 * math.pi

ACCEPTANCE_LINES = []


def naive_convolution(a, b):
    """Direct double sum over the full index set, then truncation to 0..N."""
    N = len(a) - 1

    def mode(c, k):
        return complex(c[k]) if k >= 0 else complex(c[-k]).conjugate()

    out = []
    for n in range(N + 1):
        s = 0j
        for k in range(-N, N + 1):
            if abs(n - k) <= N:
                s += mode(a, k) * mode(b, n - k)
        out.append(s)
    return np.array(out)


def random_hermitian(rng, N, scale=1.0):
    c = scale * (rng.uniform(-1, 1, N + 1) + 1j * rng.uniform(-1, 1, N + 1))
    c[0] = c[0].real
    return c


def random_admissible(rng, N, L=TWO_PI, fraction=None):
    """Random datum with sum n^2|c_n|^2 = fraction/72 and the mean resolved."""
    fraction = rng.uniform(0.05, 0.95) if fraction is None else fraction
    n = np.arange(1, N + 1)
    c = np.zeros(N + 1, dtype=complex)
    c[1:] = (rng.normal(size=N) + 1j * rng.normal(size=N)) / n ** 2
    s2 = 2 * np.sum(n ** 2 * np.abs(c[1:]) ** 2)
    c *= math.sqrt(fraction / 72 / s2)
    return build_initial(ModeVector(L, c))


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(scope="session")
def standard_datum():
    return build_initial(ModeVector.from_modes(TWO_PI, 16, {1: 0.05}))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
