import numpy as np
import pytest
from hypothesis import settings

from orthobethe import ChainSpec, ModelParams, Q

settings.register_profile("ci", max_examples=25, deadline=None)
settings.load_profile("ci")


def spec(n, xi, chi=(), c=1):
    return ChainSpec(ModelParams(n, Q(c)), tuple(Q(x) for x in xi), tuple(Q(x) for x in chi))


def dense_labels(n):
    return list(range(-n, n + 1))


def dense_unit(n, a, b):
    """Dense object-array matrix unit e_{a,b} on one site."""
    N = 2 * n + 1
    m = np.full((N, N), Q(0), dtype=object)
    m[a + n, b + n] = Q(1)
    return m


def dense_kron(*ms):
    out = np.array([[Q(1)]], dtype=object)
    for m in ms:
        out = np.kron(out, m)
    return out


@pytest.fixture
def o3_chain():
    return spec(1, ("1/3", "-2/7"))


@pytest.fixture
def o5_chain():
    return spec(2, ("1/3",))


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
