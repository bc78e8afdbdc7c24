import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from measure_norms import _accel, from_matrix, from_points  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def two_point():
    def make(t):
        return from_matrix([[0.0, t], [t, 0.0]])

    return make


@pytest.fixture
def line3():
    return from_points([(0,), (1,), (2,)])


@pytest.fixture(params=["numba", "numpy"])
def backend(request, monkeypatch):
    """Run a test once per kernel flavour."""
    if request.param == "numba" and _accel.numba is None:
        pytest.skip("numba not installed")
    suffix = "_" + request.param
    for name in ("simplex_loop", "pivot", "lip_ratio", "closure", "dijkstra"):
        monkeypatch.setattr(_accel, name, getattr(_accel, name + suffix))
    monkeypatch.setattr(_accel, "BACKEND", request.param)
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
