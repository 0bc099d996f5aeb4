import numpy as np
import pytest

from robustguard import instances as inst
from robustguard.params import RobustParams

FIXTURES = {
    "square": inst.unit_square,
    "lshape": inst.l_shape,
    "hole": inst.square_with_hole,
    "corridor": lambda: inst.corridor(20, 1),
    "random": lambda: inst.random_polygon(20, 1, seed=7),
}


@pytest.fixture(params=sorted(FIXTURES))
def fixture_polygon(request):
    return request.param, FIXTURES[request.param]()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def square():
    return inst.unit_square()


@pytest.fixture
def lshape():
    return inst.l_shape()


@pytest.fixture
def strip():
    return inst.corridor(10, 1)


@pytest.fixture
def params():
    return RobustParams(0.5)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(lines):
        terminalreporter.write_line(lines[n])
