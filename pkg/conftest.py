import pytest

from paramlp.services.arith import Arith
from paramlp.services.generators import fixture
from paramlp.services.lp import build_parametric_pair, validate_standard_form


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: HiGHS grid oracle and larger Klee–Minty cubes")


@pytest.fixture
def exact():
    return Arith.exact()


@pytest.fixture
def floating():
    return Arith.floating()


@pytest.fixture
def t1_pair():
    return fixture("T1")


@pytest.fixture
def t1_lp(exact):
    """The T1 LP alone (min 2x1 + x2 over x1 + x2 + x3 = 3)."""
    return validate_standard_form([[1, 1, 1]], [3], [2, 1, 0], name="T1", arith=exact)


@pytest.fixture
def make_pair(exact):
    def _make(A, b, c, d, B, name="pair"):
        lp = validate_standard_form(A, b, c, name=name, arith=exact)
        return build_parametric_pair(lp, d, B)

    return _make
