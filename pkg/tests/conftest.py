"""
Shared fixtures: built-in data and small folded systems.
"""
import pytest

from klv.coxeter import folded_system
from klv.laurent import LaurentPoly
from klv.paramdata import BUILTIN_NAMES, builtin_datum


def lp(text: str) -> LaurentPoly:
    return LaurentPoly.parse(text)


@pytest.fixture(params=BUILTIN_NAMES)
def any_builtin(request):
    return builtin_datum(request.param)


@pytest.fixture
def a2c():
    return builtin_datum("a2-c")


@pytest.fixture
def a2s():
    return builtin_datum("a2-s")


@pytest.fixture
def sc():
    return builtin_datum("a1a1-sc")


@pytest.fixture
def int_form():
    return builtin_datum("a1a1-int")


@pytest.fixture
def ad():
    return builtin_datum("a1a1-ad")


@pytest.fixture(scope="session")
def a3():
    return folded_system("A3")


@pytest.fixture(scope="session")
def a3_twisted():
    return folded_system("A3", "(1 3)")


@pytest.fixture(scope="session")
def a2_twisted():
    return folded_system("A2", "(1 2)")
