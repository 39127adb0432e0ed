from fractions import Fraction

import pytest
import sympy

from klv.errors import NotDivisible, NotLaurent
from klv.laurent import ONE, U, U_SYMBOL, ZERO, LaurentPoly, u_pow


@pytest.mark.parametrize("text, expected", [
    ("u^2+u+1", "u^2+u+1"),
    ("u^-2-1", "-1+u^-2"),
    ("2u^3", "2u^3"),
    ("−u+1", "-u+1"),
    ("0", "0"),
    ("-1", "-1"),
    ("u^3 - u - 1", "u^3-u-1"),
])
def test_parse_gives_canonical_text(text, expected):
    assert str(LaurentPoly.parse(text)) == expected


@pytest.mark.parametrize("text", ["u^", "u u", "x+1", "1 2"])
def test_parse_rejects_garbage(text):
    with pytest.raises(ValueError):
        LaurentPoly.parse(text)


def test_zero_coefficients_are_dropped():
    p = LaurentPoly({3: 0, 1: 2, -1: 0})
    assert list(p.items()) == [(1, 2)]
    assert p.degree() == 1 == p.min_degree()
    assert not LaurentPoly({5: 0})


def test_arithmetic_with_integers():
    p = U ** 2 - 1
    assert p == LaurentPoly({2: 1, 0: -1})
    assert 1 - U == -(U - 1)
    assert 3 * U == U * 3 == LaurentPoly.monomial(1, 3)
    assert (U + 1) * (U - 1) == p
    assert LaurentPoly.const(3) == 3
    assert ZERO == 0 and ONE == 1


def test_negative_powers_only_for_units():
    assert U ** -2 == u_pow(-2)
    assert (-U) ** -1 == -u_pow(-1)
    with pytest.raises(NotDivisible):
        (2 * U) ** -1
    with pytest.raises(NotDivisible):
        (U + 1) ** -1


def test_bar_and_shift():
    p = U ** 2 + 3 * u_pow(-1)
    assert p.bar() == u_pow(-2) + 3 * U
    assert p.bar().bar() == p
    assert p.shift(-2) == ONE + 3 * u_pow(-3)


def test_exact_division():
    assert (U ** 2 - 1).exact_div(U - 1) == U + 1
    numerator = u_pow(-3) + u_pow(-2) - u_pow(-1) - 1
    assert numerator.exact_div(u_pow(-1) + 1) == u_pow(-2) - 1
    assert (6 * U).exact_div(3) == 2 * U
    assert ZERO.exact_div(U + 1) == ZERO


@pytest.mark.parametrize("numerator, divisor", [
    (U + 1, LaurentPoly.const(2)),
    (U ** 2 + 1, U + 1),
])
def test_exact_division_failures(numerator, divisor):
    with pytest.raises(NotDivisible):
        numerator.exact_div(divisor)


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        U.exact_div(ZERO)


def test_eval_int_is_exact():
    assert (u_pow(-1) + 1).eval_int(2) == Fraction(3, 2)
    assert (U ** 2).eval_int(Fraction(1, 2)) == Fraction(1, 4)
    assert (U ** 3 - U - 1).eval_int(3) == 23
    with pytest.raises(ValueError):
        U.eval_int(0)


def test_sympy_bridge():
    u = U_SYMBOL
    assert LaurentPoly.from_sympy((u ** 2 - 1) / (u - 1)) == U + 1
    assert LaurentPoly.from_sympy(u ** -2 - 1) == u_pow(-2) - 1
    assert LaurentPoly.from_sympy((U ** 2 - u_pow(-1)).to_sympy()) == U ** 2 - u_pow(-1)
    with pytest.raises(NotLaurent):
        LaurentPoly.from_sympy(1 / (u + 1))
    with pytest.raises(NotLaurent):
        LaurentPoly.from_sympy(u / 2)
    assert LaurentPoly.from_sympy(sympy.Integer(0)) == ZERO


def test_hash_matches_equality():
    assert len({LaurentPoly.parse("u+1"), U + 1, 1 + U}) == 1
    assert repr(U - 1) == "LaurentPoly('u-1')"
