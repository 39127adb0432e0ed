from fractions import Fraction

import pytest

from klv.laurent import U, u_pow
from klv.matrix import MElt, PolyMatrix


def _upper():
    return PolyMatrix(["L", "L'"], {("L", "L"): 1, ("L", "L'"): 1, ("L'", "L'"): 1})


def test_module_element_arithmetic():
    a = MElt({"L": U, "L'": 0})
    b = MElt.basis("L'")
    assert a.support() == ["L"]
    assert (a + b)["L'"] == 1
    assert (a - a) == MElt()
    assert not (a - a)
    assert a.scale(U).bar() == MElt({"L": u_pow(-2)})
    assert (a + b.scale(U + 1)).lines(["L", "L'"]) == ["L\tu", "L'\tu+1"]


def test_identity_and_product():
    M = PolyMatrix(["a", "b"], {("a", "a"): U, ("b", "a"): U + 1, ("a", "b"): U ** 3 - U, ("b", "b"): U ** 3 - U - 1})
    I = PolyMatrix.identity(["a", "b"])
    assert I @ M == M == M @ I
    square = M @ M
    assert square == M.scale(U ** 3 - 1) + I.scale(U ** 3)


def test_apply_matches_column():
    M = _upper()
    assert M.apply(MElt.basis("L'")) == M.column("L'")
    assert M.row("L") == MElt({"L": 1, "L'": 1})


def test_from_columns_and_restrict():
    M = PolyMatrix.from_columns(["x", "y", "z"], {"y": MElt({"x": U, "y": 1}), "z": MElt.basis("x")})
    assert M["x", "y"] == U
    small = M.restrict(["x", "y"])
    assert small.index == ["x", "y"]
    assert small["x", "y"] == U
    assert "z" not in small


def test_setting_zero_removes_entry():
    M = _upper()
    M["L", "L'"] = 0
    assert M == PolyMatrix.identity(["L", "L'"])


def test_unknown_index_is_rejected():
    M = _upper()
    with pytest.raises(KeyError):
        M["L", "M"] = 1
    with pytest.raises(ValueError):
        PolyMatrix(["a", "a"])
    with pytest.raises(ValueError):
        M @ PolyMatrix.identity(["a", "b"])


def test_bar_and_evaluate():
    M = PolyMatrix(["L", "L'"], {("L", "L"): 1, ("L", "L'"): u_pow(-2) - 1, ("L'", "L'"): u_pow(-2)})
    assert M.bar()["L", "L'"] == U ** 2 - 1
    assert M.evaluate(2) == [[1, Fraction(-3, 4)], [0, Fraction(1, 4)]]


def test_tsv_output():
    assert _upper().to_tsv() == "param\tL\tL'\nL\t1\t1\nL'\t0\t1\n"
    frame = _upper().to_frame()
    assert frame.index.name == "param"
    assert frame.loc["L'", "L"] == "0"
