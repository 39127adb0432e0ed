import logging

import pytest

from klv.barcanon import (
    bar_matrix, bar_matrix_oracle, canonical_basis, check_bar_matrix, check_canonical, klv_table,
)
from klv.coxeter import folded_system
from klv.errors import Inconsistent, NotSelfDualConsistent
from klv.hecke import hecke_kl
from klv.laurent import U, u_pow
from klv.matrix import MElt, PolyMatrix
from klv.paramdata import hecke_case_datum, validate_datum
from models.datum import LeviSubset

DROP = u_pow(-2) - 1


def test_bar_matrix_a2c(a2c):
    expected = PolyMatrix(["L", "L'"], {("L", "L"): 1, ("L", "L'"): DROP, ("L'", "L'"): u_pow(-2)})
    assert bar_matrix(a2c) == expected


def test_bar_matrix_a2s(a2s):
    R = bar_matrix(a2s)
    assert R["L", "L'"] == DROP
    assert R["L''", "L''"] == u_pow(-2)
    assert R.column("L''") == MElt({"L''": u_pow(-2)})


def test_bar_matrix_sc(sc):
    R = bar_matrix(sc)
    assert R["L1", "L'"] == DROP
    assert R["L2", "L'"] == DROP
    assert R["L1", "L''"] == 0
    assert R["L1", "L1"] == 1


def test_bar_matrix_int_uses_the_joint_solve(int_form, caplog):
    with caplog.at_level(logging.WARNING, logger="klv.barcanon"):
        R = bar_matrix(int_form)
    assert "without declared Levi data" in caplog.text
    assert R["L1", "L'1"] == DROP and R["L2", "L'1"] == DROP
    assert R["L1", "L'2"] == DROP and R["L2", "L'2"] == -DROP
    assert R["L'1", "L'1"] == u_pow(-2)
    assert R["L'1", "L'2"] == 0


def test_bar_matrix_ad(ad):
    R = bar_matrix(ad)
    assert R["L", "L'1"] == DROP
    assert R["L", "L'2"] == DROP


def test_levi_data_gives_the_same_matrix():
    d = hecke_case_datum(folded_system("A1xA1"))
    with_levi = d.model_copy(update={"levi_subsets": [LeviSubset(gens=["s1"], params=["1", "s1"])]})
    assert validate_datum(with_levi).passed
    assert bar_matrix(with_levi) == bar_matrix(d)


def test_levi_data_over_an_outside_descent():
    d = hecke_case_datum(folded_system("A1xA1"))
    with_levi = d.model_copy(update={"levi_subsets": [LeviSubset(gens=["s1"], params=["s2", "s1s2"])]})
    report = validate_datum(with_levi)
    assert {v.rule for v in report.violations} == {"levi-closure"}
    assert {v.where for v in report.violations} == {"levi[0]:s2@s2", "levi[0]:s2@s1s2"}
    assert bar_matrix(d).column("s2") == MElt({"s2": u_pow(-1), "1": u_pow(-1) - 1})
    with pytest.raises(Inconsistent):
        bar_matrix(with_levi)


def test_oracle_agrees_with_recursion(any_builtin):
    assert bar_matrix_oracle(any_builtin) == bar_matrix(any_builtin)


@pytest.mark.parametrize("type_name, sigma", [("A2", "(1 2)"), ("A3", "(1 3)"), ("B2", None), ("A3", None)])
def test_oracle_agrees_on_regular_modules(type_name, sigma):
    d = hecke_case_datum(folded_system(type_name, sigma))
    assert bar_matrix_oracle(d) == bar_matrix(d)


def test_bar_matrix_certificate(any_builtin):
    assert check_bar_matrix(any_builtin, bar_matrix(any_builtin)).passed


def test_certificate_rejects_a_wrong_matrix(a2c):
    R = bar_matrix(a2c)
    R["L", "L'"] = u_pow(-2)
    rules = {v.rule for v in check_bar_matrix(a2c, R).violations}
    assert {"commutation", "involution"} <= rules
    R["L'", "L"] = 1
    assert "triangular" in {v.rule for v in check_bar_matrix(a2c, R).violations}


def test_klv_tables(a2c, sc, int_form, ad):
    assert klv_table(a2c).to_tsv() == "param\tL\tL'\nL\t1\t1\nL'\t0\t1\n"
    P = klv_table(sc)
    assert P["L1", "L'"] == 1 and P["L2", "L'"] == 1 and P["L1", "L''"] == 0
    P = klv_table(int_form)
    assert [P[row, "L'1"] for row in ("L1", "L2")] == [1, 1]
    assert [P[row, "L'2"] for row in ("L1", "L2")] == [1, -1]
    P = klv_table(ad)
    assert P["L", "L'1"] == 1 and P["L", "L'2"] == 1


def test_canonical_certificate(any_builtin):
    R = bar_matrix(any_builtin)
    P = canonical_basis(R, any_builtin.lengths())
    result = check_canonical(R, P, any_builtin.lengths())
    assert result.passed, result.violations
    assert all(value.is_polynomial() for _, _, value in P.entries())


def test_canonical_certificate_rejects_a_wrong_table(a2c):
    R = bar_matrix(a2c)
    P = klv_table(a2c)
    P["L", "L'"] = U
    rules = {v.rule for v in check_canonical(R, P, a2c.lengths()).violations}
    assert rules == {"degree-bound", "self-duality"}


def test_canonical_basis_needs_a_self_dual_decomposition():
    R = PolyMatrix(["L", "L'"], {("L", "L"): 1, ("L", "L'"): u_pow(-2), ("L'", "L'"): u_pow(-2)})
    with pytest.raises(NotSelfDualConsistent):
        canonical_basis(R, {"L": 0, "L'": 2})


def test_regular_module_matches_hecke_table(a2_twisted, a3_twisted):
    for F in (a2_twisted, a3_twisted):
        assert klv_table(hecke_case_datum(F)) == hecke_kl(F)
