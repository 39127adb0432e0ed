import pytest

from klv.errors import DanglingReference, MissingStatus
from klv.laurent import LaurentPoly, U
from klv.matrix import MElt
from klv.modact import (
    act_word, eigen_rank_check, eigenvector_check, generator_blocks, generator_matrix, module_blocks,
    quadratic_check, status_column,
)
from klv.paramdata import builtin_datum, datum_from_dict
from models.datum import GeneratorStatus


def _broken_a2():
    return datum_from_dict({
        "name": "broken",
        "generators": [{"id": "g", "m": 3}],
        "parameters": [{"id": "L", "length": 0}, {"id": "L'", "length": 2}],
        "statuses": [
            {"gen": "g", "param": "L", "kind": "3I+", "cayley": ["L'"]},
            {"gen": "g", "param": "L'", "kind": "3RNP+"},
        ],
    })


@pytest.mark.parametrize("status, expected", [
    (dict(kind="2C+", cross="y"), {"y": "1"}),
    (dict(kind="2C-", cross="y"), {"y": "u^2", "x": "u^2-1"}),
    (dict(kind="3SR-", cayley=["y"]), {"y": "u^3-u", "x": "u^3-u-1"}),
    (dict(kind="2R22-", cross="z", cayley=["y"]), {"y": "u^2-1", "x": "u^2-1", "z": "-1"}),
    (dict(kind="2I12+", cayley=["y", "z"], role="minus"), {"x": "1", "y": "1", "z": "-1"}),
    (dict(kind="1RNP+"), {"x": "-1"}),
    (dict(kind="2IC-"), {"x": "u^2"}),
])
def test_status_columns(status, expected):
    column = status_column(GeneratorStatus(gen="g", param="x", **status))
    assert column == MElt({key: LaurentPoly.parse(text) for key, text in expected.items()})


def test_generator_matrix_a2c(a2c):
    M = generator_matrix(a2c, "g")
    assert M["L", "L"] == U
    assert M["L'", "L"] == U + 1
    assert M["L", "L'"] == U ** 3 - U
    assert M["L'", "L'"] == U ** 3 - U - 1


def test_generator_matrix_errors():
    data = {
        "name": "bad",
        "generators": [{"id": "s", "m": 1}],
        "parameters": [{"id": "a", "length": 0}],
        "statuses": [{"gen": "s", "param": "a", "kind": "1C+", "cross": "b"}],
    }
    with pytest.raises(DanglingReference):
        generator_matrix(datum_from_dict(data), "s")
    data["statuses"] = []
    with pytest.raises(MissingStatus):
        generator_matrix(datum_from_dict(data), "s")


def test_act_word(a2c):
    once = act_word(a2c, ["g"], MElt.basis("L"))
    assert once.lines(a2c.param_ids()) == ["L\tu", "L'\tu+1"]
    twice = act_word(a2c, ["g", "g"], MElt.basis("L"))
    assert twice.lines(a2c.param_ids()) == ["L\tu^4+u^3-u", "L'\tu^4+u^3-u-1"]


def test_act_word_applies_last_letter_first():
    d = builtin_datum("hecke:A2")
    assert act_word(d, ["s1", "s2"], MElt.basis("1")) == MElt.basis("s1s2")
    assert act_word(d, ["s2", "s1"], MElt.basis("1")) == MElt.basis("s2s1")


def test_blocks(sc):
    assert module_blocks(sc) == [["L1", "L2", "L'"], ["L''"]]
    assert generator_blocks(sc, "g") == [["L1", "L2", "L'"], ["L''"]]


def test_builtins_satisfy_the_quadratic_relation(any_builtin):
    assert quadratic_check(any_builtin).passed
    assert eigen_rank_check(any_builtin).passed
    assert eigenvector_check(any_builtin).passed


def test_quadratic_failure_is_reported():
    result = quadratic_check(_broken_a2())
    assert not result.passed
    assert {v.rule for v in result.violations} == {"quadratic"}
    assert not eigen_rank_check(_broken_a2()).passed
