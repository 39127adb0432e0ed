import pytest

from config.settings import settings
from klv.coxeter import (
    WeylGroup, build_weyl, cartan_matrix, folded_system, parse_sigma, sigma_text,
)
from klv.errors import GroupError, InvalidSigma, NotFiniteType, UnknownType


@pytest.mark.parametrize("name, order, nu", [
    ("A1", 2, 1), ("A1xA1", 4, 2), ("A2", 6, 3), ("B2", 8, 4), ("G2", 12, 6), ("A3", 24, 6),
])
def test_group_orders(name, order, nu):
    W = build_weyl(cartan_matrix(name))
    assert len(W.elements) == order
    assert W.nu == nu
    assert W.length(W.longest) == nu


def test_cartan_matrix_of_products():
    assert cartan_matrix("A1xA1") == ((2, 0), (0, 2))
    assert cartan_matrix("A2") == ((2, -1), (-1, 2))


@pytest.mark.parametrize("name", ["Q3", "A0", "E6", "A1xZ2", ""])
def test_unknown_types(name):
    with pytest.raises(UnknownType):
        cartan_matrix(name)


@pytest.mark.parametrize("cartan", [
    [[2, -2], [-2, 2]],
    [[2, 1], [1, 2]],
    [[2, -1], [0, 2]],
])
def test_not_finite_type(cartan):
    with pytest.raises(NotFiniteType):
        WeylGroup(cartan)


def test_group_order_limit(monkeypatch):
    monkeypatch.setattr(settings.group, "max_group_order", 10)
    with pytest.raises(GroupError):
        build_weyl(cartan_matrix("A3"))


def test_names_use_first_reduced_word():
    W = build_weyl(cartan_matrix("A3"))
    names = [W.name(w) for w in W.elements]
    assert names[0] == "1"
    assert names[1:4] == ["s1", "s2", "s3"]
    assert "s2s1s3s2" in names
    assert "s3s1" not in names
    assert W.name(W.from_word([2, 0])) == "s1s3"


def test_bruhat_order():
    W = build_weyl(cartan_matrix("A2"))
    s1, s2 = W.simple
    s1s2 = W.mul(s1, s2)
    assert W.bruhat_leq(W.identity, W.longest)
    assert W.bruhat_leq(s1, s1s2)
    assert not W.bruhat_leq(s1s2, s1)
    assert not W.bruhat_leq(W.mul(s2, s1), s1s2)


def test_parse_sigma():
    assert parse_sigma("(1 3)", 3) == (2, 1, 0)
    assert parse_sigma(None, 2) == (0, 1)
    assert parse_sigma("(1 2)(3 4)", 4) == (1, 0, 3, 2)
    assert sigma_text((2, 1, 0)) == "(1 3)"
    assert sigma_text((0, 1)) == "1"


@pytest.mark.parametrize("text", ["(1 4)", "1 3", "(1 1)", "(1 2)(2 3)", "(a b)"])
def test_parse_sigma_errors(text):
    with pytest.raises(InvalidSigma):
        parse_sigma(text, 3)


def test_sigma_must_preserve_cartan():
    with pytest.raises(InvalidSigma):
        folded_system("A3", "(1 2)")
    with pytest.raises(InvalidSigma):
        folded_system("B2", "(1 2)")


def test_fold_a3(a3_twisted):
    F = a3_twisted
    assert F.generators == ["s1s3", "s2"]
    assert F.m == {"s1s3": 2, "s2": 1}
    assert len(F.elements) == 8
    assert F.name(F.w_omega["s1s3"]) == "s1s3"
    top = F.base.longest
    assert F.apply_sigma(top) == top
    assert sum(F.m[g] for g in F.folded_reduced_word(top)) == F.length(top)


@pytest.mark.parametrize("type_name, generator, m, order", [
    ("A1xA1", "s1s2", 2, 2),
    ("A2", "s1s2", 3, 2),
])
def test_rank_one_foldings(type_name, generator, m, order):
    F = folded_system(type_name, "(1 2)")
    assert F.generators == [generator]
    assert F.m[generator] == m
    assert len(F.elements) == order
    assert F.folded_reduced_word(F.base.longest) == [generator]


def test_element_lookup(a2_twisted):
    assert a2_twisted.name(a2_twisted.element("s1s2s1")) == "s1s2s1"
    with pytest.raises(GroupError):
        a2_twisted.element("s1")


FOLDINGS = [("A2", None), ("B2", None), ("A3", None), ("A1xA1", "(1 2)"), ("A2", "(1 2)"), ("A3", "(1 3)")]


@pytest.mark.parametrize("name, rank", [("A1", 1), ("A2", 2), ("B2", 2), ("A3", 3)])
def test_untwisted_fold_keeps_every_generator(name, rank):
    F = folded_system(name)
    assert F.generators == [f"s{i}" for i in range(1, rank + 1)]
    assert set(F.m.values()) == {1}
    assert F.elements == F.base.elements


@pytest.mark.parametrize("name, sigma", FOLDINGS)
def test_folded_reduced_words_multiply_back(name, sigma):
    F = folded_system(name, sigma)
    for w in F.elements:
        word = F.folded_reduced_word(w)
        product = F.base.identity
        for g in word:
            product = F.mul(product, F.w_omega[g])
        assert product == w
        assert sum(F.m[g] for g in word) == F.length(w)


@pytest.mark.parametrize("name, sigma", FOLDINGS)
def test_generators_change_length_by_their_type(name, sigma):
    F = folded_system(name, sigma)
    fixed = set(F.elements)
    for g in F.generators:
        for w in F.elements:
            gw = F.generator_acts(g, w)
            assert gw in fixed
            assert F.length(gw) - F.length(w) in (F.m[g], -F.m[g])


@pytest.mark.parametrize("name, sigma", FOLDINGS)
def test_fixed_subgroup_is_closed(name, sigma):
    F = folded_system(name, sigma)
    fixed = set(F.elements)
    assert F.base.identity in fixed
    for a in F.elements:
        assert F.apply_sigma(a) == a
        assert F.base.inverse(a) in fixed
        for b in F.elements:
            assert F.mul(a, b) in fixed


@pytest.mark.parametrize("name", ["A2", "B2", "A3"])
def test_bruhat_is_a_partial_order(name):
    W = build_weyl(cartan_matrix(name))
    elements = W.elements
    below = {w: {y for y in elements if W.bruhat_leq(y, w)} for w in elements}
    for w in elements:
        assert w in below[w]
        for y in below[w]:
            assert y == w or W.length(y) < W.length(w)
            assert y == w or w not in below[y]
            assert below[y] <= below[w]


@pytest.mark.parametrize("name", ["A2", "B2", "A3"])
def test_longest_element_is_the_unique_maximum(name):
    W = build_weyl(cartan_matrix(name))
    tops = [w for w in W.elements if all(W.bruhat_leq(y, w) for y in W.elements)]
    assert tops == [W.longest]
