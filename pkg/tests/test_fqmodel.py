import numpy as np
import pytest

from klv.errors import FqError, UnknownFamily, UnsupportedQ
from klv.fqmodel import (
    IDENTITY, action_at_q, build_scene, build_scenes, convolution_matrix, derive, interpolate_datum,
    trace_check, verify_counts,
)
from klv.laurent import U
from klv.paramdata import builtin_datum, load_datum


@pytest.mark.parametrize("family, q, points, sizes", [
    ("a2-c", 3, 28, [4, 24]),
    ("a2-c", 5, 126, [6, 120]),
    ("a2-s", 3, 28, [4, 12, 12]),
    ("a1a1-sc", 3, 10, [1, 1, 4, 4]),
    ("a1a1-sc", 5, 26, [1, 1, 12, 12]),
    ("a1a1-int", 3, 10, [2, 4, 4]),
    ("a1a1-ad", 5, 26, [2, 24]),
])
def test_scene_counts(family, q, points, sizes):
    scene = build_scene(family, q)
    assert len(scene.points) == points
    assert scene.sizes() == sizes


def test_orbit_keys():
    assert build_scene("a1a1-sc", 3).orbit_keys() == ["zero", "infinity", "open/square", "open/nonsquare"]
    assert build_scene("a1a1-int", 3).orbit_keys() == ["closed", "open/square", "open/nonsquare"]
    assert build_scene("a2-c", 3).orbit_keys() == ["closed", "open"]


@pytest.mark.parametrize("q", [2, 4, 6, 49])
def test_unsupported_q(q):
    with pytest.raises(UnsupportedQ):
        build_scene("a2-c", q)


def test_unknown_family():
    with pytest.raises(UnknownFamily):
        build_scene("b2", 3)


def test_convolution():
    scene = build_scene("a2-c", 3)
    assert action_at_q(scene).tolist() == [[3, 24], [4, 23]]
    assert np.array_equal(convolution_matrix(scene, IDENTITY), np.eye(2, dtype=np.int64))


@pytest.mark.parametrize("family", ["a2-c", "a2-s", "a1a1-sc", "a1a1-int", "a1a1-ad"])
def test_verify_counts(family):
    for scene in build_scenes(family, [3, 5]):
        report = verify_counts(scene)
        assert report.passed, report.checks
        assert len(report.checks) == 5


def test_build_scenes_keeps_order():
    assert [s.q for s in build_scenes("a1a1-sc", [7, 3, 5])] == [7, 3, 5]


@pytest.mark.parametrize("family", ["a2-c", "a2-s", "a1a1-sc"])
def test_interpolation_recovers_builtins(family):
    datum, matrix = interpolate_datum(family, [3, 5, 7, 9])
    assert datum == builtin_datum(family)
    assert matrix.index == builtin_datum(family).param_ids()


@pytest.mark.parametrize("family", ["a2-c", "a2-s", "a1a1-sc"])
def test_interpolation_is_independent_of_the_samples(family):
    low_datum, low_matrix = interpolate_datum(family, [3, 5, 7, 9])
    high_datum, high_matrix = interpolate_datum(family, [11, 13, 17, 19])
    assert high_datum == low_datum == builtin_datum(family)
    assert high_matrix == low_matrix


def test_interpolated_a2c_action():
    _, matrix = interpolate_datum("a2-c", [3, 5, 7, 9])
    assert matrix["L", "L"] == U
    assert matrix["L'", "L"] == U + 1
    assert matrix["L", "L'"] == U ** 3 - U
    assert matrix["L'", "L'"] == U ** 3 - U - 1


def test_interpolation_limits():
    with pytest.raises(FqError):
        interpolate_datum("a1a1-int", [3, 5, 7, 9])
    with pytest.raises(FqError):
        interpolate_datum("a2-c", [3, 5, 7, 3])


def test_trace_check_int(int_form):
    report = trace_check(int_form, "a1a1-int", [3, 5, 7])
    assert report.passed
    assert report.detail == "1 solution(s)"
    both = {"open/square": 1, "open/nonsquare": 1}
    assert report.dictionary == {"L1": {"closed": 1}, "L2": {}, "L'1": both, "L'2": both}


def test_trace_check_ad(ad):
    report = trace_check(ad, "a1a1-ad", [3, 5, 7])
    assert report.passed
    assert report.dictionary == {"L": {"closed": 1}, "L'1": {"open": 1}, "L'2": {"open": 1}}


def test_trace_check_sc(sc):
    report = trace_check(sc, "a1a1-sc", [3, 5])
    assert report.passed
    assert report.dictionary["L''"] == {"open/square": 1, "open/nonsquare": -1}
    assert report.detail == "1 solution(s)"


def test_trace_check_mismatch(a2c, sc):
    assert not trace_check(a2c, "a1a1-sc", [3]).passed
    assert not trace_check(sc, "a1a1-int", [3, 5]).passed


def test_derive_writes_a_valid_datum(tmp_path):
    report = derive("a2-c", [3, 5, 7, 9], tmp_path / "a2-c.json")
    assert report.passed
    assert report.validation.passed
    assert report.matrix["L"] == {"L": "u", "L'": "u+1"}
    assert load_datum(report.output) == builtin_datum("a2-c")
