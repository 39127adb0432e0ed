import pytest

from klv.errors import UnknownName
from klv.selftest import CHECKS, TWISTED_FOLDINGS, UNTWISTED_FOLDINGS, _bar_cases, run_selftest


@pytest.mark.parametrize("name", [name for name, _ in CHECKS])
def test_acceptance_check(name):
    report = run_selftest([name])
    assert [r.name for r in report.results] == [name]
    assert report.passed, report.results[0].violations


def test_unknown_check_name():
    with pytest.raises(UnknownName):
        run_selftest(["no-such-check"])


def test_bar_cases_cover_every_folding():
    labels = {label for label, _ in _bar_cases()}
    for type_name, sigma in TWISTED_FOLDINGS + UNTWISTED_FOLDINGS:
        assert f"hecke:{type_name}:{sigma or '1'}" in labels
