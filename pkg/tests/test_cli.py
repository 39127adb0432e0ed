import json

import pytest

from app import EXIT_FAILURE, EXIT_OK, main


def _run(capsys, *argv):
    status = main(list(argv))
    captured = capsys.readouterr()
    return status, captured.out, captured.err


def test_klv_table(capsys):
    status, out, _ = _run(capsys, "klv", "--datum", "a2-c", "--check")
    assert status == EXIT_OK
    assert out == "param\tL\tL'\nL\t1\t1\nL'\t0\t1\n"


def test_output_is_deterministic(capsys):
    first = _run(capsys, "klv", "--datum", "a1a1-int")[1]
    second = _run(capsys, "klv", "--datum", "a1a1-int")[1]
    assert first == second
    assert first.splitlines()[0] == "param\tL1\tL2\tL'1\tL'2"


def test_hecke_kl(capsys):
    status, out, _ = _run(capsys, "hecke-kl", "--type", "A2", "--sigma", "(1 2)", "--check")
    assert status == EXIT_OK
    assert out == "param\t1\ts1s2s1\n1\t1\t1\ns1s2s1\t0\t1\n"


def test_fold(capsys):
    status, out, _ = _run(capsys, "fold", "--type", "A3", "--sigma", "(1 3)")
    assert status == EXIT_OK
    assert out == "generator\tm\tw_omega\ns1s3\t2\ts1s3\ns2\t1\ts2\n"


def test_bar_oracle(capsys):
    status, out, _ = _run(capsys, "bar", "--datum", "a2-c", "--oracle", "--check")
    assert status == EXIT_OK
    assert out == "param\tL\tL'\nL\t1\t-1+u^-2\nL'\t0\tu^-2\n"


def test_act(capsys):
    status, out, _ = _run(capsys, "act", "--datum", "a2-c", "--word", "g", "--on", "L")
    assert status == EXIT_OK
    assert out == "L\tu\nL'\tu+1\n"


def test_act_unknown_parameter(capsys):
    status, _, err = _run(capsys, "act", "--datum", "a2-c", "--word", "g", "--on", "X")
    assert status == EXIT_FAILURE
    assert '"error": "UnknownName"' in err


def test_validate(capsys, tmp_path):
    status, out, _ = _run(capsys, "validate", "--datum", "a1a1-sc")
    assert status == EXIT_OK
    assert json.loads(out)["passed"] is True

    data = json.loads(_run(capsys, "builtin", "--name", "a2-c")[1])
    data["statuses"][1]["kind"] = "3R-"
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    status, out, err = _run(capsys, "validate", "--datum", str(path))
    assert status == EXIT_FAILURE
    assert out == ""
    assert "reciprocity" in err


def test_builtin_to_file(capsys, tmp_path):
    target = tmp_path / "sc.json"
    status, out, _ = _run(capsys, "builtin", "--name", "a1a1-sc", "--out", str(target))
    assert status == EXIT_OK
    assert out.strip() == str(target)
    assert json.loads(target.read_text(encoding="utf-8"))["name"] == "a1a1-sc"


def test_unknown_datum(capsys):
    status, out, err = _run(capsys, "klv", "--datum", "no-such-datum")
    assert status == EXIT_FAILURE
    assert out == ""
    assert '"error": "UnknownName"' in err


@pytest.mark.parametrize("argv", [
    ["bogus"],
    [],
    ["fq", "verify", "--family", "a2-c", "--q", "x"],
    ["klv"],
])
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as e:
        main(argv)
    assert e.value.code == 2


def test_fq_verify(capsys):
    status, out, _ = _run(capsys, "fq", "verify", "--family", "a2-s", "--q", "3")
    assert status == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "family\tq\tformula\texpected\tactual\tpassed"
    assert lines[1] == "a2-s\t3\tpoints = q^3+1\t28\t28\tpass"
    assert "4,12,12" in out


def test_fq_trace(capsys):
    status, out, _ = _run(capsys, "fq", "trace", "--family", "a1a1-int", "--datum", "a1a1-int", "--q", "3,5")
    assert status == EXIT_OK
    assert json.loads(out)["dictionary"]["L1"] == {"closed": 1}


def test_fq_derive(capsys, tmp_path):
    target = tmp_path / "derived.json"
    status, out, _ = _run(capsys, "fq", "derive", "--family", "a2-s", "--q", "3,5,7,9", "--out", str(target))
    assert status == EXIT_OK
    assert json.loads(out)["passed"] is True
    assert target.is_file()


def test_fq_derive_disconnected_family(capsys):
    status, _, err = _run(capsys, "fq", "derive", "--family", "a1a1-int", "--q", "3,5,7,9")
    assert status == EXIT_FAILURE
    assert '"error": "FqError"' in err


def test_selftest_subset(capsys):
    status, out, _ = _run(capsys, "selftest", "--only", "quadratic-relation,folded-rank-one")
    assert status == EXIT_OK
    report = json.loads(out)
    assert [r["name"] for r in report["results"]] == ["quadratic-relation", "folded-rank-one"]
