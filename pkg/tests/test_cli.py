import json
import os
import subprocess
import sys

import pytest

from avh.cli import EXIT_BAD_SPEC, EXIT_FAIL, EXIT_OK, EXIT_SMAX, EXIT_USAGE, EXIT_WORK_LIMIT, jsonable, main

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
SPECS = os.path.join(ROOT, "specs")


def spec(name):
    return os.path.join(SPECS, name + ".json")


def run(tmp_path, *args):
    out = tmp_path / "out.json"
    code = main([*args, "--out", str(out)])
    text = out.read_text() if out.exists() else None
    return code, text


def test_verify_iso(tmp_path):
    code, text = run(tmp_path, "verify-iso", "--n", "2", "--degree", "2", "--samples", "10")
    assert code == EXIT_OK and json.loads(text)["pass"]
    code, text = run(tmp_path, "verify-iso", "--n", "1", "--degree", "1", "--samples", "0")
    assert code == EXIT_OK


@pytest.mark.parametrize("args", [["verify-iso", "--degree", "0"], ["verify-iso", "--n", "0"], ["gk"], ["bogus"], ["gk", "--spec", "x", "--mmax", "0"]])
def test_usage_errors(args):
    with pytest.raises(SystemExit) as exc:
        code = main(args)
        raise SystemExit(code)
    assert exc.value.code == EXIT_USAGE


def test_gk_examples(tmp_path):
    code, text = run(tmp_path, "gk", "--spec", spec("gauge_trivial"), "--mmax", "8")
    rep = json.loads(text)
    assert code == EXIT_OK and rep["estimate"] == 2 and rep["holonomic"]
    assert rep["dims"] == [3, 6, 10, 15, 21, 28, 36, 45]
    code, text = run(tmp_path, "gk", "--spec", spec("rudakov_trivial"), "--mmax", "8")
    rep = json.loads(text)
    assert rep["dims"] == list(range(2, 10)) and rep["estimate"] == 1
    code, text = run(tmp_path, "gk", "--spec", spec("empty"))
    rep = json.loads(text)
    assert code == EXIT_OK and set(rep["dims"]) == {0} and rep["holonomic"]


def test_gk_csv(tmp_path):
    code, text = run(tmp_path, "gk", "--spec", spec("rudakov_trivial"), "--mmax", "3", "--format", "csv")
    assert code == EXIT_OK and text == "m,dim\n1,2\n2,3\n3,4\n"


def test_gk_malformed(tmp_path):
    assert run(tmp_path, "gk", "--spec", spec("bad_flatness"))[0] == EXIT_BAD_SPEC
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(tmp_path, "gk", "--spec", str(bad))[0] == EXIT_BAD_SPEC
    assert run(tmp_path, "gk", "--spec", str(tmp_path / "missing.json"))[0] == EXIT_BAD_SPEC


def test_gk_work_limit(tmp_path, monkeypatch):
    monkeypatch.setenv("AVH_WORK_LIMIT", "50")
    code, text = run(tmp_path, "gk", "--spec", spec("gauge_gl2"))
    assert code == EXIT_WORK_LIMIT and json.loads(text)["truncated"]


@pytest.mark.parametrize("name,order", [("rudakov_delta2", 0), ("gauge_gl2", 1), ("gauge_grade1", 2)])
def test_diff_order(tmp_path, name, order):
    code, text = run(tmp_path, "diff-order", "--spec", spec(name), "--samples", "2")
    rep = json.loads(text)
    assert code == EXIT_OK and rep["order"] == order and rep["route_agreement"]


def test_diff_order_smax_exceeded(tmp_path):
    code, text = run(tmp_path, "diff-order", "--spec", spec("gauge_grade1"), "--smax", "1", "--samples", "1")
    assert code == EXIT_SMAX and json.loads(text)["order"] == "exceeds smax"


def test_leibniz_and_bracket_span(tmp_path):
    code, text = run(tmp_path, "leibniz", "--spec", spec("gauge_connection"), "--samples", "20")
    assert code == EXIT_OK and json.loads(text)["pass"]
    code, text = run(tmp_path, "bracket-span", "--n", "2", "--smax", "2", "--dmax", "4")
    assert code == EXIT_OK and json.loads(text)["pass"]


def test_selftest_filter(tmp_path):
    code, text = run(tmp_path, "selftest", "--filter", "growth")
    rep = json.loads(text)
    assert code == EXIT_OK and {r["group"] for r in rep["results"]} == {"growth"}


def test_selftest_fault_injection():
    # run out of process: the fault poisons module-level caches
    proc = subprocess.run(
        [sys.executable, "-m", "avh.cli", "selftest", "--filter", "liefields", "--inject-fault", "bracket-sign"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == EXIT_FAIL
    assert "jacobi" in proc.stderr
    assert "jacobi" in json.loads(proc.stdout)["failed"]


def test_reports_are_deterministic(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    main(["verify-iso", "--n", "1", "--degree", "2", "--samples", "5", "--seed", "7", "--out", str(a)])
    main(["verify-iso", "--n", "1", "--degree", "2", "--samples", "5", "--seed", "7", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_rationals_serialized_as_strings():
    from fractions import Fraction

    assert jsonable({"x": Fraction(-3, 4), "y": [Fraction(2)]}) == {"x": "-3/4", "y": ["2"]}
