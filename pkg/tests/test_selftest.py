import pytest

from avh.selftest import INVARIANTS, run_selftest


def test_default_run_passes():
    results = run_selftest()
    assert [r["name"] for r in results if not r["pass"]] == []
    assert len(results) == len(INVARIANTS)


def test_filter_by_group_and_name():
    assert {r["group"] for r in run_selftest("growth")} == {"growth"}
    assert [r["name"] for r in run_selftest("jacobi")] == ["jacobi"]


def test_unknown_filter():
    with pytest.raises(ValueError):
        run_selftest("nothing-matches-this")
