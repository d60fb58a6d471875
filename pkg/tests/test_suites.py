import math

import pytest

from amospec import suites
from amospec.suites import SignConvention, run_suite


def test_chiral_frequencies():
    assert [str(f) for f in suites.chiral_frequencies(5)] == ["2/5", "4/5"]
    assert [str(f) for f in suites.chiral_frequencies(6)] == ["1/3"]
    assert all(f.q == 9 for f in suites.chiral_frequencies(9))
    assert suites.chiral_frequencies(1) == []


def test_sign_convention_detected():
    sign = suites.detect_sign_convention()
    assert sign is SignConvention.PLUS and sign.value_int == 1


@pytest.mark.parametrize("name", suites.SUITES)
def test_suites_pass_small(name):
    out = run_suite(name, qmax=8, seed=3)
    assert out.suite == name and out.cases_run > 0
    assert out.passed, out
    assert not math.isnan(out.worst_residual)


def test_suites_are_deterministic():
    a = run_suite("chambers", qmax=6, seed=11)
    b = run_suite("chambers", qmax=6, seed=11)
    assert a == b


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nope")


def test_tally_counts_failures():
    t = suites._Tally()
    t.add(1e-3, False)
    t.add(1e-9, True)
    out = t.outcome("x")
    assert out.failures == 1 and out.cases_run == 2 and out.worst_residual == 1e-3
    assert not out.passed
