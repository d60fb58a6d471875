import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from amospec.rational_core import (
    ParityCase,
    angle_mod1,
    cos2pi,
    exact,
    frequencies_up_to,
    mod1,
    reduce,
    sin2pi,
)


def test_reduce_cases():
    f = reduce(2, 3)
    assert (f.p0, f.q0, f.p, f.q, f.parity_case) == (2, 3, 1, 3, ParityCase.I)
    f = reduce(1, 2)
    assert (f.p0, f.q0, f.p, f.q, f.parity_case) == (1, 2, 1, 4, ParityCase.II)
    f = reduce(6, 4)
    assert (f.p0, f.q0) == (1, 2)


def test_reduce_multiples_map_to_one():
    for p in (1, 3, 7):
        f = reduce(5 * p, 5)
        assert (f.p0, f.q0, f.p, f.q) == (1, 1, 1, 2)


@pytest.mark.parametrize("p, q", [(0, 3), (3, 0), (-1, 4), (1.5, 2)])
def test_reduce_rejects(p, q):
    with pytest.raises(ValueError):
        reduce(p, q)


def test_frequency_count():
    # sum of Euler phi(q0) over q0 <= 60
    assert sum(1 for _ in frequencies_up_to(60)) == 1102
    first = [str(f) for f in frequencies_up_to(4)]
    assert first == ["1/1", "1/2", "1/3", "2/3", "1/4", "3/4"]


def test_mod1_exact():
    assert mod1(Fraction(-1, 3)) == Fraction(2, 3)
    assert 0.0 <= mod1(-1e-20) < 1.0
    assert mod1(-0.25) == 0.75


def test_angle_mod1_is_exact():
    assert angle_mod1(7, Fraction(2, 5), Fraction(1, 10)) == Fraction(9, 10)
    a = angle_mod1(3, Fraction(1, 3), 0.1)
    assert isinstance(a, Fraction) and a == Fraction(0.1)
    assert exact(0.5) == Fraction(1, 2)


@given(st.integers(-10**6, 10**6), st.integers(1, 500), st.integers(1, 500))
def test_angle_mod1_range(n, p, q):
    a = angle_mod1(n, Fraction(p, q), Fraction(1, 7))
    assert 0 <= a < 1
    assert a == mod1(Fraction(p * n, q) + Fraction(1, 7))


def test_trig_near_zeros():
    assert sin2pi(Fraction(1, 2)) == 0.0
    assert cos2pi(Fraction(1, 4)) == 0.0
    x = Fraction(1, 2) + Fraction(1, 10**12)
    assert math.isclose(sin2pi(x), -2 * math.pi * 1e-12, rel_tol=1e-12)


@given(st.floats(-50, 50, allow_nan=False))
def test_trig_matches_math(x):
    assert abs(sin2pi(x) - math.sin(2 * math.pi * x)) < 1e-12
    assert abs(cos2pi(x) - math.cos(2 * math.pi * x)) < 1e-12
