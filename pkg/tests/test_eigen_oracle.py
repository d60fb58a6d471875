import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from amospec.eigen_oracle import (
    ComplexCornerError,
    EigenList,
    bisection_eigenvalues,
    corner_perturbation_eigs,
    inertia_count,
    jacobi_eigenvalues,
    lidskii_verify,
    symmetric_eigs,
)
from amospec.floquet import PeriodicJacobi, build_chiral, build_standard
from amospec.rational_core import reduce


def test_eigenlist_order_and_indexing():
    e = EigenList([1.0, 3.0, -2.0])
    assert list(e.values) == [3.0, 1.0, -2.0]
    assert e[1] == 3.0 and e[3] == -2.0 and len(e) == 3
    with pytest.raises(IndexError):
        e[0]


def test_chiral_two_thirds():
    # B for p/q = 1/3 at theta = 0, k = 0 has spectrum {sqrt 6, 0, -sqrt 6}
    m = build_chiral(reduce(2, 3), 0, 0)
    for method in ("jacobi", "bisection"):
        v = symmetric_eigs(m, method).values
        np.testing.assert_allclose(v, [math.sqrt(6.0), 0.0, -math.sqrt(6.0)], atol=1e-14)


def test_standard_one_third_edges():
    # Delta(E) = -E^3 + 6E for q0 = 3 and det(A_{0,0} - E) = Delta(E) + 4
    plus = symmetric_eigs(build_standard(reduce(1, 3), 0, 0)).values
    s3 = math.sqrt(3.0)
    np.testing.assert_allclose(plus, [1.0 + s3, 1.0 - s3, -2.0], atol=1e-14)


def test_jacobi_known_matrix():
    a = np.array([[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]])
    expect = 2.0 - 2.0 * np.cos(np.pi * np.arange(1, 4) / 4)
    np.testing.assert_allclose(np.sort(jacobi_eigenvalues(a)), expect, atol=1e-14)


def _random_jacobi(draw_vals, q, corner_sign):
    d = np.array(draw_vals[:q])
    c = np.array(draw_vals[q:2 * q - 1])
    return PeriodicJacobi(d, c, draw_vals[-1], 0 if corner_sign > 0 else Fraction(1, 2))


@settings(max_examples=60, deadline=None)
@given(
    st.integers(3, 40),
    st.lists(st.floats(-3, 3, allow_nan=False), min_size=81, max_size=81),
    st.sampled_from([1, -1]),
)
def test_engines_agree_with_lapack(q, vals, sign):
    m = _random_jacobi(vals, q, sign)
    ref = np.sort(np.linalg.eigvalsh(m.dense()))[::-1]
    scale = max(1.0, float(np.max(np.abs(ref))))
    np.testing.assert_allclose(symmetric_eigs(m, "jacobi").values, ref, atol=1e-12 * scale)
    np.testing.assert_allclose(bisection_eigenvalues(m), ref, atol=1e-12 * scale)


def test_inertia_count():
    m = build_standard(reduce(2, 7), Fraction(1, 5), 0)
    ev = np.linalg.eigvalsh(m.dense())
    for x in (-5.0, ev[2] + 1e-6, 0.0, 5.0):
        assert inertia_count(m, x) == int(np.sum(ev < x))


def test_complex_corner_rejected():
    m = build_standard(reduce(1, 5), 0, 0.01)
    with pytest.raises(ComplexCornerError):
        symmetric_eigs(m)
    with pytest.raises(ValueError):
        symmetric_eigs(build_standard(reduce(1, 5), 0, 0), "qr")


def test_corner_perturbation():
    f = reduce(2, 5)
    m0 = build_chiral(f, Fraction(1, 40), 0)
    m1 = build_chiral(f, Fraction(1, 40), Fraction(1, 10))
    pert = corner_perturbation_eigs(m0, m1)
    diff = np.sort(np.linalg.eigvalsh(m1.dense() - m0.dense()))[::-1]
    np.testing.assert_allclose(pert.values, diff, atol=1e-14)
    with pytest.raises(ValueError):
        corner_perturbation_eigs(m0, build_chiral(f, Fraction(1, 30), 0))


def test_lidskii_verify():
    a = EigenList([3.0, 1.0, -1.0])
    b = EigenList([1.0, 0.0, -1.0])
    apb = EigenList([3.5, 1.0, -1.5])
    rep = lidskii_verify(a, apb, b, [1, 3])
    assert rep.upper_lhs == pytest.approx(0.0)
    assert rep.upper_margin == pytest.approx(1.0) and rep.lower_margin == pytest.approx(1.0)
    assert rep.holds
    bad = lidskii_verify(a, EigenList([5.0, 1.0, -1.0]), b, [1])
    assert not bad.holds and bad.upper_margin == pytest.approx(-1.0)
    with pytest.raises(ValueError):
        lidskii_verify(a, apb, b, [2, 1])
