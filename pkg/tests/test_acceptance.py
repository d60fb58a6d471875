"""Acceptance criteria, each at its stated tolerance.

One pass/fail line per criterion is printed in the terminal summary.
"""
import math
import time

import numpy as np
import pytest

from amospec import spectrum as sp
from amospec import suites
from amospec.discriminant import determinant_roots
from amospec.rational_core import frequencies_up_to, reduce

criterion = pytest.mark.criterion

# value of 32 C / pi as quoted for the threshold in criterion 10
THOULESS_QUOTED = 9.3299856


@criterion(1, "closed-form measures |S(1)| = 8, |S(1/2)| = 4 sqrt 2")
def test_closed_form_measures():
    m1 = sp.measure(sp.band_edges_standard(reduce(1, 1)))
    m2 = sp.measure(sp.band_edges_standard(reduce(1, 2)))
    print(f"|S(1)| = {m1!r}, |S(1/2)| = {m2!r}")
    assert abs(m1 - 8.0) < 1e-10
    assert abs(m2 - 4.0 * math.sqrt(2.0)) < 1e-10


@criterion(2, "Last lower bound and 4 pi / q0 upper bound, all q0 <= 60")
@pytest.mark.slow
def test_measure_bounds():
    t0 = time.perf_counter()
    freqs = list(frequencies_up_to(60))
    bad = []
    for f in freqs:
        m = sp.measure(sp.band_edges_standard(f))
        if not sp.lower_bound(f) + 1e-9 < m < sp.upper_bound(f) - 1e-9:
            bad.append((str(f), m))
    elapsed = time.perf_counter() - t0
    print(f"{len(freqs)} coprime pairs in {elapsed:.1f} s, failures {bad}")
    assert len(freqs) == 1102  # sum of Euler phi(q0) for q0 <= 60
    assert not bad
    assert elapsed < 60


@criterion(3, "chiral Chambers-type formula, q <= 40, 100 samples per q")
@pytest.mark.slow
def test_chambers_formula():
    sign = suites.detect_sign_convention()
    out = suites.suite_chambers(qmax=40, seed=42, tol=1e-8, samples=100, sign=sign)
    print(f"cases {out.cases_run}, failures {out.failures}, worst {out.worst_residual:.3g}, sign {sign.value}")
    assert sign is not suites.SignConvention.UNDETERMINED
    assert out.failures == 0 and out.worst_residual < 1e-8


@criterion(4, "classical Chambers invariance over 50 (theta, k), q0 <= 40")
def test_classical_invariance():
    rng = np.random.default_rng(4)
    worst = max(suites._classical_variation(f, rng, 1e-8, n=50)[0] for f in frequencies_up_to(40))
    print(f"worst relative variation {worst:.3g}")
    assert worst < 1e-8


@criterion(5, "product identity for 50 random theta, q <= 150")
@pytest.mark.slow
def test_product_identity():
    out = suites.suite_lemma1(qmax=150, tol=1e-9, samples=50)
    print(f"cases {out.cases_run}, failures {out.failures}, worst {out.worst_residual:.3g}")
    assert out.failures == 0 and out.worst_residual < 1e-9


@criterion(6, "chiral discriminant against Delta or Delta^2, q0 <= 40")
def test_discriminant_relation():
    out = suites.suite_lemma3(qmax=40, tol=1e-7)
    print(f"cases {out.cases_run}, failures {out.failures}, worst {out.worst_residual:.3g}")
    assert out.failures == 0 and out.worst_residual < 1e-7


@criterion(7, "standard and chiral band edges agree, q0 <= 40")
def test_representation_equivalence():
    worst = 0.0
    for f in frequencies_up_to(40):
        ok, dev = sp.representations_agree(sp.band_edges_standard(f), sp.band_edges_chiral(f), 1e-8)
        assert ok, (str(f), dev)
        worst = max(worst, dev)
    print(f"worst edge deviation {worst:.3g}")


@criterion(8, "nesting and per-theta bound on an 11-point grid, q0 <= 30")
@pytest.mark.slow
def test_nesting_and_per_theta_bound():
    worst_bound = -math.inf
    for f in frequencies_up_to(30):
        grid = sp.theta_grid(f, 11)
        spectra = [sp.theta_spectrum(f, th) for th in grid]
        for a, b in zip(spectra, spectra[1:]):
            assert b.contains(a, 1e-9), (str(f), "nesting")
        for th, s in zip(grid, spectra):
            bound, _ = sp.per_theta_bound(f, th, spectrum=s)
            excess = sp.measure(s) - bound
            worst_bound = max(worst_bound, excess)
            assert excess <= 1e-9, (str(f), th, excess)
    print(f"worst measure - bound {worst_bound:.3g}")


@criterion(9, "Lidskii sign pattern and inequalities, q odd <= 31, 5 thetas")
def test_lidskii():
    sign = suites.detect_sign_convention()
    out = suites.suite_lidskii(qmax=31, tol=1e-10, sign=sign)
    print(f"cases {out.cases_run}, failures {out.failures}, worst violation {out.worst_residual:.3g}")
    assert out.cases_run == 5 * sum(len(suites.chiral_frequencies(q)) for q in range(3, 32, 2))
    assert out.failures == 0


@criterion(10, "Thouless trend for p0 = 1 at q0 = 101, 301")
@pytest.mark.slow
def test_thouless_trend():
    t0 = time.perf_counter()
    (_, r101), (_, r301) = sp.thouless_sweep(1, [101, 301])
    elapsed = time.perf_counter() - t0
    c = sp.thouless_constant()
    print(f"ratio(101) = {r101:.10f}, ratio(301) = {r301:.10f}, 32C/pi = {c:.13f}")
    assert 9.0 < r101 < 9.6 and 9.0 < r301 < 9.6
    assert abs(r301 - THOULESS_QUOTED) < abs(r101 - THOULESS_QUOTED)
    assert abs(r301 - c) < abs(r101 - c)
    assert elapsed < 300


@criterion(11, "eigensolver edges vs determinant roots, q0 <= 30")
@pytest.mark.slow
def test_oracle_equivalence():
    worst = 0.0
    for f in frequencies_up_to(30):
        for lst, m in zip(sp.standard_edge_lists(f), suites._standard_edge_matrices(f)):
            roots = determinant_roots(m)
            assert roots.size == lst.size, str(f)
            worst = max(worst, float(np.max(np.abs(roots - lst.values))))
    print(f"worst |eigenvalue - root| {worst:.3g}")
    assert worst < 1e-8
