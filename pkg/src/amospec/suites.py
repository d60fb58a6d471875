"""Verification suites behind ``amospec verify``.

Each suite returns a :class:`VerifyOutcome`.  For identity suites the
residual is the worst relative error; for inequality suites it is the
largest signed violation, so a negative residual means every case had
slack.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import discriminant as disc
from . import spectrum as sp
from .eigen_oracle import bisection_eigenvalues
from .floquet import build_chiral, build_standard
from .rational_core import Frequency, frequencies_up_to, reduce

SUITES = ("chambers", "lemma1", "lemma3", "nesting", "bounds", "lidskii", "equivalence")


class SignConvention(str, enum.Enum):
    PLUS = "+1"
    MINUS = "-1"
    UNDETERMINED = "n/a"

    @property
    def value_int(self) -> int:
        return {"+1": 1, "-1": -1}.get(self.value, 1)


@dataclass
class VerifyOutcome:
    suite: str
    cases_run: int
    failures: int
    worst_residual: float
    detected_sign_convention: SignConvention = SignConvention.UNDETERMINED

    @property
    def passed(self) -> bool:
        return self.failures == 0


class _Tally:
    def __init__(self):
        self.cases = 0
        self.failures = 0
        self.worst = -math.inf

    def add(self, residual: float, ok: bool) -> None:
        self.cases += 1
        self.failures += 0 if ok else 1
        if math.isnan(residual):
            self.worst = math.nan
        elif not math.isnan(self.worst):
            self.worst = max(self.worst, residual)

    def outcome(self, suite: str, sign=SignConvention.UNDETERMINED) -> VerifyOutcome:
        worst = 0.0 if self.cases == 0 else self.worst
        return VerifyOutcome(suite, self.cases, self.failures, worst, sign)


def _rng(seed: int, suite: str) -> np.random.Generator:
    return np.random.default_rng([seed, SUITES.index(suite)])


def chiral_frequencies(q: int) -> list[Frequency]:
    """All reduced p0/q0 whose chiral denominator is q."""
    if q % 2:
        return [reduce(2 * p, q) for p in range(1, (q + 1) // 2) if math.gcd(p, q) == 1]
    q0 = q // 2
    return [reduce(p0, q0) for p0 in range(1, q0 + 1, 2) if math.gcd(p0, q0) == 1]


def _chiral_denominators(qmax: int):
    for q in range(2, qmax + 1):
        fs = chiral_frequencies(q)
        if fs:
            yield q, fs


def _chambers_samples(qmax: int, n: int, rng: np.random.Generator):
    for q, fs in _chiral_denominators(qmax):
        for i in range(n):
            f = fs[i % len(fs)]
            th, k, E = rng.random(), rng.random() / q, rng.uniform(-4.0, 4.0)
            yield f, th, k, E


def _chambers_residuals(samples, sign: int) -> np.ndarray:
    out = []
    for f, th, k, E in samples:
        lhs = float(disc.det_values(build_chiral(f, th, k, small_q=True), [E])[0])
        rhs = float(disc.chambers_rhs(f, th, k, [E], sign)[0])
        out.append(abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs)))
    return np.array(out)


def detect_sign_convention(qmax: int = 12, seed: int = 0) -> SignConvention:
    """Pick the k-term sign that fits the determinant on a few odd-q samples."""
    rng = np.random.default_rng([seed, 99])
    samples = [s for s in _chambers_samples(min(qmax, 12), 6, rng) if s[0].q % 2]
    if not samples:
        return SignConvention.UNDETERMINED
    plus = _chambers_residuals(samples, 1).max()
    minus = _chambers_residuals(samples, -1).max()
    if min(plus, minus) > 1e-6 or abs(plus - minus) < 1e-6:
        return SignConvention.UNDETERMINED
    return SignConvention.PLUS if plus < minus else SignConvention.MINUS


def suite_chambers(qmax: int = 40, seed: int = 42, tol: float = 1e-8, samples: int = 100,
                   sign: SignConvention | None = None) -> VerifyOutcome:
    """Chiral Chambers-type formula, the classical one, and the D^(0) structure."""
    rng = _rng(seed, "chambers")
    sign = sign or detect_sign_convention(qmax, seed)
    s = sign.value_int
    t = _Tally()
    for r in _chambers_residuals(list(_chambers_samples(qmax, samples, rng)), s):
        t.add(float(r), r < tol)
    # classical form: det(A - E) + offset does not depend on (theta, k)
    for f in frequencies_up_to(qmax):
        t.add(*_classical_variation(f, rng, tol))
    # k-independent part: shift from Delta~ and vanishing odd structure
    for q, fs in _chiral_denominators(qmax):
        f = fs[int(rng.integers(len(fs)))]
        E = rng.uniform(-4.0, 4.0, 4)
        for th in rng.random(3):
            d0 = disc.d0_values(f, th, E)
            ref = disc.discriminant_chiral_values(f, E) + disc.d0_shift(f, th)
            r = float(np.max(np.abs(d0 - ref) / np.maximum(1.0, np.abs(ref))))
            t.add(r, r < tol)
        if q % 2 == 0:
            th = float(rng.random())
            r = abs(disc.d0_values(f, th, [0.0])[0] - disc.d0_at_zero_even(f, th))
            r /= max(1.0, abs(disc.d0_at_zero_even(f, th)))
            t.add(float(r), r < tol)
    return t.outcome("chambers", sign)


def _classical_variation(f: Frequency, rng: np.random.Generator, tol: float, n: int = 50):
    E = rng.uniform(-4.0, 4.0, 3)
    vals = []
    for _ in range(n):
        th, k = rng.random(), rng.random() / f.q0
        vals.append(disc.discriminant_standard_values(f, E, th, k))
    vals = np.array(vals)
    spread = vals.max(axis=0) - vals.min(axis=0)
    r = float(np.max(spread / np.maximum(1.0, np.abs(vals).max(axis=0))))
    return r, r < tol


def suite_lemma1(qmax: int = 150, seed: int = 42, tol: float = 1e-9, samples: int = 50) -> VerifyOutcome:
    """prod_j b_j(theta) against its closed form, relative error."""
    rng = _rng(seed, "lemma1")
    t = _Tally()
    for q, fs in _chiral_denominators(qmax):
        for i in range(samples):
            f = fs[i % len(fs)]
            th = float(rng.random())
            direct, closed = disc.product_b_direct(f, th), disc.product_b_closed(f, th)
            r = abs(direct - closed) / max(abs(closed), 1e-300)
            t.add(r, r < tol)
    return t.outcome("lemma1")


def suite_lemma3(qmax: int = 40, seed: int = 42, tol: float = 1e-7) -> VerifyOutcome:
    t = _Tally()
    for f in frequencies_up_to(qmax):
        rep = disc.lemma3_check(f)
        t.add(rep.max_deviation, rep.passed(tol))
    return t.outcome("lemma3")


def suite_nesting(qmax: int = 40, seed: int = 42, tol: float = 1e-9, extra: int = 3) -> VerifyOutcome:
    """Nesting, per-theta bound and monotone measure on the grid plus seeded thetas."""
    rng = _rng(seed, "nesting")
    t = _Tally()
    for f in frequencies_up_to(qmax):
        top = sp.maximal_theta(f)
        grid = sorted(set(sp.theta_grid(f)) | {top * Fraction(float(x)).limit_denominator(10**6)
                                               for x in rng.random(extra)})
        spectra = [sp.theta_spectrum(f, th) for th in grid]
        worst_nest = 0.0
        for a, b in zip(spectra, spectra[1:]):
            out = np.maximum(b.bands[:, 0] - a.bands[:, 0], a.bands[:, 1] - b.bands[:, 1])
            worst_nest = max(worst_nest, float(out.max()))
        t.add(worst_nest - tol, worst_nest <= tol)
        for th, s in zip(grid, spectra):
            bound, _ = sp.per_theta_bound(f, th, spectrum=s)
            v = sp.measure(s) - bound
            t.add(v - tol, v <= tol)
        m = [sp.measure(s) for s in spectra]
        drop = max([a - b for a, b in zip(m, m[1:])] + [0.0])
        t.add(drop - tol, drop <= tol)
    return t.outcome("nesting")


def suite_bounds(qmax: int = 60, seed: int = 42, tol: float = 1e-9) -> VerifyOutcome:
    """2(sqrt5+1)/q0 + tol < |S(p0/q0)| < 4 pi/q0 - tol for every coprime pair."""
    t = _Tally()
    for f in frequencies_up_to(qmax):
        rep = sp.bounds_report(f, checks=False)
        v = max(rep.lower_bound + tol - rep.measure, rep.measure - (rep.upper_bound - tol))
        t.add(v, v < 0)
    return t.outcome("bounds")


def suite_lidskii(qmax: int = 31, seed: int = 42, tol: float = 1e-10,
                  sign: SignConvention | None = None) -> VerifyOutcome:
    """Alternating pattern of lam_hat - lam and both Lidskii inequalities, q odd."""
    sign = sign or detect_sign_convention(qmax, seed)
    t = _Tally()
    for q in range(3, qmax + 1, 2):
        for f in chiral_frequencies(q):
            for th in sp.lidskii_thetas(sp.theta_grid(f)):
                c = sp.lidskii_check(f, th, sign.value_int)
                t.add(-c.worst_margin, c.pattern_holds and c.worst_margin >= -tol)
    return t.outcome("lidskii", sign)


def suite_equivalence(qmax: int = 40, seed: int = 42, tol: float = 1e-8,
                      oracle_qmax: int = 30) -> VerifyOutcome:
    """Standard vs chiral edges, symmetry, eigen engines vs determinant roots."""
    t = _Tally()
    for f in frequencies_up_to(qmax):
        std, chi = sp.band_edges_standard(f), sp.band_edges_chiral(f)
        ok, dev = sp.representations_agree(std, chi, tol)
        t.add(dev, ok)
        e = np.sort(std.merged().edges)
        sym = float(np.max(np.abs(e + e[::-1])))
        t.add(sym, sym <= 1e-9)
        if f.q0 <= oracle_qmax:
            for lst, m in zip(sp.standard_edge_lists(f), _standard_edge_matrices(f)):
                roots = disc.determinant_roots(m)
                d = float(np.max(np.abs(roots - lst.values)))
                t.add(d, d <= tol)
                if m.size >= 3:
                    b = bisection_eigenvalues(m)
                    d = float(np.max(np.abs(b - lst.values)))
                    t.add(d, d <= tol)
    return t.outcome("equivalence")


def _standard_edge_matrices(f: Frequency):
    half = Fraction(1, 2 * f.q0)
    return (build_standard(f, 0, 0, small_q=True), build_standard(f, half, half, small_q=True))


RUNNERS: dict[str, Callable[..., VerifyOutcome]] = {
    "chambers": suite_chambers,
    "lemma1": suite_lemma1,
    "lemma3": suite_lemma3,
    "nesting": suite_nesting,
    "bounds": suite_bounds,
    "lidskii": suite_lidskii,
    "equivalence": suite_equivalence,
}


def run_suite(name: str, qmax: int | None = None, seed: int = 42, tol: float = 1e-8,
              sign: SignConvention | None = None) -> VerifyOutcome:
    """Run one suite.  ``tol`` applies to the suites whose threshold is 1e-8."""
    if name not in RUNNERS:
        raise KeyError(name)
    kw: dict = {"seed": seed}
    if qmax is not None:
        kw["qmax"] = qmax
    if name in ("chambers", "equivalence"):
        kw["tol"] = tol
    if name in ("chambers", "lidskii"):
        kw["sign"] = sign
    return RUNNERS[name](**kw)
