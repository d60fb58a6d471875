"""Band sets, spectral measures and the checks built on them.

Band edges are eigenvalues of Floquet matrices at the two corner signs
that make the Floquet determinant extremal.  Sorting the union of both
eigenvalue lists and pairing neighbours (1st with 2nd, 3rd with 4th, ...)
gives the bands.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import mpmath
import numpy as np

from .eigen_oracle import EigenList, corner_perturbation_eigs, lidskii_verify, symmetric_eigs
from .floquet import b_sequence, build_chiral, build_standard
from .rational_core import Frequency, ParityCase, Turns, angle_mod1, as_turns, reduce

log = logging.getLogger(__name__)

MERGE_TOL = 1e-9
REFINE_BELOW = 1e-10  # edge differences this small are polished before sign tests
SMALL_GAP_Q0 = 100


def lidskii_thetas(grid):
    """The five positive even-indexed grid points used for the Lidskii flag."""
    return grid[2::2]


@dataclass(frozen=True)
class BandSet:
    """Closed energy intervals sorted by lower edge."""

    bands: np.ndarray
    representation: str = "standard"

    def __post_init__(self):
        b = np.asarray(self.bands, dtype=float).reshape(-1, 2)
        if np.any(b[:, 0] > b[:, 1]):
            raise ValueError("band with lo > hi")
        b = b[np.argsort(b[:, 0], kind="stable")]
        b.setflags(write=False)
        object.__setattr__(self, "bands", b)

    def __len__(self) -> int:
        return len(self.bands)

    @property
    def edges(self) -> np.ndarray:
        return self.bands.ravel()

    def merged(self, tol: float = MERGE_TOL) -> "BandSet":
        """Join bands whose gap is at most tol."""
        out = []
        for lo, hi in self.bands:
            if out and lo <= out[-1][1] + tol:
                out[-1][1] = max(out[-1][1], hi)
            else:
                out.append([lo, hi])
        return BandSet(np.array(out).reshape(-1, 2), self.representation)

    def gaps(self) -> np.ndarray:
        b = self.bands
        return b[1:, 0] - b[:-1, 1]

    def contains(self, other: "BandSet", tol: float = MERGE_TOL) -> bool:
        """Band j of other lies inside band j of self, for every j."""
        if len(other) != len(self):
            return False
        a, b = self.bands, other.bands
        return bool(np.all(b[:, 0] >= a[:, 0] - tol) and np.all(b[:, 1] <= a[:, 1] + tol))

    def is_symmetric(self, tol: float = 1e-9) -> bool:
        e = np.sort(self.merged().edges)
        return bool(np.max(np.abs(e + e[::-1]), initial=0.0) <= tol)


def pair_edges(first: np.ndarray, second: np.ndarray, representation: str) -> BandSet:
    edges = np.sort(np.concatenate([np.asarray(first), np.asarray(second)]))
    return BandSet(edges.reshape(-1, 2), representation)


def measure(bs: BandSet, tol: float = 0.0) -> float:
    """Lebesgue measure of the union of the bands.

    With the default tol=0 only genuinely overlapping bands are joined, so
    clusters of near-coincident point bands do not pick up the tiny gaps
    between them.
    """
    b = bs.merged(tol).bands
    return float(np.sum(b[:, 1] - b[:, 0]))


def _warn_small_gaps(freq: Frequency, bs: BandSet) -> None:
    if freq.q0 > SMALL_GAP_Q0:
        g = bs.gaps()
        g = g[g > MERGE_TOL]
        if g.size and g.min() < 10 * MERGE_TOL:
            warnings.warn(
                f"{freq}: gap of {g.min():.3g} is within 10x the merge tolerance",
                RuntimeWarning,
                stacklevel=3,
            )


def standard_edge_lists(freq: Frequency, method: str = "auto") -> tuple[EigenList, EigenList]:
    """Eigenvalues of A at (theta=0, k=0) and at (theta=1/(2q0), k=pi/q0)."""
    half = Fraction(1, 2 * freq.q0)
    return (
        symmetric_eigs(build_standard(freq, 0, 0, small_q=True), method),
        symmetric_eigs(build_standard(freq, half, half, small_q=True), method),
    )


def band_edges_standard(freq: Frequency, method: str = "auto") -> BandSet:
    """S(p0/q0) = Delta^{-1}([-4, 4]) as q0 raw bands."""
    plus, minus = standard_edge_lists(freq, method)
    bs = pair_edges(plus.values, minus.values, "standard")
    _warn_small_gaps(freq, bs)
    return bs


def chiral_edge_lists(freq: Frequency, theta: Turns, method: str = "auto") -> tuple[EigenList, EigenList]:
    """Eigenvalues of B_theta at k=0 and k=pi/q (corner signs + and -)."""
    k_half = Fraction(1, 2 * freq.q)
    return (
        symmetric_eigs(build_chiral(freq, theta, 0, small_q=True), method),
        symmetric_eigs(build_chiral(freq, theta, k_half, small_q=True), method),
    )


def maximal_theta(freq: Frequency) -> Fraction:
    """theta at which sigma(H~_theta) is the whole of S~(p/q)."""
    if freq.parity_case is ParityCase.I:
        return Fraction(1, 4 * freq.q)
    return Fraction(1, 2 * freq.q)


def theta_spectrum(freq: Frequency, theta: Turns, method: str = "auto") -> BandSet:
    """sigma(H~_{p/q, theta}) as q raw bands."""
    lam0, lampi = chiral_edge_lists(freq, theta, method)
    return pair_edges(lam0.values, lampi.values, "chiral")


def band_edges_chiral(freq: Frequency, method: str = "auto") -> BandSet:
    """S~(p/q) from the maximal theta; case II bands touch in pairs."""
    return theta_spectrum(freq, maximal_theta(freq), method)


def theta_grid(freq: Frequency, n: int = 11) -> list[Fraction]:
    """Uniform grid on [0, maximal_theta] with n points."""
    top = maximal_theta(freq)
    return [top * Fraction(j, n - 1) for j in range(n)]


def per_theta_bound(freq: Frequency, theta: Turns, tol: float = MERGE_TOL,
                    spectrum: BandSet | None = None) -> tuple[float, bool]:
    """4 min_n |b_n(theta)| and whether |sigma(H~_theta)| stays below it."""
    b = b_sequence(freq, theta, 0, freq.q)
    bound = 4.0 * float(np.min(np.abs(b)))
    if spectrum is None:
        spectrum = theta_spectrum(freq, theta)
    m = measure(spectrum)
    return bound, m <= bound + tol


def _mp_turns(x: Turns):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def refine_chiral_edges(freq: Frequency, theta: Turns, seeds: EigenList, corner_sign: int,
                        dps: int = 40, indices=None) -> np.ndarray:
    """Newton-polish eigenvalues of B_theta in extended precision.

    Near the outer spectral edges the bands of sigma(H~_theta) are narrower
    than double-precision eigenvalue error, so the sign of lam_hat - lam
    cannot be read off the double eigenvalues.  The couplings are rebuilt
    from the exact angles at ``dps`` digits and det(B - E) and its
    derivative are evaluated by the three-term recurrence.  Returned values
    are offsets from the seeds (refined - seed), as floats, which keeps the
    small differences representable.  Only positions in ``indices``
    (0-based, default all) are polished; the rest get offset 0.
    """
    q = freq.q
    slope = freq.chiral_alpha
    theta = as_turns(theta)
    with mpmath.workdps(dps):
        b = [2 * mpmath.sinpi(2 * _mp_turns(angle_mod1(n, slope, theta))) for n in range(q)]
        c2 = [x * x for x in b[:-1]]
        beta = b[-1] * corner_sign
        prod_c = mpmath.fprod(b[:-1])
        const = (-1) ** (q - 1) * 2 * beta * prod_c
        beta2 = beta * beta

        def det(E):
            # Theta_{0..j} with its E-derivative; zero diagonal throughout
            t1, dt1, t0, dt0 = -E, mpmath.mpf(-1), mpmath.mpf(1), mpmath.mpf(0)
            for j in range(1, q):
                t1, dt1, t0, dt0 = (-E * t1 - c2[j - 1] * t0, -t1 - E * dt1 - c2[j - 1] * dt0, t1, dt1)
            # interior minor Theta_{1..q-2}
            s1, ds1, s0, ds0 = mpmath.mpf(1), mpmath.mpf(0), mpmath.mpf(0), mpmath.mpf(0)
            for j in range(1, q - 1):
                prev = c2[j - 1] if j > 1 else 0
                s1, ds1, s0, ds0 = (-E * s1 - prev * s0, -s1 - E * ds1 - prev * ds0, s1, ds1)
            return t1 - beta2 * s1 + const, dt1 - beta2 * ds1

        out = np.zeros(q)
        tol = mpmath.mpf(10) ** (-(dps - 8))
        for i in range(q) if indices is None else indices:
            seed = seeds.values[i]
            E = mpmath.mpf(float(seed))
            for _ in range(60):
                f, df = det(E)
                if df == 0:
                    break
                step = f / df
                E -= step
                if abs(step) < tol:
                    break
            out[i] = float(E - mpmath.mpf(float(seed)))
    return out


def orientation(freq: Frequency, sign: int = 1) -> int:
    """+1 if the k=0 eigenvalues play the role of lambda (case I), else -1.

    With the k-term sign convention ``sign``, the k=0 edges carry
    Delta~ = 4 sign (-1)^((q+1)/2) sin(2 pi q theta); for theta in
    (0, 1/(4q)] those are the band edges where Delta~ is maximal.
    """
    if freq.q % 2 == 0:
        raise ValueError("orientation is defined for odd q")
    return sign * (-1) ** ((freq.q + 1) // 2)


def alternating_sum(lam: EigenList, lam_hat: EigenList) -> float:
    """sum_j (-1)^(q-j) (lam_hat_j - lam_j), 1-based j."""
    q = lam.size
    j = np.arange(1, q + 1)
    return float(np.sum((-1.0) ** (q - j) * (lam_hat.values - lam.values)))


@dataclass
class LidskiiCheck:
    freq: Frequency
    theta: Turns
    pattern_holds: bool
    alternating_sum: float
    measure: float
    odd_margin: float
    even_margin: float
    bound: float
    worst_margin: float = field(default=0.0)


def lidskii_check(freq: Frequency, theta: Turns, sign: int = 1) -> LidskiiCheck:
    """Alternating sign pattern and Lidskii inequalities at one theta (q odd).

    A is the Floquet matrix whose eigenvalues are lambda, A + B the one with
    lambda-hat; B is the rank-two corner flip.  The odd index set is checked
    against the upper inequality and the even set against the lower one,
    and both inequalities are checked on both sets.  The sign pattern is
    read from edges polished in extended precision.
    """
    q = freq.q
    lam0, lampi = chiral_edge_lists(freq, theta)
    m0 = build_chiral(freq, theta, 0, small_q=True)
    mpi = build_chiral(freq, theta, Fraction(1, 2 * q), small_q=True)
    close = np.flatnonzero(np.abs(lampi.values - lam0.values) < REFINE_BELOW)
    off0 = refine_chiral_edges(freq, theta, lam0, 1, indices=close)
    offpi = refine_chiral_edges(freq, theta, lampi, -1, indices=close)
    if orientation(freq, sign) > 0:
        lam, lam_hat = lam0, lampi
        pert = corner_perturbation_eigs(m0, mpi)
        diff = (lampi.values - lam0.values) + (offpi - off0)
    else:
        lam, lam_hat = lampi, lam0
        pert = corner_perturbation_eigs(mpi, m0)
        diff = (lam0.values - lampi.values) + (off0 - offpi)
    j = np.arange(1, q + 1)
    pattern = bool(np.all(np.where(j % 2 == 1, diff > 0, diff < 0)))
    odd = lidskii_verify(lam, lam_hat, pert, list(range(1, q + 1, 2)))
    even = lidskii_verify(lam, lam_hat, pert, list(range(2, q, 2)))
    worst = min(odd.upper_margin, odd.lower_margin, even.upper_margin, even.lower_margin)
    return LidskiiCheck(
        freq,
        theta,
        pattern,
        alternating_sum(lam, lam_hat),
        measure(pair_edges(lam.values, lam_hat.values, "chiral")),
        odd.upper_margin,
        even.lower_margin,
        pert[1] - pert[q],
        worst,
    )


def nesting_holds(freq: Frequency, grid: Iterable[Turns] | None = None, tol: float = MERGE_TOL) -> bool:
    """Raw bands at consecutive grid thetas are nested band by band."""
    grid = list(grid) if grid is not None else theta_grid(freq)
    return _nested([theta_spectrum(freq, th) for th in grid], tol)


def _nested(spectra: list[BandSet], tol: float = MERGE_TOL) -> bool:
    return all(b.contains(a, tol) for a, b in zip(spectra, spectra[1:]))


def catalan_constant(tol: float = 1e-14) -> float:
    """Catalan's constant sum_k (-1)^k (2k+1)^-2.

    The alternating series is summed with the Euler transform (repeated
    averaging of consecutive partial sums), stopping once two successive
    estimates differ by less than tol.
    """
    partial, s, prev = [], 0.0, None
    for k in range(400):
        s += (-1.0) ** k / (2 * k + 1) ** 2
        partial.append(s)
        row = np.array(partial)
        while row.size > 1:
            row = 0.5 * (row[1:] + row[:-1])
        est = float(row[0])
        if prev is not None and abs(est - prev) < tol:
            return est
        prev = est
    raise RuntimeError("Catalan series did not settle")


def thouless_constant() -> float:
    """32 C / pi with C Catalan's constant."""
    return 32.0 * catalan_constant() / math.pi


def lower_bound(freq: Frequency) -> float:
    return 2.0 * (math.sqrt(5.0) + 1.0) / freq.q0


def upper_bound(freq: Frequency) -> float:
    return 4.0 * math.pi / freq.q0


@dataclass
class SpectrumReport:
    freq: Frequency
    bands: BandSet
    measure: float
    lower_bound: float
    upper_bound: float
    thouless_ratio: float
    flags: dict = field(default_factory=dict)
    chiral_bands: BandSet | None = None

    @property
    def ok(self) -> bool:
        return all(self.flags.values())


def representations_agree(std: BandSet, chi: BandSet, tol: float = 1e-8) -> tuple[bool, float]:
    a, b = std.merged().edges, chi.merged().edges
    if a.size != b.size:
        return False, math.inf
    dev = float(np.max(np.abs(np.sort(a) - np.sort(b)), initial=0.0))
    return dev <= tol, dev


def bounds_report(freq: Frequency, checks: bool = True, method: str = "auto") -> SpectrumReport:
    """Measure, Last's lower bound, the 4 pi / q0 upper bound and the check flags."""
    std = band_edges_standard(freq, method)
    m = measure(std)
    lo, hi = lower_bound(freq), upper_bound(freq)
    rep = SpectrumReport(freq, std, m, lo, hi, freq.q0 * m)
    rep.flags["bounds_hold"] = lo + 1e-9 < m < hi - 1e-9
    rep.flags["symmetric"] = std.is_symmetric()
    if not checks:
        return rep
    chi = band_edges_chiral(freq, method)
    rep.chiral_bands = chi
    rep.flags["representations_agree"] = representations_agree(std, chi)[0]
    grid = theta_grid(freq)
    spectra = [theta_spectrum(freq, th, method) for th in grid]
    rep.flags["nesting"] = _nested(spectra)
    rep.flags["per_theta_bound"] = all(
        per_theta_bound(freq, th, spectrum=sp)[1] for th, sp in zip(grid, spectra)
    )
    measures = [measure(sp) for sp in spectra]
    rep.flags["monotone_in_theta"] = all(b >= a - 1e-9 for a, b in zip(measures, measures[1:]))
    if freq.q % 2 and freq.q >= 3:
        lid = [lidskii_check(freq, th) for th in lidskii_thetas(grid)]
        rep.flags["lidskii"] = all(c.pattern_holds and c.worst_margin >= -1e-10 for c in lid)
    return rep


def thouless_sweep(p0: int, q0_list: Iterable[int], method: str = "bisection") -> list[tuple[int, float]]:
    """q0 |S(p0/q0)| for each coprime (p0, q0); other pairs are skipped."""
    out = []
    for q0 in q0_list:
        if q0 < 1 or p0 < 1 or math.gcd(p0, q0) != 1:
            log.warning("skipping %s/%s: not a coprime pair of positive integers", p0, q0)
            continue
        freq = reduce(p0, q0)
        m = measure(band_edges_standard(freq, method))
        out.append((q0, q0 * m))
    return out
