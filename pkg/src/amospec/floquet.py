"""Floquet matrices of the critical almost Mathieu operator.

Two representations are built as periodic Jacobi matrices of size q:

* standard:  diagonal a_n = 2 cos 2pi(alpha0 n + theta), unit hopping;
* chiral:    zero diagonal, hopping b_n = 2 sin 2pi(alpha n + theta).

The quasimomentum k enters only through the corner phase exp(-i k q),
which is stored in turns as q*k/(2 pi) mod 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .rational_core import Frequency, Turns, angle_mod1, as_turns, cos2pi, mod1, sin2pi


class SmallSizeError(ValueError):
    """Raised when a size-1 or size-2 matrix is requested without opting in."""


def potential_a(x: Turns) -> float:
    return 2.0 * cos2pi(x)


def potential_b(x: Turns) -> float:
    return 2.0 * sin2pi(x)


@dataclass(frozen=True)
class PeriodicJacobi:
    """Hermitian tridiagonal matrix closed by a corner coupling.

    Entry (0, q-1) is ``exp(-2 pi i corner_phase) * corner_magnitude`` and
    entry (q-1, 0) its conjugate.  For q <= 2 the corner shares a slot with
    the tridiagonal entries and the two are added.
    """

    diagonal: np.ndarray
    offdiag: np.ndarray
    corner_magnitude: float
    corner_phase: Turns

    def __post_init__(self):
        d = np.asarray(self.diagonal, dtype=float)
        c = np.asarray(self.offdiag, dtype=float)
        if d.ndim != 1 or d.size < 1 or c.shape != (d.size - 1,):
            raise ValueError("need q diagonal and q-1 off-diagonal entries")
        d.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "diagonal", d)
        object.__setattr__(self, "offdiag", c)
        object.__setattr__(self, "corner_magnitude", float(self.corner_magnitude))
        object.__setattr__(self, "corner_phase", mod1(self.corner_phase))

    @property
    def size(self) -> int:
        return self.diagonal.size

    @property
    def is_real(self) -> bool:
        return self.corner_phase in (0, Fraction(1, 2))

    @property
    def corner_cos(self) -> float:
        return cos2pi(self.corner_phase)

    def corner_entry(self) -> complex:
        """Value of entry (0, q-1) coming from the corner alone."""
        ph = self.corner_phase
        return self.corner_magnitude * complex(cos2pi(ph), -sin2pi(ph))

    def dense(self) -> np.ndarray:
        """Realize the matrix; real dtype whenever the corner phase is 0 or 1/2."""
        q = self.size
        if self.is_real:
            corner = self.corner_magnitude * (1.0 if self.corner_phase == 0 else -1.0)
            m = np.zeros((q, q))
        else:
            corner = self.corner_entry()
            m = np.zeros((q, q), dtype=complex)
        m[np.arange(q), np.arange(q)] = self.diagonal
        i = np.arange(q - 1)
        m[i, i + 1] = self.offdiag
        m[i + 1, i] = self.offdiag
        if q == 1:
            m[0, 0] += 2.0 * np.real(corner)
        else:
            m[0, q - 1] += corner
            m[q - 1, 0] += np.conj(corner)
        return m

    def with_corner_phase(self, phase: Turns) -> "PeriodicJacobi":
        return PeriodicJacobi(self.diagonal, self.offdiag, self.corner_magnitude, phase)


def _check_size(q: int, small_q: bool) -> None:
    if q < 3 and not small_q:
        raise SmallSizeError(
            f"size {q} merges corner and hopping entries; pass small_q=True"
        )


def b_sequence(freq: Frequency, theta: Turns, start: int, count: int) -> np.ndarray:
    """b_n(theta) for n = start, ..., start+count-1 with slope p/q."""
    slope = freq.chiral_alpha
    theta = as_turns(theta)
    return np.array(
        [potential_b(angle_mod1(n, slope, theta)) for n in range(start, start + count)]
    )


def a_sequence(freq: Frequency, theta: Turns, start: int, count: int) -> np.ndarray:
    """a_n(theta) for n = start, ..., start+count-1 with slope p0/q0."""
    slope = freq.alpha
    theta = as_turns(theta)
    return np.array(
        [potential_a(angle_mod1(n, slope, theta)) for n in range(start, start + count)]
    )


def build_chiral(
    freq: Frequency, theta: Turns, k_turns: Turns, ell: int = 0, *, small_q: bool = False
) -> PeriodicJacobi:
    """Chiral Floquet matrix B_{theta,k,ell} of size q."""
    q = freq.q
    _check_size(q, small_q)
    b = b_sequence(freq, theta, ell, q)
    return PeriodicJacobi(np.zeros(q), b[:-1], b[-1], q * as_turns(k_turns))


def build_standard(
    freq: Frequency, theta: Turns, k_turns: Turns, ell: int = 0, *, small_q: bool = False
) -> PeriodicJacobi:
    """Standard Floquet matrix A_{theta,k,ell} of size q0."""
    q0 = freq.q0
    _check_size(q0, small_q)
    a = a_sequence(freq, theta, ell, q0)
    return PeriodicJacobi(a, np.ones(q0 - 1), 1.0, q0 * as_turns(k_turns))
