"""Real-symmetric eigenvalues of periodic Jacobi matrices.

Two engines, which must agree wherever both run:

* cyclic Jacobi rotations on the dense matrix (default up to size 400);
* bisection on inertia counts of the bordered tridiagonal form, where the
  count comes from the pivots of a symmetric triangular factorization of
  M - x (default above size 400, O(q^2) overall).

Only corner phases 0 and 1/2 are supported; complex corners are handled
through determinants in :mod:`amospec.discriminant`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numba
import numpy as np

from .floquet import PeriodicJacobi

JACOBI_MAX_SIZE = 400
JACOBI_TOL = 1e-26


class ComplexCornerError(ValueError):
    """The matrix is Hermitian but not real; use det_eval-based root finding."""


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class EigenList:
    """Eigenvalues sorted in decreasing order (E_1 >= E_2 >= ...)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.sort(np.asarray(self.values, dtype=float))[::-1].copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def size(self) -> int:
        return self.values.size

    def __len__(self) -> int:
        return self.values.size

    def __getitem__(self, j: int) -> float:
        """1-based access, matching the usual E_1 >= ... >= E_q labels."""
        if not 1 <= j <= self.values.size:
            raise IndexError(j)
        return float(self.values[j - 1])


@numba.njit(cache=True)
def _jacobi_kernel(a, tol, max_sweeps):
    n = a.shape[0]
    norm2 = 0.0
    for i in range(n):
        for j in range(n):
            norm2 += a[i, j] * a[i, j]
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += a[i, j] * a[i, j]
        if off <= tol * norm2:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(tau) > 1e150:
                    t = 0.5 / tau
                else:
                    sgn = 1.0 if tau >= 0.0 else -1.0
                    t = sgn / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
    return -1


def jacobi_eigenvalues(a: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues of a dense real symmetric matrix, decreasing.

    Sweeps stop once the off-diagonal Frobenius mass drops below
    ``tol * ||a||_F^2``.
    """
    a = np.array(a, dtype=float, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("need a square matrix")
    if not np.array_equal(a, a.T):
        raise ValueError("matrix is not symmetric")
    if a.shape[0] == 0:
        return np.zeros(0)
    if _jacobi_kernel(a, tol, max_sweeps) < 0:
        raise ConvergenceError(f"Jacobi sweeps did not converge in {max_sweeps} sweeps")
    return np.sort(np.diag(a))[::-1]


@numba.njit(cache=True)
def _count_below(d, c, corner, x, sigma):
    # Negative pivots of a symmetric factorization of M - x, M periodic
    # Jacobi with q >= 3.  Rows 0..q-2 form a tridiagonal block eliminated
    # with Bunch's 1x1 / 2x2 pivot rule; s is the fill in column q-1 and
    # w the running Schur complement of entry (q-1, q-1).
    q = d.shape[0]
    alpha = 0.5 * (np.sqrt(5.0) - 1.0)
    pivmin = 4e-16 * sigma
    count = 0
    u = d[0] - x
    s = corner
    w = d[q - 1] - x
    i = 0
    while i <= q - 2:
        if i == q - 2:
            if abs(u) < pivmin:
                u = -pivmin
            if u < 0.0:
                count += 1
            w -= s * s / u
            break
        ci = c[i]
        s1 = c[q - 2] if i + 1 == q - 2 else 0.0
        if abs(u) * sigma >= alpha * ci * ci:
            if abs(u) < pivmin:
                u = -pivmin
            if u < 0.0:
                count += 1
            r = ci / u
            w -= s * s / u
            s = s1 - r * s
            u = d[i + 1] - x - ci * r
            i += 1
            continue
        u1 = d[i + 1] - x
        det = u * u1 - ci * ci
        if det < 0.0:
            count += 1
        elif u < 0.0:
            count += 2
        w -= (u1 * s * s - 2.0 * ci * s * s1 + u * s1 * s1) / det
        if i + 1 == q - 2:
            break
        cn = c[i + 1]
        s2 = c[q - 2] if i + 2 == q - 2 else 0.0
        s_next = s2 - cn * (u * s1 - ci * s) / det
        u = d[i + 2] - x - cn * cn * u / det
        s = s_next
        i += 2
    if w < 0.0:
        count += 1
    return count


@numba.njit(cache=True)
def _bisection_kernel(d, c, corner, lo0, hi0, sigma, iters):
    q = d.shape[0]
    out = np.empty(q)
    for i in range(q):
        lo = lo0
        hi = hi0
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if _count_below(d, c, corner, mid, sigma) > i:
                hi = mid
            else:
                lo = mid
        out[i] = 0.5 * (lo + hi)
    return out


def _real_corner(m: PeriodicJacobi) -> float:
    if not m.is_real:
        raise ComplexCornerError(
            f"corner phase {m.corner_phase} gives a complex matrix; use det_eval roots"
        )
    return m.corner_magnitude if m.corner_phase == 0 else -m.corner_magnitude


def inertia_count(m: PeriodicJacobi, x: float) -> int:
    """Number of eigenvalues of m strictly below x (up to pivot perturbation)."""
    corner = _real_corner(m)
    if m.size < 3:
        return int(np.sum(jacobi_eigenvalues(m.dense()) < x))
    scale = _gershgorin_radius(m)
    return int(_count_below(m.diagonal, m.offdiag, corner, float(x), max(scale + abs(x), 1.0)))


def _gershgorin_radius(m: PeriodicJacobi) -> float:
    a = np.abs(m.dense())
    return float(np.max(a.sum(axis=1)))


def bisection_eigenvalues(m: PeriodicJacobi, iters: int = 80) -> np.ndarray:
    """All eigenvalues by inertia-count bisection, decreasing."""
    corner = _real_corner(m)
    if m.size < 3:
        return jacobi_eigenvalues(m.dense())
    r = _gershgorin_radius(m)
    h = r * (1 + 1e-12) + 1e-300
    vals = _bisection_kernel(m.diagonal, m.offdiag, corner, -h, h, 2.0 * max(r, 0.5), iters)
    return np.sort(vals)[::-1]


def symmetric_eigs(m: PeriodicJacobi, method: str = "auto") -> EigenList:
    """Eigenvalues of a real periodic Jacobi matrix (corner phase 0 or 1/2)."""
    _real_corner(m)
    if method == "auto":
        method = "jacobi" if m.size <= JACOBI_MAX_SIZE else "bisection"
    if method == "jacobi":
        return EigenList(jacobi_eigenvalues(m.dense()))
    if method == "bisection":
        return EigenList(bisection_eigenvalues(m))
    raise ValueError(f"unknown method {method!r}")


def corner_perturbation_eigs(m0: PeriodicJacobi, m1: PeriodicJacobi) -> EigenList:
    """Eigenvalues of m1 - m0 when the two differ only by the corner sign.

    The difference has rank two with entries -+2c at the corners, so the
    spectrum is (2|c|, 0, ..., 0, -2|c|).
    """
    if m0.size != m1.size or m0.size < 2:
        raise ValueError("need two matrices of the same size >= 2")
    same_body = (
        np.array_equal(m0.diagonal, m1.diagonal)
        and np.array_equal(m0.offdiag, m1.offdiag)
        and m0.corner_magnitude == m1.corner_magnitude
    )
    if not same_body or {m0.corner_phase, m1.corner_phase} != {0, 0.5}:
        raise ValueError("matrices must differ only in the sign of the corner entry")
    c = abs(m0.corner_magnitude)
    vals = np.zeros(m0.size)
    vals[0], vals[-1] = 2.0 * c, -2.0 * c
    return EigenList(vals)


@dataclass
class LidskiiReport:
    indices: tuple
    upper_lhs: float
    upper_rhs: float
    lower_rhs: float
    upper_margin: float
    lower_margin: float
    holds: bool = field(default=False)


def lidskii_verify(
    a_eigs: EigenList,
    apb_eigs: EigenList,
    b_eigs: EigenList,
    indices: Sequence[int],
    tol: float = 1e-10,
) -> LidskiiReport:
    """Check both Lidskii inequalities for a 1-based increasing index set.

    sum_{i in I} E_i(A+B) - E_i(A) lies between the sum of the m smallest
    and the m largest eigenvalues of B, m = |I|.  Margins are >= 0 when the
    inequalities hold.
    """
    q = a_eigs.size
    if apb_eigs.size != q or b_eigs.size != q:
        raise ValueError("eigenvalue lists must have the same length")
    idx = np.asarray(indices, dtype=int)
    if idx.size == 0 or np.any(np.diff(idx) <= 0) or idx[0] < 1 or idx[-1] > q:
        raise ValueError(f"indices must be strictly increasing within 1..{q}")
    m = idx.size
    lhs = float(np.sum(apb_eigs.values[idx - 1] - a_eigs.values[idx - 1]))
    top = float(np.sum(b_eigs.values[:m]))
    bottom = float(np.sum(b_eigs.values[q - m:]))
    rep = LidskiiReport(tuple(int(i) for i in idx), lhs, top, bottom, top - lhs, lhs - bottom)
    rep.holds = rep.upper_margin >= -tol and rep.lower_margin >= -tol
    return rep
