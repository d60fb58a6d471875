"""Exact rational bookkeeping for frequencies and angles.

Angles are measured in turns (one turn = 2*pi radians).  Exact angles are
carried as :class:`fractions.Fraction`; anything else is a plain float.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

Turns = Union[Fraction, float]


class ParityCase(str, enum.Enum):
    I = "I"
    II = "II"


@dataclass(frozen=True)
class Frequency:
    """Reduced frequency p0/q0 together with its chiral pair p/q."""

    p0: int
    q0: int
    p: int
    q: int
    parity_case: ParityCase

    @property
    def alpha(self) -> Fraction:
        return Fraction(self.p0, self.q0)

    @property
    def chiral_alpha(self) -> Fraction:
        return Fraction(self.p, self.q)

    def __str__(self) -> str:
        return f"{self.p0}/{self.q0}"


def reduce(p_raw: int, q_raw: int) -> Frequency:
    """Reduce p_raw/q_raw to lowest terms with alpha in (0, 1].

    Multiples of q_raw map to alpha = 1, i.e. p0 = q0 = 1.
    """
    if int(p_raw) != p_raw or int(q_raw) != q_raw:
        raise ValueError("frequency numerator and denominator must be integers")
    p_raw, q_raw = int(p_raw), int(q_raw)
    if p_raw < 1 or q_raw < 1:
        raise ValueError(f"need positive integers, got {p_raw}/{q_raw}")
    r = p_raw % q_raw
    if r == 0:
        p0, q0 = 1, 1
    else:
        g = math.gcd(r, q_raw)
        p0, q0 = r // g, q_raw // g
    if p0 % 2 == 0:
        return Frequency(p0, q0, p0 // 2, q0, ParityCase.I)
    return Frequency(p0, q0, p0, 2 * q0, ParityCase.II)


def frequencies_up_to(q0_max: int) -> Iterator[Frequency]:
    """All coprime p0/q0 with q0 <= q0_max and alpha in (0, 1], by (q0, p0)."""
    for q0 in range(1, q0_max + 1):
        for p0 in range(1, q0 + 1):
            if math.gcd(p0, q0) == 1:
                yield reduce(p0, q0)


def as_turns(x) -> Turns:
    """Coerce ints/Fractions to Fraction and everything else to float."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return float(x)


def mod1(x: Turns) -> Turns:
    """x mod 1 in [0, 1); exact for Fractions."""
    x = as_turns(x)
    if isinstance(x, Fraction):
        return x - math.floor(x)
    r = math.fmod(x, 1.0)
    if r < 0.0:
        r += 1.0
        if r == 1.0:
            r = 0.0
    return r


def angle_mod1(n: int, slope: Fraction, theta: Turns) -> Fraction:
    """(slope*n + theta) mod 1, exactly.

    A float theta is taken at its exact binary value, so the result never
    carries a rounding error that sin2pi would amplify near its zeros.
    """
    slope = Fraction(slope)
    base = Fraction((slope.numerator * n) % slope.denominator, slope.denominator)
    return mod1(base + exact(theta))


def exact(x) -> Fraction:
    """The exact rational value of an int, Fraction or float."""
    return x if isinstance(x, Fraction) else Fraction(x)


def _reduced_float(x: Turns) -> tuple[int, float]:
    # split x = k/4 + r with |r| <= 1/8 and r computed without cancellation
    if isinstance(x, Fraction):
        x = mod1(x)
        k = math.floor(4 * x + Fraction(1, 2))
        return k % 4, float(x - Fraction(k, 4))
    x = mod1(x)
    k = math.floor(4.0 * x + 0.5)
    return k % 4, x - k / 4.0  # exact: x and k/4 are within a factor of 2


def sin2pi(x: Turns) -> float:
    """sin(2*pi*x), accurate to a few ulps relative even near the zeros."""
    k, r = _reduced_float(as_turns(x))
    t = 2.0 * math.pi * r
    return (math.sin(t), math.cos(t), -math.sin(t), -math.cos(t))[k]


def cos2pi(x: Turns) -> float:
    """cos(2*pi*x), accurate to a few ulps relative even near the zeros."""
    k, r = _reduced_float(as_turns(x))
    t = 2.0 * math.pi * r
    return (math.cos(t), -math.sin(t), -math.cos(t), math.sin(t))[k]
