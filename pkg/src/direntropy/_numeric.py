"""Rigorous rational enclosures of exp/log and small exact-interval helpers.

Everything here returns exact ``Fraction`` bounds.  Transcendental values are
bracketed with mpmath's directed-rounding primitives, so comparisons made
downstream against integers or dyadic root enclosures are certified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from mpmath.libmp import (
    from_int,
    mpf_div,
    mpf_exp,
    mpf_log,
    round_ceiling,
    round_floor,
)

from .errors import PrecisionError

START_PRECISION = 64
MAX_PRECISION = 4096


def as_rational(x) -> Fraction:
    """Exact rational from int, Fraction, decimal string or float.

    Floats are read through their shortest repr so that ``0.1`` means 1/10.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x!r}")
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as a rational")


def _mpf_to_fraction(v) -> Fraction:
    sign, man, exp, _ = v
    man, exp = int(man), int(exp)
    if man == 0:
        return Fraction(0)
    if sign:
        man = -man
    return Fraction(man * (1 << exp)) if exp >= 0 else Fraction(man, 1 << -exp)


def _rational_bounds(q: Fraction, prec: int):
    num, den = from_int(q.numerator), from_int(q.denominator)
    return (mpf_div(num, den, prec, round_floor), mpf_div(num, den, prec, round_ceiling))


def exp_bounds(q: Fraction, prec: int = START_PRECISION) -> tuple[Fraction, Fraction]:
    """Rational lo <= exp(q) <= hi, relative width about 2**-prec."""
    q = as_rational(q)
    if q == 0:
        return Fraction(1), Fraction(1)
    a, b = _rational_bounds(q, prec + 8)
    return (
        _mpf_to_fraction(mpf_exp(a, prec, round_floor)),
        _mpf_to_fraction(mpf_exp(b, prec, round_ceiling)),
    )


def log_bounds(x: Fraction, prec: int = START_PRECISION) -> tuple[Fraction, Fraction]:
    """Rational lo <= log(x) <= hi for x > 0."""
    x = as_rational(x)
    if x <= 0:
        raise ValueError("log of a non-positive number")
    if x == 1:
        return Fraction(0), Fraction(0)
    a, b = _rational_bounds(x, prec + 8)
    return (
        _mpf_to_fraction(mpf_log(a, prec, round_floor)),
        _mpf_to_fraction(mpf_log(b, prec, round_ceiling)),
    )


def ceil_scaled_exp(factor: Fraction, q: Fraction) -> int:
    """ceil(factor * exp(q)), certified by precision escalation."""
    return _round_scaled_exp(factor, q, math.ceil)


def floor_scaled_exp(factor: Fraction, q: Fraction) -> int:
    """floor(factor * exp(q)), certified by precision escalation."""
    return _round_scaled_exp(factor, q, math.floor)


def _round_scaled_exp(factor, q, rounder) -> int:
    factor, q = as_rational(factor), as_rational(q)
    if q == 0 or factor == 0:
        return rounder(factor)
    prec = START_PRECISION
    while prec <= 1 << 16:
        lo, hi = exp_bounds(q, prec)
        a, b = sorted((factor * lo, factor * hi))
        ra, rb = rounder(a), rounder(b)
        if ra == rb:
            return ra
        prec *= 2
    raise PrecisionError(f"could not round {factor}*exp({q}) to an integer")


@dataclass(frozen=True, slots=True)
class RatInterval:
    """Closed interval with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    @classmethod
    def point(cls, x) -> "RatInterval":
        x = as_rational(x)
        return cls(x, x)

    def __add__(self, other: "RatInterval") -> "RatInterval":
        return RatInterval(self.lo + other.lo, self.hi + other.hi)

    def __neg__(self) -> "RatInterval":
        return RatInterval(-self.hi, -self.lo)

    def __sub__(self, other: "RatInterval") -> "RatInterval":
        return self + (-other)

    def __mul__(self, other: "RatInterval") -> "RatInterval":
        ps = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return RatInterval(min(ps), max(ps))

    def scale(self, c: Fraction) -> "RatInterval":
        a, b = self.lo * c, self.hi * c
        return RatInterval(min(a, b), max(a, b))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def integers(self) -> range:
        return range(math.ceil(self.lo), math.floor(self.hi) + 1)

    def magnitude(self) -> Fraction:
        return max(abs(self.lo), abs(self.hi))

    def mignitude(self) -> Fraction:
        if self.lo <= 0 <= self.hi:
            return Fraction(0)
        return min(abs(self.lo), abs(self.hi))


def elementary_symmetric(values: list[RatInterval]) -> list[RatInterval]:
    """Interval enclosures of e_0..e_k of the given enclosed numbers."""
    e = [RatInterval.point(1)]
    for r in values:
        nxt = e + [RatInterval.point(0)]
        for j in range(len(e), 0, -1):
            nxt[j] = e[j] + r * e[j - 1] if j < len(e) else r * e[j - 1]
        e = nxt
    return e


def check_precision(prec: int, cap: int = MAX_PRECISION) -> None:
    if prec > cap:
        raise PrecisionError(f"precision {prec} exceeds cap {cap}")
