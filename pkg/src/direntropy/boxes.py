"""Vieta coefficient boxes P_T(v, m; eps) and their folded reciprocal version.

A box constrains each signed coefficient a_i M_i to the window
``[(1-eps) e^{T w_i}, (1+eps) e^{T w_i}]`` with ``w_i = v_1 + ... + v_i``.
Endpoints are rounded inward, so every integer point of the box satisfies
the real inequalities.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import mpmath

from ._numeric import (
    MAX_PRECISION,
    RatInterval,
    as_rational,
    ceil_scaled_exp,
    elementary_symmetric,
    exp_bounds,
    floor_scaled_exp,
)
from .chamber import Direction, Group, SignPattern, check_pattern
from .errors import BoxError, EnumerationCapError, PrecisionError
from .intpoly import IntPolynomial

DEFAULT_CAP = 10**8


@dataclass(frozen=True)
class RealPolynomial:
    """Model polynomial prod (x - m_i e^{T v_i}) with certified coefficient enclosures.

    ``b`` holds b_1..b_d in the same alternating convention as
    :class:`IntPolynomial`.
    """

    b: tuple[mpmath.mpf, ...]
    enclosures: tuple[RatInterval, ...]
    precision: int

    @property
    def degree(self) -> int:
        return len(self.b)

    def as_floats(self) -> list[float]:
        return [float(x) for x in self.b]


def model_roots(direction: Direction, m: SignPattern, T) -> list[tuple[int, Fraction]]:
    """(sign, exponent) pairs with root = sign * e^{exponent}, decreasing modulus."""
    T = as_rational(T)
    m = check_pattern(direction, m)
    big = [(s, T * c) for s, c in zip(m, direction.coords)]
    if direction.group is Group.SL:
        return big
    return big + [(s, -e) for s, e in reversed(big)]


def model_polynomial(direction: Direction, m, T, precision: int = 64) -> RealPolynomial:
    """Expand prod (x - m_i e^{T v_i}) with relative error at most 2^(-precision/2)."""
    T = as_rational(T)
    if T < 0:
        raise BoxError("T must be non-negative")
    roots = model_roots(direction, SignPattern.parse(m), T)
    work = max(precision, 32)
    while work <= MAX_PRECISION:
        rs, mags = [], []
        for s, e in roots:
            lo, hi = exp_bounds(e, work)
            r = RatInterval(lo, hi)
            rs.append(r.scale(s))
            mags.append(r)
        es = elementary_symmetric(rs)[1:]
        scale = elementary_symmetric(mags)[1:]
        tol = Fraction(1, 2 ** (precision // 2))
        ok = True
        for e, sc in zip(es, scale):
            if e.mignitude() > 0:
                ok &= e.width <= tol * e.mignitude()
            else:
                # cancellation down to (near) zero: accept an absolute bound
                ok &= e.width <= Fraction(1, 2 ** precision) * sc.hi
        if ok:
            ctx = mpmath.MPContext()
            ctx.prec = precision
            b = tuple(ctx.mpf(e.mid.numerator) / e.mid.denominator for e in es)
            return RealPolynomial(b, tuple(es), precision)
        work *= 2
    raise PrecisionError("model polynomial coefficients did not converge")


@dataclass(frozen=True)
class CoeffBox:
    """Integer box of Vieta coefficients.

    ``free`` lists the 1-based coefficient indices that range over
    ``intervals``; ``fixed`` maps the remaining indices to constants.  For Sp
    boxes a_{2n-i} mirrors a_i and is not stored.
    """

    direction: Direction
    m: SignPattern
    T: Fraction
    eps: Fraction
    free: tuple[int, ...]
    intervals: tuple[tuple[int, int], ...]
    fixed: tuple[tuple[int, int], ...] = ()
    degenerate: bool = False
    _count: int = field(default=-1, compare=False, repr=False)

    def __post_init__(self):
        if self._count < 0:
            object.__setattr__(self, "_count", math.prod(max(0, hi - lo + 1) for lo, hi in self.intervals))

    @property
    def group(self) -> Group:
        return self.direction.group

    @property
    def n(self) -> int:
        return self.direction.n

    @property
    def degree(self) -> int:
        return self.direction.degree

    @property
    def count(self) -> int:
        return self._count

    def poly(self, values) -> IntPolynomial:
        """Assemble the polynomial whose free coefficients are ``values``."""
        a = dict(self.fixed)
        a.update(zip(self.free, values))
        d = self.degree
        if self.group is Group.SP:
            n = self.n
            for i in range(1, n):
                a[d - i] = a[i]
            a[d] = 1
        return IntPolynomial(tuple(a[i] for i in range(1, d + 1)))

    def contains(self, p: IntPolynomial) -> bool:
        if p.degree != self.degree:
            return False
        a = (None,) + p.a
        if any(not lo <= a[i] <= hi for i, (lo, hi) in zip(self.free, self.intervals)):
            return False
        if any(a[i] != c for i, c in self.fixed):
            return False
        if self.group is Group.SP:
            return p.is_reciprocal()
        return True

    def point(self, p: IntPolynomial) -> tuple[int, ...]:
        return tuple(p.a[i - 1] for i in self.free)

    def split(self, parts: int) -> list["CoeffBox"]:
        """Disjoint sub-boxes along the widest axis (for parallel enumeration)."""
        if self.count == 0 or parts <= 1:
            return [self]
        axis = max(range(len(self.intervals)), key=lambda k: self.intervals[k][1] - self.intervals[k][0])
        lo, hi = self.intervals[axis]
        parts = min(parts, hi - lo + 1)
        cuts = [lo + (hi - lo + 1) * k // parts for k in range(parts + 1)]
        out = []
        for a, b in zip(cuts, cuts[1:]):
            iv = list(self.intervals)
            iv[axis] = (a, b - 1)
            out.append(CoeffBox(self.direction, self.m, self.T, self.eps, self.free, tuple(iv), self.fixed, self.degenerate))
        return out

    def to_json(self) -> dict:
        return {
            "group": self.group.value,
            "n": self.n,
            "v": [str(c) for c in self.direction.coords],
            "m": list(self.m.signs),
            "T": str(self.T),
            "eps": str(self.eps),
            "free": list(self.free),
            "intervals": [[str(lo), str(hi)] for lo, hi in self.intervals],
            "fixed": {str(i): str(c) for i, c in self.fixed},
            "degenerate": self.degenerate,
            "count": str(self.count),
        }

    @classmethod
    def from_json(cls, rec: dict) -> "CoeffBox":
        direction = Direction(Group.parse(rec["group"]), tuple(Fraction(s) for s in rec["v"]))
        box = cls(
            direction,
            SignPattern(tuple(rec["m"])),
            Fraction(rec["T"]),
            Fraction(rec["eps"]),
            tuple(int(i) for i in rec["free"]),
            tuple((int(lo), int(hi)) for lo, hi in rec["intervals"]),
            tuple(sorted((int(i), int(c)) for i, c in rec["fixed"].items())),
            bool(rec.get("degenerate", False)),
        )
        if direction.n != int(rec["n"]):
            raise BoxError("inconsistent n in box record")
        return box


def _window(eps: Fraction, q: Fraction, sign: int) -> tuple[int, int]:
    lo = int(ceil_scaled_exp(1 - eps, q))
    hi = int(floor_scaled_exp(1 + eps, q))
    return (lo, hi) if sign > 0 else (-hi, -lo)


def _validate(direction, m, T, eps):
    m = check_pattern(direction, m)
    T, eps = as_rational(T), as_rational(eps)
    if not 0 < eps < 1:
        raise BoxError(f"eps must lie in (0, 1), got {eps}")
    if T < 0:
        raise BoxError("T must be non-negative")
    return m, T, eps


def coeff_box_sl(direction: Direction, m, T, eps) -> CoeffBox:
    if direction.group is not Group.SL:
        raise BoxError("coeff_box_sl needs an SL direction")
    m, T, eps = _validate(direction, m, T, eps)
    n = direction.n
    M = m.prefix_products()
    w = direction.partial_sums()
    free, intervals = [], []
    for i in range(1, n):
        free.append(i)
        intervals.append(_window(eps, T * w[i - 1], M[i - 1]))
    # w_n = 0, so the last window is [1-eps, 1+eps] exactly
    lo, hi = math.ceil(1 - eps), math.floor(1 + eps)
    fixed, degenerate = (), False
    if lo == hi == 1:
        fixed = ((n, M[n - 1]),)
    else:
        degenerate = True
        free.append(n)
        intervals.append((lo, hi) if M[n - 1] > 0 else (-hi, -lo))
    return CoeffBox(direction, m, T, eps, tuple(free), tuple(intervals), fixed, degenerate)


def coeff_box_sp(direction: Direction, m, T, eps) -> CoeffBox:
    if direction.group is not Group.SP:
        raise BoxError("coeff_box_sp needs an Sp direction")
    m, T, eps = _validate(direction, m, T, eps)
    M = m.prefix_products()
    w = direction.partial_sums()
    intervals = tuple(_window(eps, T * w[i], M[i]) for i in range(direction.n))
    return CoeffBox(direction, m, T, eps, tuple(range(1, direction.n + 1)), intervals)


def coeff_box(direction: Direction, m, T, eps) -> CoeffBox:
    if direction.group is Group.SL:
        return coeff_box_sl(direction, m, T, eps)
    return coeff_box_sp(direction, m, T, eps)


def exact_count(box: CoeffBox) -> int:
    return box.count


def enumerate_box(box: CoeffBox, cap: int = DEFAULT_CAP) -> Iterator[IntPolynomial]:
    """All integer points in lexicographic order of the free coefficients."""
    if box.count > cap:
        raise EnumerationCapError(
            f"box holds {box.count} points, above the enumeration cap {cap}; use sample_box()"
        )
    return _enumerate(box)


def _enumerate(box: CoeffBox) -> Iterator[IntPolynomial]:
    ranges = [range(lo, hi + 1) for lo, hi in box.intervals]
    for values in itertools.product(*ranges):
        p = box.poly(values)
        assert box.contains(p)
        yield p


def sample_box(box: CoeffBox, k: int, seed: int) -> list[IntPolynomial]:
    """k independent uniform points (with replacement), reproducible from ``seed``."""
    if box.count == 0:
        raise BoxError("cannot sample an empty box")
    rng = random.Random(seed)
    return [box.poly(tuple(rng.randint(lo, hi) for lo, hi in box.intervals)) for _ in range(k)]
