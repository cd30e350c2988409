"""Certified real-root isolation, tube membership (the Rouche discs) and discriminants.

Roots are enclosed in intervals with exact dyadic endpoints.  A sign change of
the integer polynomial across an interval proves a root inside; once ``d``
disjoint such intervals are found for a degree-``d`` polynomial each holds
exactly one root.  No floating-point value ever decides a count.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

from . import intpoly
from ._numeric import MAX_PRECISION, START_PRECISION, RatInterval, as_rational, exp_bounds, log_bounds
from .boxes import model_roots
from .chamber import Direction, Group, SignPattern, check_pattern
from .errors import NotSquarefreeError, PrecisionError
from .intpoly import IntPolynomial


def c_n(n: int) -> int:
    """Disc-radius constant 10 (n-1) 2^(n-1)."""
    return 10 * (n - 1) * 2 ** (n - 1)


@dataclass(frozen=True)
class DiscRadius:
    n: int
    eps: Fraction

    @property
    def constant(self) -> int:
        return c_n(self.n)

    def radius(self, i: int, direction: Direction, T) -> mpmath.mpf:
        """c_n eps e^{T v_i}."""
        eps = as_rational(self.eps)
        q = as_rational(T) * direction.coords[i]
        return self.constant * mpmath.mpf(eps.numerator) / eps.denominator * mpmath.exp(mpmath.mpf(q.numerator) / q.denominator)


def epsilon0(n: int) -> float:
    """Largest eps with eps < 1/(4 c_n) and 3(n-1)(1+c eps)^(n-1) < c (1/2 - c eps)^(n-1)."""
    c = c_n(n)

    def ok(e):
        return 3 * (n - 1) * (1 + c * e) ** (n - 1) < c * (0.5 - c * e) ** (n - 1)

    hi = 1.0 / (4 * c)
    if ok(hi):
        return hi
    lo = 0.0
    for _ in range(200):
        mid = (lo + hi) / 2
        lo, hi = (mid, hi) if ok(mid) else (lo, mid)
    return lo


# -- exact sign evaluation -------------------------------------------------

def sign_at(coeffs: Sequence[int], x: Fraction) -> int:
    """Sign of p(x) for integer p and rational x, computed exactly."""
    num, den = x.numerator, x.denominator
    # den^d p(num/den) = sum c_i num^(d-i) den^i, evaluated by Horner
    acc = 0
    dk = 1
    for c in coeffs:
        acc = acc * num + c * dk
        dk *= den
    return (acc > 0) - (acc < 0)


# -- root clusters ----------------------------------------------------------

@dataclass(frozen=True)
class RootCluster:
    """Disjoint root enclosures ordered by decreasing modulus.

    ``certified`` is true exactly when the number of enclosures equals the
    degree, i.e. every root is real and isolated.
    """

    poly: IntPolynomial
    enclosures: tuple[RatInterval, ...]
    certified: bool
    precision: int

    @property
    def degree(self) -> int:
        return self.poly.degree

    @property
    def signs(self) -> tuple[int, ...]:
        out = []
        for e in self.enclosures:
            out.append(1 if e.lo > 0 else -1 if e.hi < 0 else 0)
        return tuple(out)

    def sign_pattern(self) -> SignPattern:
        return SignPattern(self.signs)

    def midpoints(self, prec: int = 53) -> list[mpmath.mpf]:
        ctx = mpmath.MPContext()
        ctx.prec = prec
        return [ctx.mpf(e.mid.numerator) / e.mid.denominator for e in self.enclosures]

    def refined(self, precision: int) -> "RootCluster":
        if precision <= self.precision:
            return self
        coeffs = self.poly.coeffs()
        encl = tuple(refine(coeffs, e, precision) for e in self.enclosures)
        return RootCluster(self.poly, encl, self.certified, precision)

    def log_abs_bounds(self, prec: int | None = None) -> list[RatInterval]:
        """Enclosures of log|x_i| (roots must be non-zero)."""
        prec = prec or self.precision
        out = []
        for e in self.enclosures:
            a, b = sorted((abs(e.lo), abs(e.hi)))
            if e.lo <= 0 <= e.hi:
                raise ValueError("enclosure straddles zero")
            out.append(RatInterval(log_bounds(a, prec)[0], log_bounds(b, prec)[1]))
        return out


def _cauchy_bound(coeffs: Sequence[int]) -> Fraction:
    lead = abs(coeffs[0])
    return 1 + Fraction(max(abs(c) for c in coeffs[1:]), lead) if len(coeffs) > 1 else Fraction(1)


def is_squarefree(p: IntPolynomial) -> bool:
    return p.degree <= 1 or intpoly.discriminant(p.coeffs()) != 0


def refine(coeffs: Sequence[int], e: RatInterval, precision: int) -> RatInterval:
    """Bisect a sign-change enclosure to relative width 2^-precision."""
    lo, hi = e.lo, e.hi
    if lo == hi:
        return e
    slo = sign_at(coeffs, lo)
    shi = sign_at(coeffs, hi)
    if slo == 0:
        return RatInterval(lo, lo)
    if shi == 0:
        return RatInterval(hi, hi)
    assert slo != shi, "not a sign-change enclosure"
    tol = Fraction(1, 1 << precision)
    for _ in range(precision * 4 + 4096):
        mag = min(abs(lo), abs(hi)) if (lo > 0 or hi < 0) else Fraction(0)
        if mag > 0 and hi - lo <= tol * mag:
            break
        mid = (lo + hi) / 2
        s = sign_at(coeffs, mid)
        if s == 0:
            return RatInterval(mid, mid)
        if s == slo:
            lo = mid
        else:
            hi = mid
    return RatInterval(lo, hi)


def _snap(coeffs, e: RatInterval) -> RatInterval:
    # rational roots of a monic integer polynomial are integers
    ints = e.integers()
    if e.lo != e.hi and len(ints) <= 4:
        for k in ints:
            if sign_at(coeffs, Fraction(k)) == 0:
                return RatInterval(Fraction(k), Fraction(k))
    return e


def _newton(coeffs: Sequence[int], x0: float) -> float | None:
    try:
        fc = [float(c) for c in coeffs]
    except OverflowError:
        return None
    dc = [c * (len(fc) - 1 - i) for i, c in enumerate(fc[:-1])]
    x = x0
    try:
        for _ in range(100):
            f = intpoly.horner(fc, x)
            fp = intpoly.horner(dc, x)
            if fp == 0 or not math.isfinite(f) or not math.isfinite(fp):
                return None
            step = f / fp
            x -= step
            if not math.isfinite(x):
                return None
            if abs(step) <= 1e-15 * abs(x):
                break
    except (OverflowError, ZeroDivisionError):
        return None
    return x


def _bracket(coeffs, x: float) -> RatInterval | None:
    if x == 0 or not math.isfinite(x):
        return None
    c = Fraction(x)
    for k in (50, 40, 30, 20, 12, 6, 3):
        delta = abs(c) / (1 << k)
        lo, hi = c - delta, c + delta
        slo, shi = sign_at(coeffs, lo), sign_at(coeffs, hi)
        if slo == 0:
            return RatInterval(lo, lo)
        if shi == 0:
            return RatInterval(hi, hi)
        if slo != shi:
            return RatInterval(lo, hi)
    return None


def _seeded(coeffs, hints) -> list[RatInterval] | None:
    d = len(coeffs) - 1
    if len(hints) != d:
        return None
    found = []
    for h in hints:
        x = _newton(coeffs, float(h))
        if x is None:
            return None
        b = _bracket(coeffs, x)
        if b is None:
            return None
        found.append(b)
    found.sort(key=lambda e: e.lo)
    if any(a.hi >= b.lo for a, b in zip(found, found[1:])):
        return None
    return found


# Sturm fallback -------------------------------------------------------------

def sturm_sequence(coeffs: Sequence[int]) -> list[list[Fraction]]:
    p = [Fraction(c) for c in coeffs]
    seq = [p, [Fraction(c) for c in intpoly.derivative(coeffs)]]
    while intpoly.degree(seq[-1]) > 0:
        _, r = intpoly.divmod_poly(seq[-2], seq[-1])
        if not any(r):
            break
        seq.append([-c for c in r])
    return seq


def _variations(seq, x: Fraction) -> int:
    signs = []
    for q in seq:
        v = intpoly.horner(q, x)
        if v:
            signs.append(v > 0)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def sturm_isolate(coeffs: Sequence[int]) -> list[RatInterval]:
    """Sign-change enclosures of all real roots of a squarefree polynomial."""
    seq = sturm_sequence(coeffs)
    B = _cauchy_bound(coeffs)
    out = []
    stack = [(-B, B, _variations(seq, -B) - _variations(seq, B))]
    while stack:
        a, b, k = stack.pop()
        if k == 0:
            continue
        if k == 1:
            sa, sb = sign_at(coeffs, a), sign_at(coeffs, b)
            if sb == 0:
                out.append(RatInterval(b, b))
                continue
            if sa != 0 and sa != sb:
                out.append(RatInterval(a, b))
                continue
        mid = (a + b) / 2
        nudge = (b - a) / 1024
        while sign_at(coeffs, mid) == 0 and k > 1:
            mid += nudge / 3
        vm = _variations(seq, mid)
        va, vb = _variations(seq, a), _variations(seq, b)
        stack.append((a, mid, va - vm))
        stack.append((mid, b, vm - vb))
    out.sort(key=lambda e: e.lo)
    return out


def isolate_real_roots(p: IntPolynomial, hints: Sequence | None = None, precision: int = START_PRECISION) -> RootCluster:
    """Certified enclosures of the real roots of a squarefree monic polynomial.

    ``hints`` are expected root locations (typically m_i e^{T v_i}); when they
    fail to produce ``d`` disjoint sign-change brackets the Sturm sequence is
    used instead.
    """
    if not is_squarefree(p):
        raise NotSquarefreeError(f"{p} has a repeated root")
    coeffs = p.coeffs()
    encl = _seeded(coeffs, list(hints)) if hints is not None else None
    if encl is None:
        encl = sturm_isolate(coeffs)
    encl = [_snap(coeffs, refine(coeffs, e, precision)) for e in encl]
    encl.sort(key=lambda e: -e.magnitude())
    return RootCluster(p, tuple(encl), len(encl) == p.degree, precision)


# -- tube membership ---------------------------------------------------------

class Verdict(str, enum.Enum):
    MEMBER = "member"
    NONMEMBER = "nonmember"
    UNCERTAIN = "uncertain"


@dataclass(frozen=True)
class Membership:
    verdict: Verdict
    cluster: RootCluster | None
    precision: int

    @property
    def member(self) -> bool:
        return self.verdict is Verdict.MEMBER


def default_radius(direction: Direction, eps) -> Fraction:
    """Relative disc radius: c_n eps for SL tubes, eps for Sp tubes."""
    eps = as_rational(eps)
    return c_n(direction.n) * eps if direction.group is Group.SL else eps


def model_hints(direction: Direction, m, T) -> list[float]:
    out = []
    for s, e in model_roots(direction, m, T):
        try:
            out.append(s * math.exp(e))
        except OverflowError:
            out.append(s * math.inf)
    return out


def _disc_decision(root: RatInterval, sign: int, exponent: Fraction, radius: Fraction, prec: int):
    """True / False / None for: root in the closed disc |x - s e^q| <= r e^q."""
    lo, hi = exp_bounds(exponent, prec + 16)
    # disc is [(s - r) E, (s + r) E] for E in [lo, hi]
    left = [(sign - radius) * lo, (sign - radius) * hi]
    right = [(sign + radius) * lo, (sign + radius) * hi]
    if root.lo >= max(left) and root.hi <= min(right):
        return True
    if root.hi < min(left) or root.lo > max(right):
        return False
    return None


def check_q_membership(
    p: IntPolynomial,
    direction: Direction,
    m,
    T,
    eps,
    radius=None,
    max_precision: int = MAX_PRECISION,
    cluster: RootCluster | None = None,
) -> Membership:
    """Three-valued test of the tube condition on the roots of ``p``.

    SL: |x_i - m_i e^{T v_i}| <= r e^{T v_i} for every i, with r = c_n eps by
    default.  Sp: |x_i - m_i e^{T v_i}| <= eps e^{T v_i} and
    |x_i^{-1} - m_i e^{-T v_i}| <= eps e^{-T v_i} for the n largest roots.
    Polynomials without a full set of real roots are non-members; repeated
    roots give ``uncertain`` (their discs cannot be told apart by enclosures).
    """
    m = check_pattern(direction, m)
    T = as_rational(T)
    radius = default_radius(direction, eps) if radius is None else as_rational(radius)
    d = direction.degree
    if p.degree != d:
        return Membership(Verdict.NONMEMBER, None, 0)
    if cluster is None:
        try:
            cluster = isolate_real_roots(p, model_hints(direction, m, T))
        except NotSquarefreeError:
            return Membership(Verdict.UNCERTAIN, None, 0)
    if not cluster.certified:
        return Membership(Verdict.NONMEMBER, cluster, cluster.precision)
    checks = [(i, m[i], T * c) for i, c in enumerate(direction.coords)]
    prec = cluster.precision
    while True:
        undecided = False
        for i, s, q in checks:
            root = cluster.enclosures[i]
            dec = _disc_decision(root, s, q, radius, prec)
            if dec is False:
                return Membership(Verdict.NONMEMBER, cluster, prec)
            if dec is None:
                undecided = True
            if direction.group is Group.SP:
                if root.lo <= 0 <= root.hi:
                    undecided = True
                    continue
                inv = RatInterval(1 / root.hi, 1 / root.lo)
                dec = _disc_decision(inv, s, -q, radius, prec)
                if dec is False:
                    return Membership(Verdict.NONMEMBER, cluster, prec)
                if dec is None:
                    undecided = True
        if not undecided:
            return Membership(Verdict.MEMBER, cluster, prec)
        if prec * 2 > max_precision:
            return Membership(Verdict.UNCERTAIN, cluster, prec)
        prec *= 2
        cluster = cluster.refined(prec)


def box_excess(p: IntPolynomial, direction: Direction, m, T) -> Fraction:
    """max_i |a_i M_i e^{-T w_i} - 1|, the smallest eps' with p in P_T(v, m; eps').

    Returned as an upper bound accurate to about 2^-60.
    """
    m = check_pattern(direction, m)
    T = as_rational(T)
    M = m.prefix_products()
    w = direction.partial_sums()
    worst = Fraction(0)
    for i in range(direction.n):
        lo, hi = exp_bounds(-T * w[i], 96)
        val = p.a[i] * M[i]
        dev = max(abs(val * lo - 1), abs(val * hi - 1))
        worst = max(worst, dev)
    return worst


# -- discriminants --------------------------------------------------------------

def discriminant(p: IntPolynomial) -> int:
    """prod_{i<j} (x_i - x_j)^2 as an exact integer (resultant of p and p')."""
    return intpoly.discriminant(p.coeffs())


@dataclass(frozen=True)
class DiscGrowth:
    value: mpmath.mpf
    half_value: mpmath.mpf
    target: Fraction


def disc_growth(direction: Direction, m, T, precision: int = 256) -> DiscGrowth:
    """(1/T) log Disc(q_{Tv,m}) from the exact model roots, plus half of it.

    ``target`` is sum_{i<j}(v_i - v_j) over the full chamber vector.
    """
    T = as_rational(T)
    if T <= 0:
        raise ValueError("T must be positive")
    m = check_pattern(direction, m)
    ctx = mpmath.MPContext()
    ctx.prec = precision
    Tm = ctx.mpf(T.numerator) / T.denominator
    roots = [s * ctx.exp(ctx.mpf(e.numerator) / e.denominator) for s, e in model_roots(direction, m, T)]
    logd = ctx.mpf(0)
    for a, b in itertools.combinations(roots, 2):
        diff = a - b
        if diff == 0:
            raise PrecisionError("model roots coincide at this precision")
        logd += 2 * ctx.log(abs(diff))
    full = direction.full()
    target = sum(a - b for a, b in itertools.combinations(full, 2))
    return DiscGrowth(logd / Tm, logd / (2 * Tm), target)


def empirical_t0(direction: Direction, m, eps, T_grid, radius=None, cap: int = 10**6, samples: int | None = None, seed: int = 0):
    """Smallest grid T from which every box polynomial is a tube member.

    Returns ``(T0, report)`` where ``report`` maps each T to
    ``(checked, members, uncertain)``.  ``T0`` is ``None`` if the check fails
    at the last grid point.
    """
    from .boxes import coeff_box, enumerate_box, sample_box

    report = {}
    passing = []
    for T in T_grid:
        box = coeff_box(direction, m, T, eps)
        if box.count == 0:
            report[T] = (0, 0, 0)
            passing.append(False)
            continue
        polys = enumerate_box(box, cap) if samples is None else sample_box(box, samples, seed)
        checked = members = uncertain = 0
        for p in polys:
            res = check_q_membership(p, direction, m, T, eps, radius=radius)
            checked += 1
            members += res.member
            uncertain += res.verdict is Verdict.UNCERTAIN
        report[T] = (checked, members, uncertain)
        passing.append(members == checked)
    T0 = None
    for T, ok in reversed(list(zip(T_grid, passing))):
        if not ok:
            break
        T0 = T
    return T0, report
