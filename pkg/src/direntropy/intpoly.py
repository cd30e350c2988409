"""Monic integral polynomials and the exact arithmetic the rest of the package needs.

Dense coefficient lists are stored *descending* (leading coefficient first).
:class:`IntPolynomial` additionally keeps the alternating-sign convention

    p(x) = x^d - a_1 x^{d-1} + a_2 x^{d-2} - ... + (-1)^d a_d,

under which a_i is the i-th elementary symmetric function of the roots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


@dataclass(frozen=True, slots=True)
class IntPolynomial:
    """Monic integer polynomial given by its Vieta coefficients a_1..a_d."""

    a: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(x) for x in self.a))

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[int]) -> "IntPolynomial":
        """From descending ordinary coefficients; must be monic."""
        coeffs = strip(list(coeffs))
        if not coeffs or coeffs[0] != 1:
            raise ValueError(f"polynomial must be monic, got leading {coeffs[:1]}")
        return cls(tuple((-1) ** i * c for i, c in enumerate(coeffs[1:], start=1)))

    @classmethod
    def from_roots(cls, roots: Sequence[int]) -> "IntPolynomial":
        p = [1]
        for r in roots:
            p = mul(p, [1, -r])
        return cls.from_coeffs(p)

    @property
    def degree(self) -> int:
        return len(self.a)

    def coeffs(self) -> list[int]:
        """Descending ordinary coefficients [1, -a_1, a_2, ...]."""
        return [1] + [(-1) ** i * c for i, c in enumerate(self.a, start=1)]

    @property
    def constant_term(self) -> int:
        return self.coeffs()[-1]

    def __call__(self, x):
        return horner(self.coeffs(), x)

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        return IntPolynomial.from_coeffs(mul(self.coeffs(), other.coeffs()))

    def reversal(self) -> "IntPolynomial":
        """Monic normalisation of x^d p(1/x); needs constant term +-1."""
        c = self.coeffs()[::-1]
        if abs(c[0]) != 1:
            raise ValueError("reversal is monic only for constant term +-1")
        return IntPolynomial.from_coeffs([c[0] * x for x in c])

    def is_reciprocal(self) -> bool:
        c = self.coeffs()
        return c == c[::-1]

    def __str__(self) -> str:
        return format_poly(self.coeffs())


def strip(p: list) -> list:
    i = 0
    while i < len(p) - 1 and p[i] == 0:
        i += 1
    return p[i:]


def degree(p: Sequence) -> int:
    return len(p) - 1 if any(p) else -1


def horner(p: Sequence, x):
    acc = 0
    for c in p:
        acc = acc * x + c
    return acc


def mul(p: Sequence, q: Sequence) -> list:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def derivative(p: Sequence) -> list:
    d = len(p) - 1
    return [c * (d - i) for i, c in enumerate(p[:-1])] or [0]


def neg_x(p: Sequence) -> list:
    """Coefficients of p(-x)."""
    d = len(p) - 1
    return [c if (d - i) % 2 == 0 else -c for i, c in enumerate(p)]


def divmod_poly(p: Sequence, q: Sequence) -> tuple[list, list]:
    """Division over the rationals; exact Fractions unless q is monic."""
    p, q = strip(list(p)), strip(list(q))
    if not any(q):
        raise ZeroDivisionError("polynomial division by zero")
    lead = q[0]
    rem = [Fraction(c) if lead != 1 else c for c in p]
    dq = len(q) - 1
    if len(rem) - 1 < dq:
        return [0], rem
    quot = []
    for i in range(len(rem) - dq):
        c = rem[i] / lead if lead != 1 else rem[i]
        quot.append(c)
        if c:
            for j in range(1, dq + 1):
                rem[i + j] -= c * q[j]
    r = strip(rem[len(rem) - dq:]) if dq else [0]
    return quot, r


def exact_divide(p: Sequence[int], q: Sequence[int]) -> list[int] | None:
    """p / q over Z when the division is exact, else None."""
    quot, rem = divmod_poly(p, q)
    if any(rem):
        return None
    if any(isinstance(c, Fraction) and c.denominator != 1 for c in quot):
        return None
    return [int(c) for c in quot]


def prem(a: list[int], b: list[int]) -> list[int]:
    """Pseudo-remainder: lc(b)^(deg a - deg b + 1) a mod b, over Z."""
    da, db = len(a) - 1, len(b) - 1
    lb = b[0]
    r = list(a)
    e = da - db + 1
    while len(r) - 1 >= db and any(r):
        c = r[0]
        r = [lb * x for x in r]
        for j in range(1, db + 1):
            r[j] -= c * b[j]
        r = r[1:] if len(r) > 1 else [0]
        e -= 1
        r = strip(r)
    return [lb ** e * x for x in r]


def content(p: Sequence[int]) -> int:
    g = 0
    for c in p:
        g = math.gcd(g, c)
    return g


def primitive(p: Sequence[int]) -> list[int]:
    g = content(p)
    if g == 0:
        return [0]
    if p[0] < 0:
        g = -g
    return [c // g for c in p]


def resultant(a: Sequence[int], b: Sequence[int]) -> int:
    """Resultant over Z by the subresultant algorithm."""
    a, b = strip(list(a)), strip(list(b))
    if not any(a) or not any(b):
        return 0
    da, db = len(a) - 1, len(b) - 1
    s = 1
    if da < db:
        a, b = b, a
        da, db = db, da
        if da % 2 == 1 and db % 2 == 1:
            s = -1
    if db == 0:
        return s * b[0] ** da
    ca, cb = content(a), content(b)
    a = [x // ca for x in a]
    b = [x // cb for x in b]
    t = ca ** db * cb ** da
    g = h = Fraction(1)
    while True:
        da, db = len(a) - 1, len(b) - 1
        delta = da - db
        if da % 2 == 1 and db % 2 == 1:
            s = -s
        r = prem(a, b)
        if not any(r):
            return 0
        a = b
        div = g * h ** delta
        b = [Fraction(x) / div for x in r]
        assert all(x.denominator == 1 for x in b)
        b = [int(x) for x in b]
        g = Fraction(a[0])
        h = h ** (1 - delta) * g ** delta
        if len(b) - 1 == 0:
            break
    da = len(a) - 1
    h = h ** (1 - da) * Fraction(b[0]) ** da
    assert h.denominator == 1
    return s * t * int(h)


def discriminant(p: Sequence[int]) -> int:
    """Disc = (-1)^{d(d-1)/2} Res(p, p') / lc(p) = prod_{i<j} (x_i - x_j)^2 for monic p."""
    p = strip(list(p))
    d = len(p) - 1
    if d < 1:
        raise ValueError("discriminant needs degree >= 1")
    if d == 1:
        return 1
    r = resultant(p, derivative(p))
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    q, rem = divmod(sign * r, p[0])
    assert rem == 0
    return q


def gcd_poly(p: Sequence[int], q: Sequence[int]) -> list[int]:
    """Primitive gcd over Z (positive leading coefficient)."""
    a = [Fraction(c) for c in strip(list(p))]
    b = [Fraction(c) for c in strip(list(q))]
    while any(b):
        _, r = divmod_poly(a, b)
        a, b = b, r
    den = math.lcm(*(c.denominator for c in a))
    return primitive([int(c * den) for c in a])


def squarefree_decomposition(p: Sequence[int]) -> list[tuple[list[int], int]]:
    """Yun's algorithm: [(f_k, k)] with p = prod f_k^k up to a constant, f_k squarefree."""
    p = [Fraction(c) for c in strip(list(p))]
    out = []
    a = _monic_gcd(p, derivative(p))
    b = _quo(p, a)
    c = _quo(derivative(p), a)
    d = _sub(c, derivative(b))
    k = 1
    while degree(b) > 0:
        a = _monic_gcd(b, d)
        b = _quo(b, a)
        c = _quo(d, a)
        d = _sub(c, derivative(b))
        if degree(a) > 0:
            den = math.lcm(*(x.denominator for x in a))
            out.append((primitive([int(x * den) for x in a]), k))
        k += 1
    return out


def _monic_gcd(p, q):
    a, b = list(p), list(q)
    while any(b):
        _, r = divmod_poly(a, b)
        a, b = b, r
    a = strip(a)
    return [Fraction(x) / a[0] for x in a]


def _quo(p, q):
    quot, rem = divmod_poly(p, q)
    assert not any(rem), "inexact division"
    return [Fraction(x) for x in quot]


def _sub(p, q):
    n = max(len(p), len(q))
    p = [0] * (n - len(p)) + list(p)
    q = [0] * (n - len(q)) + list(q)
    return strip([a - b for a, b in zip(p, q)])


def format_poly(c: Sequence[int], var: str = "x") -> str:
    d = len(c) - 1
    terms = []
    for i, a in enumerate(c):
        if a == 0:
            continue
        k = d - i
        mag = abs(a)
        body = "" if (mag == 1 and k > 0) else str(mag)
        if k >= 1:
            body += var if k == 1 else f"{var}^{k}"
        sign = "-" if a < 0 else "+"
        terms.append((sign, body))
    if not terms:
        return "0"
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out
