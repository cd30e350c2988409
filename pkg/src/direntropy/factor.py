"""Irreducibility over Z via root-subset search, with a finite-field screen.

A monic integer factor of a monic polynomial with real roots x_1..x_d is
prod_{i in S} (x - x_i) for some subset S.  Its coefficients are elementary
symmetric functions of the enclosed roots, so interval arithmetic either rules
S out (some coefficient interval holds no integer) or pins down a single
integer candidate, which is then checked by exact division.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from . import intpoly
from ._numeric import MAX_PRECISION, RatInterval, elementary_symmetric
from .boxes import CoeffBox, enumerate_box, sample_box
from .chamber import Group
from .errors import BoxError, NotSquarefreeError
from .intpoly import IntPolynomial
from .roots import RootCluster, isolate_real_roots, model_hints

IRREDUCIBLE = "irreducible"
REDUCIBLE = "reducible"
DEFERRED = "deferred"

SCREEN_PRIMES = 5


# -- finite-field screen --------------------------------------------------------
# polynomials over F_p are ascending coefficient lists with no trailing zeros

def _trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def _fp(coeffs_desc, p):
    return _trim([c % p for c in reversed(coeffs_desc)])


def _mulmod(a, b, f, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _rem(out, f, p)


def _rem(a, f, p):
    a = list(a)
    df = len(f) - 1
    inv = pow(f[-1], -1, p)
    while len(a) - 1 >= df and a:
        c = a[-1] * inv % p
        shift = len(a) - 1 - df
        for i, y in enumerate(f):
            a[shift + i] = (a[shift + i] - c * y) % p
        _trim(a)
    return a


def _gcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _rem(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [x * inv % p for x in a]
    return a


def _powmod(base, e, f, p):
    out = [1]
    while e:
        if e & 1:
            out = _mulmod(out, base, f, p)
        base = _mulmod(base, base, f, p)
        e >>= 1
    return out


def _divide(a, b, p):
    a = list(a)
    db = len(b) - 1
    inv = pow(b[-1], -1, p)
    q = [0] * (len(a) - db)
    while len(a) - 1 >= db and a:
        c = a[-1] * inv % p
        shift = len(a) - 1 - db
        q[shift] = c
        for i, y in enumerate(b):
            a[shift + i] = (a[shift + i] - c * y) % p
        _trim(a)
    return _trim(q)


def distinct_degree(coeffs_desc, p) -> Counter:
    """Multiset of irreducible factor degrees of a squarefree monic polynomial mod p."""
    f = _fp(coeffs_desc, p)
    degs = Counter()
    h = [0, 1]
    i = 0
    while len(f) - 1 >= 2 * (i + 1):
        i += 1
        h = _powmod(h, p, f, p)
        g = _gcd(f, _sub(h, [0, 1], p), p)
        if len(g) > 1:
            degs[i] += (len(g) - 1) // i
            f = _divide(f, g, p)
            h = _rem(h, f, p)
    if len(f) > 1:
        degs[len(f) - 1] += 1
    return degs


def _sub(a, b, p):
    n = max(len(a), len(b))
    a = a + [0] * (n - len(a))
    b = b + [0] * (n - len(b))
    return _trim([(x - y) % p for x, y in zip(a, b)])


def _subset_sums(degs: Counter) -> set[int]:
    sums = {0}
    for d, k in degs.items():
        for _ in range(k):
            sums |= {s + d for s in sums}
    return sums


def _primes():
    yield 2
    n = 3
    while True:
        if all(n % q for q in range(3, int(n**0.5) + 1, 2)):
            yield n
        n += 2


@dataclass(frozen=True)
class ScreenResult:
    """Factor-degree patterns modulo small primes not dividing the discriminant.

    ``allowed`` is the set of degrees an integer factor could have; if it is
    {0, d} the polynomial is proven irreducible.
    """

    primes: tuple[int, ...]
    patterns: tuple[tuple[int, ...], ...]
    allowed: frozenset[int]

    def proves_irreducible(self, d: int) -> bool:
        return self.allowed <= {0, d}


def mod_p_screen(p: IntPolynomial, count: int = SCREEN_PRIMES, disc: int | None = None) -> ScreenResult:
    coeffs = p.coeffs()
    d = p.degree
    disc = intpoly.discriminant(coeffs) if disc is None else disc
    if disc == 0:
        raise NotSquarefreeError(f"{p} has a repeated root")
    primes, patterns = [], []
    allowed = set(range(d + 1))
    for q in _primes():
        if len(primes) == count:
            break
        if disc % q == 0:
            continue
        degs = distinct_degree(coeffs, q)
        primes.append(q)
        patterns.append(tuple(sorted(degs.elements())))
        allowed &= _subset_sums(degs)
    return ScreenResult(tuple(primes), tuple(patterns), frozenset(allowed))


# -- subset search -----------------------------------------------------------

@dataclass(frozen=True)
class FactorCertificate:
    """Outcome of an irreducibility test.

    For ``reducible`` verdicts ``factor * cofactor == p`` has been checked
    exactly; ``subset`` holds the 0-based root indices (into the cluster's
    decreasing-modulus order) that make up ``factor``.
    """

    poly: IntPolynomial
    verdict: str
    method: str
    factor: IntPolynomial | None = None
    cofactor: IntPolynomial | None = None
    subset: tuple[int, ...] | None = None
    screen: ScreenResult | None = None
    note: str = ""

    @property
    def irreducible(self) -> bool:
        return self.verdict == IRREDUCIBLE

    @property
    def reducible(self) -> bool:
        return self.verdict == REDUCIBLE

    def to_json(self) -> dict:
        out = {"poly": [str(c) for c in self.poly.coeffs()], "verdict": self.verdict, "method": self.method}
        if self.factor is not None:
            out["factor"] = [str(c) for c in self.factor.coeffs()]
            out["cofactor"] = [str(c) for c in self.cofactor.coeffs()]
        if self.subset is not None:
            out["subset"] = [i + 1 for i in self.subset]
        if self.screen is not None:
            out["screen"] = {"primes": list(self.screen.primes), "patterns": [list(x) for x in self.screen.patterns]}
        if self.note:
            out["note"] = self.note
        return out


def _verify(p: IntPolynomial, f_coeffs: list[int]):
    q = intpoly.exact_divide(p.coeffs(), f_coeffs)
    if q is None:
        return None
    f = IntPolynomial.from_coeffs(f_coeffs)
    g = IntPolynomial.from_coeffs(q)
    assert (f * g) == p
    return f, g


def _candidate(encl: list[RatInterval], const: int):
    """Integer coefficients of prod (x - r) over the enclosures.

    Returns ``None`` if ruled out, ``"ambiguous"`` if some interval still holds
    several integers, or the descending coefficient list.
    """
    prod = encl[0]
    for r in encl[1:]:
        prod = prod * r
    ints = prod.integers()
    if len(ints) == 0:
        return None
    if len(ints) == 1:
        c = ints[0]
        if c == 0 or (const != 0 and const % c != 0):
            return None
    es = elementary_symmetric(encl)
    coeffs = [1]
    ambiguous = False
    for j, e in enumerate(es[1:], start=1):
        ints = e.integers()
        if len(ints) == 0:
            return None
        if len(ints) > 1:
            ambiguous = True
            coeffs.append(None)
            continue
        coeffs.append((-1) ** j * ints[0])
    return "ambiguous" if ambiguous else coeffs


def find_factor(p: IntPolynomial, cluster: RootCluster, max_precision: int = MAX_PRECISION):
    """Smallest-degree monic factor found by subset search, or ``None``.

    Raises ``RuntimeError`` ("deferred") if ambiguity survives ``max_precision``.
    """
    d = p.degree
    const = p.constant_term
    pending = [S for k in range(1, d // 2 + 1) for S in itertools.combinations(range(d), k)]
    while True:
        ambiguous = []
        for S in pending:
            res = _candidate([cluster.enclosures[i] for i in S], const)
            if res is None:
                continue
            if res == "ambiguous":
                ambiguous.append(S)
                continue
            hit = _verify(p, res)
            if hit is not None:
                return hit[0], hit[1], S, cluster
        if not ambiguous:
            return None
        if cluster.precision * 2 > max_precision:
            raise RuntimeError(f"subset search ambiguous at {cluster.precision} bits")
        cluster = cluster.refined(cluster.precision * 2)
        pending = ambiguous


def _rational_root_factor(p: IntPolynomial):
    const = p.constant_term
    if const == 0:
        return _verify(p, [1, 0])
    divisors = [k for k in range(1, abs(const) + 1) if const % k == 0] if abs(const) < 10**6 else [1]
    for k in divisors:
        for r in (k, -k):
            if p(r) == 0:
                return _verify(p, [1, -r])
    return None


def is_irreducible(
    p: IntPolynomial,
    roots: RootCluster | None = None,
    hints=None,
    max_precision: int = MAX_PRECISION,
    screen: bool = True,
) -> FactorCertificate:
    """Decide irreducibility of a monic integer polynomial over Z.

    Repeated roots are split off by an exact gcd.  For real-rooted input the
    root-subset search decides; a mod-p screen over the first five primes not
    dividing the discriminant must agree.  Polynomials with non-real roots are
    decided by the screen when it proves irreducibility, by the rational-root
    test in degree <= 3, and are deferred otherwise.
    """
    d = p.degree
    if d <= 1:
        return FactorCertificate(p, IRREDUCIBLE, "degree")
    coeffs = p.coeffs()
    disc = intpoly.discriminant(coeffs)
    if disc == 0:
        g = intpoly.gcd_poly(coeffs, intpoly.derivative(coeffs))
        hit = _verify(p, g)
        assert hit is not None
        return FactorCertificate(p, REDUCIBLE, "squarefree-gcd", hit[0], hit[1])
    scr = mod_p_screen(p, disc=disc) if screen else None
    if roots is None:
        roots = isolate_real_roots(p, hints)
    if not roots.certified:
        if scr is not None and scr.proves_irreducible(d):
            return FactorCertificate(p, IRREDUCIBLE, "mod-p-screen", screen=scr)
        if d <= 3:
            hit = _rational_root_factor(p)
            if hit is None:
                return FactorCertificate(p, IRREDUCIBLE, "rational-root", screen=scr)
            return FactorCertificate(p, REDUCIBLE, "rational-root", hit[0], hit[1], screen=scr)
        return FactorCertificate(p, DEFERRED, "subset-search", screen=scr, note="non-real roots")
    try:
        found = find_factor(p, roots, max_precision)
    except RuntimeError as exc:
        return FactorCertificate(p, DEFERRED, "subset-search", screen=scr, note=str(exc))
    if found is None:
        if scr is not None and not scr.allowed <= set(range(d + 1)):
            raise AssertionError("screen produced impossible degrees")
        return FactorCertificate(p, IRREDUCIBLE, "subset-search", screen=scr)
    f, g, S, _ = found
    if scr is not None and f.degree not in scr.allowed:
        raise AssertionError(f"factor degree {f.degree} contradicts the mod-p screen for {p}")
    return FactorCertificate(p, REDUCIBLE, "subset-search", f, g, S, scr)


def factor_over_roots(p: IntPolynomial, cluster: RootCluster | None = None, max_precision: int = MAX_PRECISION) -> list[IntPolynomial]:
    """Complete factorisation of a squarefree real-rooted monic polynomial.

    Factors are returned in the order found (each is irreducible because the
    search always takes a smallest subset first).
    """
    if cluster is None:
        cluster = isolate_real_roots(p)
    if not cluster.certified:
        raise ValueError(f"{p} does not have all real roots")
    found = find_factor(p, cluster, max_precision)
    if found is None:
        return [p]
    f, g, S, cluster = found
    rest = tuple(e for i, e in enumerate(cluster.enclosures) if i not in S)
    sub = RootCluster(g, rest, True, cluster.precision)
    return [f] + factor_over_roots(g, sub, max_precision)


# -- censuses -------------------------------------------------------------------

def _box_polys(box: CoeffBox, mode: str, k: int | None, seed: int | None, cap: int):
    if box.count == 0:
        raise BoxError("empty box")
    if mode == "exhaustive":
        return enumerate_box(box, cap)
    if mode == "sample":
        if k is None or seed is None:
            raise ValueError("sample mode needs k and seed")
        return sample_box(box, k, seed)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass
class IrreducibleCensus:
    total: int = 0
    irreducible: int = 0
    reducible: int = 0
    deferred: int = 0
    by_shape: Counter = field(default_factory=Counter)
    methods: Counter = field(default_factory=Counter)

    @property
    def fraction(self) -> float:
        """Irreducible share among decided polynomials (deferred excluded)."""
        decided = self.irreducible + self.reducible
        return self.irreducible / decided if decided else float("nan")

    def add(self, cert: FactorCertificate):
        self.total += 1
        self.methods[cert.method] += 1
        if cert.verdict == IRREDUCIBLE:
            self.irreducible += 1
        elif cert.verdict == REDUCIBLE:
            self.reducible += 1
            self.by_shape[cert.factor.degree] += 1
        else:
            self.deferred += 1

    def merge(self, other: "IrreducibleCensus") -> "IrreducibleCensus":
        return IrreducibleCensus(
            self.total + other.total,
            self.irreducible + other.irreducible,
            self.reducible + other.reducible,
            self.deferred + other.deferred,
            self.by_shape + other.by_shape,
            self.methods + other.methods,
        )


def certify_box_poly(p: IntPolynomial, box: CoeffBox, screen: bool = True) -> FactorCertificate:
    hints = model_hints(box.direction, box.m, box.T)
    try:
        cluster = isolate_real_roots(p, hints)
    except NotSquarefreeError:
        cluster = None
    return is_irreducible(p, cluster, screen=screen)


def irreducible_fraction(
    box: CoeffBox,
    mode: str = "exhaustive",
    k: int | None = None,
    seed: int | None = None,
    cap: int = 10**8,
    screen: bool = True,
) -> IrreducibleCensus:
    """Irreducible share of the box (exhaustively or over k seeded samples).

    ``by_shape`` counts reducible polynomials by the degree of the smallest
    factor found, i.e. by the size of the root subset S.
    """
    census = IrreducibleCensus()
    for p in _box_polys(box, mode, k, seed, cap):
        census.add(certify_box_poly(p, box, screen))
    return census


CLASS_PAIR = "f*f_star"
CLASS_PRODUCT = "reciprocal_product"
CLASS_OTHER = "other"


def reciprocal_blocks(factors: Iterable[IntPolynomial]) -> list[tuple[IntPolynomial, ...]]:
    """Group irreducible factors into self-reciprocal factors and pairs {f, f*}."""
    pool = list(factors)
    blocks = []
    while pool:
        f = pool.pop(0)
        if f.is_reciprocal():
            blocks.append((f,))
            continue
        star = f.reversal()
        if star in pool:
            pool.remove(star)
            blocks.append((f, star))
        else:
            blocks.append((f,))
    return blocks


def classify_reciprocal(p: IntPolynomial, factors: list[IntPolynomial]) -> str:
    """'irreducible', 'f*f_star' (one pair block), 'reciprocal_product' (>= 2 blocks) or 'other'."""
    if len(factors) == 1:
        return IRREDUCIBLE
    blocks = reciprocal_blocks(factors)
    if any(len(b) == 1 and not b[0].is_reciprocal() for b in blocks):
        return CLASS_OTHER
    if len(blocks) == 1:
        return CLASS_PAIR
    return CLASS_PRODUCT


@dataclass
class ReciprocalCensus:
    total: int = 0
    classes: Counter = field(default_factory=Counter)
    examples: dict = field(default_factory=dict)

    @property
    def reducible(self) -> int:
        return self.total - self.classes[IRREDUCIBLE] - self.classes[DEFERRED]


def reciprocal_factor_census(
    box: CoeffBox,
    mode: str = "exhaustive",
    k: int | None = None,
    seed: int | None = None,
    cap: int = 10**8,
) -> ReciprocalCensus:
    """Classify the polynomials of an Sp box by how they factor into reciprocal blocks."""
    if box.group is not Group.SP:
        raise BoxError("reciprocal census needs an Sp box")
    census = ReciprocalCensus()
    hints = model_hints(box.direction, box.m, box.T)
    for p in _box_polys(box, mode, k, seed, cap):
        census.total += 1
        try:
            cluster = isolate_real_roots(p, hints)
        except NotSquarefreeError:
            census.classes[DEFERRED] += 1
            continue
        if not cluster.certified:
            census.classes[DEFERRED] += 1
            continue
        try:
            factors = factor_over_roots(p, cluster)
        except RuntimeError:
            census.classes[DEFERRED] += 1
            continue
        cls = classify_reciprocal(p, factors)
        census.classes[cls] += 1
        census.examples.setdefault(cls, p)
    return census
