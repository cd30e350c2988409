"""Weyl-chamber directions, sign patterns and half-sum-of-positive-roots functionals.

Two root systems are supported: type A_{n-1} (``SL``: trace-zero vectors with
strictly decreasing coordinates) and type C_n (``Sp``: a strictly decreasing
positive half-vector, the full chamber vector being its mirror image).  All
coordinates are exact rationals.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from ._numeric import as_rational
from .errors import DirectionError


class Group(str, enum.Enum):
    SL = "SL"
    SP = "Sp"

    @classmethod
    def parse(cls, s) -> "Group":
        if isinstance(s, Group):
            return s
        key = str(s).strip().lower()
        if key in ("sl", "sl_n", "sln"):
            return cls.SL
        if key in ("sp", "sp_2n", "sp2n"):
            return cls.SP
        raise DirectionError(f"unknown group {s!r}")


@dataclass(frozen=True)
class Direction:
    """A point of the open positive chamber.

    For ``SL`` the coordinates sum to zero and strictly decrease.  For ``Sp``
    ``coords`` is the half-vector ``(v_1 > ... > v_n > 0)``; use :meth:`full`
    for the mirrored chamber vector.
    """

    group: Group
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "group", Group.parse(self.group))
        coords = tuple(as_rational(c) for c in self.coords)
        object.__setattr__(self, "coords", coords)
        n = len(coords)
        if self.group is Group.SL:
            if n < 2:
                raise DirectionError("SL direction needs n >= 2")
            if sum(coords) != 0:
                raise DirectionError(f"SL direction must sum to 0, got {sum(coords)}")
        else:
            if n < 1:
                raise DirectionError("Sp direction needs n >= 1")
            if coords[-1] <= 0:
                raise DirectionError("Sp direction must have positive coordinates")
        if any(a <= b for a, b in zip(coords, coords[1:])):
            raise DirectionError(f"coordinates must be strictly decreasing: {self}")

    @classmethod
    def sl(cls, *coords) -> "Direction":
        return cls(Group.SL, tuple(coords))

    @classmethod
    def sp(cls, *coords) -> "Direction":
        return cls(Group.SP, tuple(coords))

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def degree(self) -> int:
        """Degree of the characteristic polynomials attached to this direction."""
        return self.n if self.group is Group.SL else 2 * self.n

    def full(self) -> tuple[Fraction, ...]:
        if self.group is Group.SL:
            return self.coords
        return self.coords + tuple(-c for c in reversed(self.coords))

    def partial_sums(self) -> tuple[Fraction, ...]:
        """w_i = v_1 + ... + v_i for i = 1..n."""
        return tuple(itertools.accumulate(self.coords))

    def scaled(self, c) -> "Direction":
        c = as_rational(c)
        if c <= 0:
            raise DirectionError("scale factor must be positive")
        return Direction(self.group, tuple(c * x for x in self.coords))

    def rho(self) -> Fraction:
        return rho_sl(self) if self.group is Group.SL else rho_sp(self)

    def as_floats(self) -> list[float]:
        return [float(c) for c in self.coords]

    def __str__(self) -> str:
        return f"{self.group.value}({', '.join(str(c) for c in self.coords)})"


@dataclass(frozen=True)
class SignPattern:
    """Signs m_i of the eigenvalues, ordered by decreasing modulus."""

    signs: tuple[int, ...]

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        if any(s not in (1, -1) for s in signs):
            raise DirectionError(f"signs must be +1/-1, got {signs}")
        object.__setattr__(self, "signs", signs)

    @classmethod
    def parse(cls, spec) -> "SignPattern":
        if isinstance(spec, SignPattern):
            return spec
        if isinstance(spec, str):
            items = [s.strip() for s in spec.split(",") if s.strip()]
            table = {"+": 1, "+1": 1, "1": 1, "-": -1, "-1": -1}
            try:
                return cls(tuple(table[s] for s in items))
            except KeyError as exc:
                raise DirectionError(f"bad sign {exc.args[0]!r} in {spec!r}") from None
        return cls(tuple(spec))

    @classmethod
    def positive(cls, n: int) -> "SignPattern":
        return cls((1,) * n)

    def __len__(self) -> int:
        return len(self.signs)

    def __iter__(self):
        return iter(self.signs)

    def __getitem__(self, i):
        return self.signs[i]

    @property
    def product(self) -> int:
        return math.prod(self.signs)

    def prefix_products(self) -> tuple[int, ...]:
        """M_i = m_1 * ... * m_i."""
        return tuple(itertools.accumulate(self.signs, lambda a, b: a * b))

    def __str__(self) -> str:
        return ",".join("+" if s > 0 else "-" for s in self.signs)


def check_pattern(direction: Direction, m: SignPattern, *, realizable: bool = False) -> SignPattern:
    """Validate a sign pattern against a direction.

    With ``realizable=True`` the SL constraint prod m_i = +1 is enforced.
    """
    m = SignPattern.parse(m)
    if len(m) != direction.n:
        raise DirectionError(f"sign pattern length {len(m)} != n = {direction.n}")
    if realizable and direction.group is Group.SL and m.product != 1:
        raise DirectionError("SL sign pattern must have product +1")
    return m


def rho_sl(v: Direction) -> Fraction:
    """Half-sum of positive roots of SL_n: sum (n - i) v_i."""
    if v.group is not Group.SL:
        raise DirectionError("rho_sl needs an SL direction")
    n = v.n
    weighted = sum((n - i) * c for i, c in enumerate(v.coords, start=1))
    pairwise = Fraction(1, 2) * sum(a - b for a, b in itertools.combinations(v.coords, 2))
    assert weighted == pairwise, (weighted, pairwise)
    return weighted


def rho_sp(v: Direction) -> Fraction:
    """Half-sum of positive roots of Sp_2n: sum (n + 1 - i) v_i."""
    if v.group is not Group.SP:
        raise DirectionError("rho_sp needs an Sp direction")
    n = v.n
    return sum((n + 1 - i) * c for i, c in enumerate(v.coords, start=1))


@dataclass(frozen=True)
class Surd:
    """The real number coeff * sqrt(radicand), kept exact."""

    coeff: Fraction
    radicand: Fraction

    def __post_init__(self):
        object.__setattr__(self, "coeff", as_rational(self.coeff))
        object.__setattr__(self, "radicand", as_rational(self.radicand))
        if self.radicand < 0:
            raise ValueError("negative radicand")

    def square(self) -> Fraction:
        return self.coeff ** 2 * self.radicand

    def __float__(self) -> float:
        return float(self.coeff) * math.sqrt(self.radicand)

    def __str__(self) -> str:
        if self.radicand == 1:
            return str(self.coeff)
        c = "" if self.coeff == 1 else f"{self.coeff}*"
        return f"{c}sqrt({self.radicand})"


@dataclass(frozen=True)
class ExtremalDirection:
    """Unit vector maximising rho_SL for a norm, with the maximal value."""

    norm: str
    n: int
    coords: tuple[Surd, ...]
    rho: Surd

    def as_floats(self) -> list[float]:
        return [float(c) for c in self.coords]

    def direction(self) -> Direction:
        """A rational SL direction on the same ray (not normalised for Euclidean).

        The max-norm maximiser has repeated coordinates for n >= 4 and then
        lies on a wall; constructing its Direction raises DirectionError.
        """
        if self.norm == "max":
            return Direction(Group.SL, tuple(c.coeff for c in self.coords))
        return Direction(Group.SL, tuple(Fraction(self.n + 1 - 2 * k) for k in range(1, self.n + 1)))


def extremal_direction(norm: str, n: int) -> ExtremalDirection:
    """Direction of steepest growth of rho_SL on the unit sphere of ``norm``."""
    if n < 2:
        raise DirectionError("n must be >= 2")
    norm = norm.lower()
    if norm in ("euclidean", "euc", "l2"):
        radicand = Fraction(3, n * (n * n - 1))
        coords = tuple(Surd(n + 1 - 2 * k, radicand) for k in range(1, n + 1))
        return ExtremalDirection("euclidean", n, coords, Surd(1, Fraction(n * (n * n - 1), 12)))
    if norm in ("max", "sup", "linf"):
        def sign(k):
            d = n + 1 - 2 * k
            return (d > 0) - (d < 0)

        coords = tuple(Surd(sign(k), 1) for k in range(1, n + 1))
        return ExtremalDirection("max", n, coords, Surd(n * n // 4, 1))
    raise DirectionError(f"unknown norm {norm!r}")


@dataclass(frozen=True)
class PartitionDeficit:
    S1: frozenset[int]
    S2: frozenset[int]
    deficit: Fraction
    zero_block_sums: bool


def partition_deficit(v: Direction | Sequence, S1: Iterable[int]) -> PartitionDeficit:
    """Deficit sum over cross pairs i < j (different blocks) of v_i.

    Indices are 0-based.  ``zero_block_sums`` says whether both blocks sum to
    zero, the hypothesis under which the deficit is guaranteed positive.
    """
    coords = v.coords if isinstance(v, Direction) else tuple(as_rational(c) for c in v)
    n = len(coords)
    s1 = frozenset(S1)
    if not s1 or len(s1) >= n or not s1 <= set(range(n)):
        raise DirectionError(f"S1 must be a proper non-empty subset of 0..{n - 1}")
    s2 = frozenset(range(n)) - s1
    d = sum(coords[i] for i, j in itertools.combinations(range(n), 2) if (i in s1) != (j in s1))
    zero = sum(coords[i] for i in s1) == 0 and sum(coords[i] for i in s2) == 0
    if zero and all(a > b for a, b in zip(coords, coords[1:])):
        assert d > 0, (coords, s1, d)
    return PartitionDeficit(s1, s2, d, zero)


def proper_partitions(n: int):
    """Each unordered split {S1, S2} of range(n) once (S1 holds index 0)."""
    rest = range(1, n)
    for k in range(0, n - 1):
        for extra in itertools.combinations(rest, k):
            yield frozenset((0,) + extra)


def min_zero_sum_deficit(v: Direction) -> Fraction | None:
    """Smallest deficit over partitions whose blocks both sum to zero.

    ``None`` when no such partition exists (then reducible tube polynomials are
    eventually absent altogether).
    """
    best = None
    for s1 in proper_partitions(v.n):
        pd = partition_deficit(v, s1)
        if pd.zero_block_sums and (best is None or pd.deficit < best):
            best = pd.deficit
    return best


def reciprocal_deficit(v: Direction, S1: Iterable[int]) -> Fraction:
    """rho_Sp(v) - rho_Sp(u1) - rho_Sp(u2) for the split of root pairs by S1."""
    if v.group is not Group.SP:
        raise DirectionError("reciprocal_deficit needs an Sp direction")
    s1 = sorted(set(S1))
    s2 = sorted(set(range(v.n)) - set(s1))
    if not s1 or not s2:
        raise DirectionError("both blocks must be non-empty")

    def weight(idx):
        k = len(idx)
        return sum((k - r) * v.coords[i] for r, i in enumerate(idx))

    return rho_sp(v) - weight(s1) - weight(s2)
