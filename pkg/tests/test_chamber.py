from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from direntropy.chamber import (
    Direction,
    Group,
    SignPattern,
    check_pattern,
    extremal_direction,
    min_zero_sum_deficit,
    partition_deficit,
    proper_partitions,
    reciprocal_deficit,
    rho_sl,
    rho_sp,
)
from direntropy.errors import DirectionError

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def sl_directions(draw, n_min=2, n_max=6):
    n = draw(st.integers(n_min, n_max))
    xs = draw(st.lists(fractions, min_size=n, max_size=n, unique=True))
    xs = sorted(xs, reverse=True)
    mean = sum(xs) / n
    return Direction.sl(*(x - mean for x in xs))


@st.composite
def sp_directions(draw):
    n = draw(st.integers(1, 5))
    xs = draw(st.lists(st.fractions(min_value=Fraction(1, 12), max_value=20, max_denominator=12), min_size=n, max_size=n, unique=True))
    return Direction.sp(*sorted(xs, reverse=True))


@st.composite
def zero_block_directions(draw):
    """A strictly decreasing v with a split into two zero-sum blocks, and that split."""
    k1 = draw(st.integers(2, 3))
    k2 = draw(st.integers(2, 3))
    while True:
        a = draw(st.lists(fractions, min_size=k1, max_size=k1, unique=True))
        b = draw(st.lists(fractions, min_size=k2, max_size=k2, unique=True))
        a = [x - sum(a) / k1 for x in a]
        b = [x - sum(b) / k2 for x in b]
        if len(set(a) | set(b)) == k1 + k2:
            break
    tagged = sorted([(x, 0) for x in a] + [(x, 1) for x in b], reverse=True)
    v = Direction.sl(*(x for x, _ in tagged))
    S1 = [i for i, (_, t) in enumerate(tagged) if t == 0]
    return v, S1


def test_rho_examples():
    assert rho_sl(Direction.sl(1, -1)) == 1
    assert rho_sl(Direction.sl(1, 0, -1)) == 2
    assert rho_sl(Direction.sl(3, 1, -1, -3)) == 10
    assert rho_sp(Direction.sp(1)) == 1
    assert rho_sp(Direction.sp(2, 1)) == 5


def test_invalid_directions():
    with pytest.raises(DirectionError):
        Direction.sp(1, 1)
    with pytest.raises(DirectionError):
        Direction.sl(1, 1)
    with pytest.raises(DirectionError):
        Direction.sl(2, -1)
    with pytest.raises(DirectionError):
        Direction.sp(1, -1)
    with pytest.raises(DirectionError):
        Direction.sl(1)


def test_full_vector_is_mirrored():
    assert Direction.sp(2, 1).full() == (2, 1, -1, -2)
    assert Direction.sp(2, 1).degree == 4


def test_sign_patterns():
    m = SignPattern.parse("+,-,-")
    assert m.signs == (1, -1, -1)
    assert m.prefix_products() == (1, -1, 1)
    assert m.product == 1
    with pytest.raises(DirectionError):
        check_pattern(Direction.sl(1, 0, -1), "+,-,+", realizable=True)
    with pytest.raises(DirectionError):
        check_pattern(Direction.sl(1, -1), "+,+,+")
    with pytest.raises(DirectionError):
        SignPattern.parse("+,x")


@given(sl_directions())
def test_rho_two_forms_agree(v):
    n = v.n
    weighted = sum((n - i) * c for i, c in enumerate(v.coords, start=1))
    pairwise = Fraction(1, 2) * sum(v.coords[i] - v.coords[j] for i in range(n) for j in range(i + 1, n))
    assert rho_sl(v) == weighted == pairwise


@given(sl_directions(), st.fractions(min_value=Fraction(1, 10), max_value=10, max_denominator=10))
def test_rho_sl_homogeneous(v, c):
    assert rho_sl(v.scaled(c)) == c * rho_sl(v)


@given(sp_directions(), st.fractions(min_value=Fraction(1, 10), max_value=10, max_denominator=10))
def test_rho_sp_homogeneous(v, c):
    assert rho_sp(v.scaled(c)) == c * rho_sp(v)


@pytest.mark.parametrize("n", range(2, 9))
def test_extremal_values(n):
    e = extremal_direction("euclidean", n)
    assert e.rho.square() * 12 == n * (n * n - 1)
    # unit Euclidean norm, exactly
    assert sum(c.square() for c in e.coords) == 1
    # rho of the unit vector equals the claimed maximum (squared, exactly)
    assert sum((n - i) * e.coords[i - 1].coeff for i in range(1, n + 1)) ** 2 * e.coords[0].radicand == e.rho.square()
    mx = extremal_direction("max", n)
    assert mx.rho.square() == (n * n // 4) ** 2
    assert sum((n - i) * c.coeff for i, c in enumerate(mx.coords, start=1)) == n * n // 4
    assert max(abs(c.coeff) for c in mx.coords) == 1 and sum(c.coeff for c in mx.coords) == 0


def test_max_extremal_on_a_wall_for_n4():
    # (1, 1, -1, -1) is not in the open chamber
    with pytest.raises(DirectionError):
        extremal_direction("max", 4).direction()


def test_extremal_examples():
    assert abs(float(extremal_direction("euclidean", 2).rho) - 0.70711) < 1e-5
    assert extremal_direction("max", 4).rho.coeff == 4
    mx = extremal_direction("max", 3)
    assert mx.direction().coords == (1, 0, -1)
    assert mx.rho.coeff == 2


def test_max_norm_extremal_beats_vertices():
    # rho is linear, so its maximum on the max-norm ball (intersected with H) is at a vertex
    import itertools

    for n in range(2, 7):
        best = Fraction(0)
        for signs in itertools.product((-1, 0, 1), repeat=n):
            if sum(signs) == 0:
                best = max(best, sum((n - i) * s for i, s in enumerate(signs, start=1)))
        assert best == n * n // 4


def test_partition_deficit_examples():
    v = Direction.sl(3, 1, -1, -3)
    pd = partition_deficit(v, [0, 3])
    assert pd.deficit == 6 and pd.zero_block_sums
    pd = partition_deficit(Direction.sl(2, 1, -1, -2), [0, 3])
    assert pd.deficit == 4
    pd = partition_deficit(Direction.sl(1, -1), [0])
    assert not pd.zero_block_sums
    with pytest.raises(DirectionError):
        partition_deficit(v, [])
    with pytest.raises(DirectionError):
        partition_deficit(v, [0, 1, 2, 3])


def test_deficit_is_rhs_minus_lhs():
    # D = sum_{i<j} v_i - (same sum restricted to pairs inside one block)
    v = Direction.sl(3, 1, -1, -3)
    rhs = sum(v.coords[i] for i in range(4) for j in range(i + 1, 4))
    lhs = v.coords[0] + v.coords[1]  # pairs inside {1,4} and {2,3}
    assert rhs == 10 and lhs == 4
    assert partition_deficit(v, [0, 3]).deficit == rhs - lhs


@given(zero_block_directions())
def test_deficit_positive_on_zero_sum_blocks(case):
    v, S1 = case
    pd = partition_deficit(v, S1)
    assert pd.zero_block_sums
    assert pd.deficit > 0


def test_proper_partitions_enumerates_each_split_once():
    splits = list(proper_partitions(4))
    assert len(splits) == 2 ** 3 - 1
    assert all(0 in s for s in splits)


def test_min_zero_sum_deficit():
    assert min_zero_sum_deficit(Direction.sl(1, 0, -1)) == 1
    assert min_zero_sum_deficit(Direction.sl(1, -1)) is None
    assert min_zero_sum_deficit(Direction.sl(3, 1, -1, -3)) == 6


def test_reciprocal_deficit_positive():
    v = Direction.sp(2, 1)
    # {u1}={2}, {u2}={1}: rho(v) = 5, rho(2) = 2, rho(1) = 1
    assert reciprocal_deficit(v, [0]) == 2
    assert Group.parse("sp") is Group.SP
