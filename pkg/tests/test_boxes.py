import itertools
import json
import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from direntropy.boxes import (
    CoeffBox,
    coeff_box,
    coeff_box_sl,
    coeff_box_sp,
    enumerate_box,
    exact_count,
    model_polynomial,
    sample_box,
)
from direntropy.chamber import Direction, SignPattern
from direntropy.errors import BoxError, EnumerationCapError

mp = mpmath.MPContext()
mp.dps = 80


def oracle_window(eps, q):
    """Endpoints from an 80-digit evaluation (independent of the directed-rounding code)."""
    e = mp.exp(mp.mpf(q.numerator) / q.denominator)
    f = mp.mpf(eps.numerator) / eps.denominator
    return int(mp.ceil((1 - f) * e)), int(mp.floor((1 + f) * e))


def test_sl2_box_example(sl2):
    box = coeff_box_sl(sl2, "+,+", 5, Fraction(1, 10))
    assert box.intervals == ((134, 163),)
    assert box.fixed == ((2, 1),)
    assert exact_count(box) == 30
    assert box.poly((148,)).coeffs() == [1, -148, 1]


def test_sign_flip(sl2):
    box = coeff_box_sl(sl2, "-,-", 5, Fraction(1, 10))
    assert box.intervals == ((-163, -134),)
    assert box.fixed == ((2, 1),)


def test_sp_boxes(sp4):
    box = coeff_box_sp(Direction.sp(1), "+", 5, Fraction(1, 10))
    assert box.intervals == ((134, 163),)
    assert box.poly((140,)).coeffs() == [1, -140, 1]
    box = coeff_box_sp(sp4, "+,+", 3, Fraction(1, 10))
    assert box.intervals == (oracle_window(Fraction(1, 10), Fraction(6)), oracle_window(Fraction(1, 10), Fraction(9)))
    assert box.count == math.prod(hi - lo + 1 for lo, hi in box.intervals)
    p = box.poly((400000, 8000000))
    assert p.a[2] == p.a[0] and p.a[3] == 1 and p.is_reciprocal()


@pytest.mark.parametrize("eps", [Fraction(1, 100), Fraction(1, 2), Fraction(99, 100)])
def test_constant_term_fixed_for_eps_below_one(sl2, eps):
    # [1 - eps, 1 + eps] holds only the integer 1 whenever 0 < eps < 1
    box = coeff_box_sl(sl2, "-,+", 3, eps)
    assert not box.degenerate
    assert box.fixed == ((2, -1),)


def test_empty_box(sl3):
    box = coeff_box(sl3, "+,+,+", Fraction(1, 100), Fraction(1, 2))
    # window around e^{0.01} contains 1 (fine) but the middle window is [1/2, 3/2] -> {1}
    assert box.count >= 0
    tiny = coeff_box(Direction.sl(Fraction(1, 10), Fraction(-1, 10)), "+,+", Fraction(1, 2), Fraction(1, 100))
    assert tiny.count == 0
    assert list(enumerate_box(tiny)) == []
    with pytest.raises(BoxError):
        sample_box(tiny, 3, 0)


def test_bad_eps(sl2):
    with pytest.raises(BoxError):
        coeff_box(sl2, "+,+", 5, 1)
    with pytest.raises(BoxError):
        coeff_box(sl2, "+,+", 5, 0)


@pytest.mark.parametrize("T", [1, 2, 5, Fraction(37, 4), 14, 30])
@pytest.mark.parametrize("eps", [Fraction(1, 20), Fraction(1, 10), Fraction(1, 5)])
def test_endpoints_against_oracle(T, eps, sl3):
    T = Fraction(T)
    box = coeff_box_sl(sl3, "+,-,-", T, eps)
    M = SignPattern.parse("+,-,-").prefix_products()
    for (lo, hi), q, s in zip(box.intervals, (T, T), M):
        a, b = oracle_window(eps, q)
        assert (lo, hi) == ((a, b) if s > 0 else (-b, -a))


def test_enumeration_order_and_cap(sl3):
    box = coeff_box(sl3, "+,+,+", 4, Fraction(1, 10))
    polys = list(enumerate_box(box))
    assert len(polys) == box.count
    keys = [box.point(p) for p in polys]
    assert keys == sorted(keys)
    assert all(box.contains(p) for p in polys)
    with pytest.raises(EnumerationCapError, match="sample_box"):
        enumerate_box(box, cap=box.count - 1)


def test_enumerated_points_satisfy_inequalities_at_high_precision(sp4):
    box = coeff_box(sp4, "+,-", 2, Fraction(1, 10))
    w = sp4.partial_sums()
    M = SignPattern.parse("+,-").prefix_products()
    for p in itertools.islice(enumerate_box(box), 0, None, 97):
        for i in range(2):
            e = mp.exp(2 * mp.mpf(w[i].numerator) / w[i].denominator)
            assert mp.mpf("0.9") * e <= p.a[i] * M[i] <= mp.mpf("1.1") * e


def test_sampling_is_seeded(sl3):
    box = coeff_box(sl3, "+,+,+", 8, Fraction(1, 10))
    a = sample_box(box, 50, seed=4)
    b = sample_box(box, 50, seed=4)
    c = sample_box(box, 50, seed=5)
    assert a == b and a != c
    assert all(box.contains(p) for p in a)


def test_split_partitions_box(sl3):
    box = coeff_box(sl3, "+,+,+", 5, Fraction(1, 10))
    parts = box.split(4)
    assert sum(p.count for p in parts) == box.count
    got = [q for part in parts for q in enumerate_box(part)]
    assert sorted(got, key=box.point) == list(enumerate_box(box))


def test_json_round_trip(sp4):
    box = coeff_box(sp4, "+,+", 12, Fraction(1, 10))
    rec = json.loads(json.dumps(box.to_json()))
    assert all(isinstance(x, str) for iv in rec["intervals"] for x in iv)
    assert CoeffBox.from_json(rec) == box


def test_model_polynomial_examples(sl2, sl3):
    q = model_polynomial(sl2, "+,+", 0)
    assert [float(b) for b in q.b] == [2.0, 1.0]
    q = model_polynomial(sl2, "+,+", 1, precision=128)
    assert abs(q.b[0] - (mp.e + 1 / mp.e)) < mp.mpf(2) ** -60
    q = model_polynomial(sl3, "+,-,+", 1)
    assert q.b[2] == -1


@given(st.integers(0, 40), st.sampled_from([64, 128, 256]))
def test_model_polynomial_accuracy(T, prec):
    v = Direction.sl(3, 1, -1, -3)
    q = model_polynomial(v, "+,+,-,-", T, precision=prec)
    roots = [mp.exp(T * c) * s for c, s in zip((3, 1, -1, -3), (1, 1, -1, -1))]
    # elementary symmetric functions via an 80-digit product expansion
    coeffs = [mp.mpf(1)]
    for r in roots:
        coeffs = [a - r * b for a, b in zip(coeffs + [0], [0] + coeffs)]
    for i, b in enumerate(q.b, start=1):
        true = (-1) ** i * coeffs[i]
        assert abs(b - true) <= mp.mpf(2) ** (-prec // 2) * abs(true) + mp.mpf(10) ** -60


def test_model_coefficients_inside_box_for_large_T(sl3):
    for T in (6, 10, 20):
        box = coeff_box(sl3, "+,+,+", T, Fraction(1, 10))
        q = model_polynomial(sl3, "+,+,+", T)
        for (lo, hi), b in zip(box.intervals, q.b):
            assert lo < b < hi
