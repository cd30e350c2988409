import random

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from direntropy import intpoly
from direntropy.intpoly import IntPolynomial

x = sympy.symbols("x")
coeff_lists = st.lists(st.integers(-30, 30), min_size=1, max_size=7)


def sym(c):
    return sympy.Poly(c, x)


def sylvester_det(a, b):
    """Resultant as the determinant of the Sylvester matrix (rows of a first)."""
    a, b = intpoly.strip(list(a)), intpoly.strip(list(b))
    m, n = len(a) - 1, len(b) - 1
    size = m + n
    rows = []
    for i in range(n):
        rows.append([0] * i + a + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + b + [0] * (size - n - 1 - i))
    if size == 0:
        return 1
    return int(sympy.Matrix(rows).det())


def test_alternating_convention():
    p = IntPolynomial((3, 1))
    assert p.coeffs() == [1, -3, 1]
    assert IntPolynomial.from_coeffs([1, -4, 3, -1]).a == (4, 3, 1)
    assert str(IntPolynomial.from_coeffs([1, 0, -1, 0])) == "x^3 - x"
    assert IntPolynomial.from_roots([1, 2]).coeffs() == [1, -3, 2]
    with pytest.raises(ValueError):
        IntPolynomial.from_coeffs([2, 1])


@given(coeff_lists)
def test_discriminant_matches_sympy(tail):
    c = [1] + tail
    if len(c) < 2:
        return
    assert intpoly.discriminant(c) == int(sympy.discriminant(sym(c)))


@given(coeff_lists, coeff_lists)
def test_resultant_matches_sylvester(a, b):
    a, b = [1] + a, [1] + b
    assert intpoly.resultant(a, b) == sylvester_det(a, b)


def test_resultant_is_product_over_roots():
    # Res(x - 3, g) = g(3), whichever degree g has
    for g in ([1, 0], [1, 0, 0, 0], [1, -3, 3, 1], [2, 5, -1]):
        assert intpoly.resultant([1, -3], g) == intpoly.horner(g, 3)


def test_resultant_nonmonic():
    rng = random.Random(3)
    for _ in range(100):
        a = [rng.randint(-9, 9) or 1 for _ in range(rng.randint(2, 6))]
        b = [rng.randint(-9, 9) or 2 for _ in range(rng.randint(2, 6))]
        assert intpoly.resultant(a, b) == sylvester_det(a, b)


def test_discriminant_examples():
    assert intpoly.discriminant([1, -3, 1]) == 5
    assert intpoly.discriminant([1, -2, 1]) == 0
    assert intpoly.discriminant([1, 0, -1, 0]) == 4


@given(coeff_lists)
def test_squarefree_decomposition_reassembles(tail):
    c = [1] + tail
    if len(c) < 2:
        return
    p = intpoly.mul(intpoly.mul(c, c), [1, -1])
    parts = intpoly.squarefree_decomposition(p)
    prod = [1]
    for f, k in parts:
        assert intpoly.discriminant(f) != 0 or len(f) == 2
        for _ in range(k):
            prod = intpoly.mul(prod, f)
    assert prod == p


def test_reversal_and_reciprocal():
    f = IntPolynomial.from_coeffs([1, -1, -1])
    assert f.reversal().coeffs() == [1, 1, -1]
    assert (f * f.reversal()).coeffs() == [1, 0, -3, 0, 1]
    assert (f * f.reversal()).is_reciprocal()


def test_gcd_and_exact_divide():
    a = intpoly.mul([1, -3, 1], [1, 2])
    b = intpoly.mul([1, -3, 1], [1, 5])
    assert intpoly.gcd_poly(a, b) == [1, -3, 1]
    assert intpoly.exact_divide(a, [1, 2]) == [1, -3, 1]
    assert intpoly.exact_divide(a, [1, 3]) is None
