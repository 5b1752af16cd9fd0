from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, strategies as st

from avh.arithpoly import (
    DimensionError,
    Polynomial,
    format_poly,
    monomial_basis,
    multi_binomial,
    parse_poly,
    poly_mul,
    poly_partial,
    q_str,
)
from strategies import polys


def P(text, n=2):
    return parse_poly(text, n)


def test_poly_mul_examples():
    assert poly_mul(P("x1"), P("x2")) == P("x1 x2")
    assert poly_mul(P("x1 + 1", 1), P("x1 - 1", 1)) == P("x1^2 - 1", 1)
    assert poly_mul(P("2 x1 + 3"), P("x1^2")) == P("2 x1^3 + 3 x1^2")


def test_poly_partial_examples():
    assert poly_partial(P("x1^2 x2"), 0) == P("2 x1 x2")
    assert poly_partial(P("x1^3"), 1) == Polynomial.zero(2)
    assert poly_partial(P("x1^3 + x1", 1), 0) == P("3 x1^2 + 1", 1)


def test_partial_rejects_bad_index():
    with pytest.raises(IndexError):
        P("x1").partial(2)


def test_mixed_dimensions_rejected():
    with pytest.raises(DimensionError):
        P("x1", 1) * P("x1", 2)


def test_multi_binomial_examples():
    assert multi_binomial((2, 1), (1, 1)) == 2
    assert multi_binomial((3, 2), (3, 2)) == 1
    assert multi_binomial((1, 1), (2, 0)) == 0


def test_monomial_basis_examples():
    assert monomial_basis(2, 1) == [(0, 0), (1, 0), (0, 1)]
    assert len(monomial_basis(2, 3)) == 10
    assert monomial_basis(1, 0) == [(0,)]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_monomial_count(n):
    for d in range(9):
        assert len(monomial_basis(n, d)) == comb(d + n, n)


def test_parse_format_roundtrip():
    p = P("3/2 x1^2 x2 - x2 + 7")
    assert parse_poly(format_poly(p), 2) == p
    assert q_str(Fraction(-3, 4)) == "-3/4"
    assert q_str(Fraction(5)) == "5"


def test_divide_exact():
    f = P("x1 + 1")
    assert (f * P("x2^2 - x1")).divide_exact(f) == P("x2^2 - x1")
    assert P("x2").divide_exact(f) is None


@given(polys(2), polys(2), polys(2))
def test_ring_axioms(f, g, h):
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f * g == g * f


@given(polys(3), polys(3), st.integers(0, 2))
def test_product_rule(f, g, i):
    assert poly_partial(poly_mul(f, g), i) == poly_partial(f, i) * g + f * poly_partial(g, i)


@given(polys(2), polys(2))
def test_evaluation_is_a_homomorphism(f, g):
    pt = (Fraction(2, 3), Fraction(-5))
    assert (f * g).evaluate(pt) == f.evaluate(pt) * g.evaluate(pt)
