from math import comb

import pytest
from hypothesis import given

from avh.arithpoly import Polynomial, parse_poly
from avh.weyl import WeylElement, bernstein_subspace, format_weyl, parse_weyl, weyl_apply, weyl_commutator, weyl_mul
from strategies import polys


def W(text, n=1):
    return parse_weyl(text, n)


def weyl_elements(n, max_deg=3):
    # a polynomial in 2n variables read as x^r d^s
    return polys(2 * n, max_deg, 3).map(lambda p: WeylElement(n, {(k[:n], k[n:]): c for k, c in p.terms.items()}))


def test_mul_examples():
    assert weyl_mul(W("d1"), W("x1")) == W("x1 d1 + 1")
    assert weyl_mul(W("x1 d1"), W("x1 d1")) == W("x1^2 d1^2 + x1 d1")
    assert weyl_mul(W("d1", 2), W("x2", 2)) == W("x2 d1", 2)


def test_commutator_examples():
    assert weyl_commutator(W("d1"), W("x1")) == WeylElement.one(1)
    assert weyl_commutator(W("x1 d1"), W("x1^2 d1")) == W("x1^2 d1")
    a = W("x1^2 d1^3 - 2 x1")
    assert not weyl_commutator(a, a)


def test_apply_examples():
    x = parse_poly("x1", 1)
    assert weyl_apply(W("x1 d1"), x * x) == parse_poly("2 x1^2", 1)
    assert weyl_apply(W("d1"), Polynomial.const(1, 1)) == Polynomial.zero(1)
    assert weyl_apply(W("d1^2"), x ** 3) == parse_poly("6 x1", 1)
    assert weyl_apply(WeylElement.zero(1), x) == Polynomial.zero(1)


def test_bernstein_examples():
    assert {format_weyl(b) for b in bernstein_subspace(1, 1)} == {"1", "x1", "d1"}
    assert len(bernstein_subspace(1, 2)) == 6
    assert len(bernstein_subspace(2, 2)) == 15


@pytest.mark.parametrize("n", [1, 2, 3])
def test_bernstein_dimension(n):
    for m in range(9 if n < 3 else 6):
        assert len(bernstein_subspace(n, m)) == comb(m + 2 * n, 2 * n)


@given(weyl_elements(1), weyl_elements(1), weyl_elements(1))
def test_associativity_n1(a, b, c):
    assert weyl_mul(weyl_mul(a, b), c) == weyl_mul(a, weyl_mul(b, c))


@given(weyl_elements(2, 2), weyl_elements(2, 2), weyl_elements(2, 2))
def test_associativity_n2(a, b, c):
    assert weyl_mul(weyl_mul(a, b), c) == weyl_mul(a, weyl_mul(b, c))


@given(weyl_elements(2), weyl_elements(2), polys(2))
def test_apply_respects_products(a, b, f):
    assert weyl_apply(weyl_mul(a, b), f) == weyl_apply(a, weyl_apply(b, f))


def test_parse_format_roundtrip():
    w = W("3 x1^2 d1 d2 - 1/2 x2 + d2^3", 2)
    assert parse_weyl(format_weyl(w), 2) == w
