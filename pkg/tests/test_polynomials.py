from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from scring.polynomials import GF2, QQ, Polynomial, format_polynomial, parse_polynomial
from scring.words import Alphabet

from conftest import words

A = Alphabet(["x", "y"])


def test_parse_format_round_trip():
    text = "1*x.y - 1/2*x + 3*1"
    p = parse_polynomial(text, A, QQ)
    assert p.coeff((1, 2)) == 1 and p.coeff((1,)) == Fraction(-1, 2) and p.coeff(()) == 3
    assert parse_polynomial(format_polynomial(p, A), A, QQ) == p


def test_parse_errors():
    for bad in ("", "x", "1*x 1*y", "1*x.x^-1", "a*x"):
        with pytest.raises(ValueError):
            parse_polynomial(bad, A, QQ)
    assert parse_polynomial("0", A, QQ).is_zero()


def test_gf2_arithmetic():
    p = parse_polynomial("1*x + 1*y", A, GF2)
    assert (p + p).is_zero()
    assert (-p) == p
    with pytest.raises(ValueError):
        GF2.coerce(Fraction(1, 2))


def test_shift_cancels():
    p = parse_polynomial("1*x.y - 1*1", A, QQ)
    q = p.shift(left=(-1,))
    assert q == parse_polynomial("1*y - 1*x^-1", A, QQ)


def test_symbolic_names():
    names = {"R": (1, 2, 1)}
    p = parse_polynomial("1*R - 1*1", A, QQ, names=names)
    assert p.coeff((1, 2, 1)) == 1
    q = parse_polynomial("1*x^-1.R", A, QQ, names=names)
    assert (2, 1) in q


coeffs = st.fractions(min_value=-3, max_value=3, max_denominator=4)
polys = st.lists(st.tuples(words(2, 5), coeffs), max_size=5).map(lambda t: Polynomial(QQ, t))


@given(polys, polys, polys)
def test_ring_laws(p, q, r):
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert (p - p).is_zero()


@given(polys)
def test_no_zero_coefficients(p):
    assert all(c != 0 for c in (p * p).terms.values())
