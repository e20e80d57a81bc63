from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from apacket.halfint import HALF, HalfInt, hi


def test_parsing_and_printing():
    assert HalfInt("3/2").twice == 3
    assert HalfInt("-1/2") == -HALF
    assert str(HalfInt(4)) == "4"
    assert str(HalfInt.from_twice(-5)) == "-5/2"


def test_rejects_thirds():
    with pytest.raises(ValueError):
        HalfInt("1/3")
    with pytest.raises(ValueError):
        HalfInt(0.25)


def test_integrality():
    assert HalfInt(3).is_integral
    assert not HalfInt("7/2").is_integral
    with pytest.raises(ValueError):
        int(HalfInt("1/2"))


def test_immutable():
    h = HalfInt(1)
    with pytest.raises(AttributeError):
        h.twice = 4


@given(st.integers(-200, 200), st.integers(-200, 200))
def test_arithmetic_matches_fractions(a, b):
    x, y = HalfInt.from_twice(a), HalfInt.from_twice(b)
    fx, fy = Fraction(a, 2), Fraction(b, 2)
    assert (x + y).to_fraction() == fx + fy
    assert (x - y).to_fraction() == fx - fy
    assert (x < y) == (fx < fy)
    assert (x == y) == (fx == fy)
    assert (3 * x).to_fraction() == 3 * fx


@given(st.integers(-10**6, 10**6))
def test_hash_agrees_with_fraction(t):
    h = HalfInt.from_twice(t)
    assert hash(h) == hash(Fraction(t, 2))
    assert h == Fraction(t, 2)
    assert {h: 1}[Fraction(t, 2)] == 1


def test_hi_passthrough():
    h = HalfInt(2)
    assert hi(h) is h
    assert hi("5/2") == HalfInt.from_twice(5)
