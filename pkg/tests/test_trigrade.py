from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from motext.trigrade import (H0, H1, P, PH1, TAU, TriDegree, Plane, h_degree, parse_degree,
                             periodicity_degree, strictly_above)

ints = st.integers(-50, 50)
degs = st.builds(TriDegree, ints, ints, ints)


def test_addition_examples():
    assert TriDegree(1, 1, 1) + TriDegree(1, 1, 1) == TriDegree(2, 2, 2)
    assert TriDegree(3, 3, 5) + P == TriDegree(11, 7, 9)
    assert TriDegree(0, 0, 0) + TriDegree(4, -2, 7) == TriDegree(4, -2, 7)


def test_named_degrees():
    assert TAU == TriDegree(0, 0, -1)
    assert H0 == h_degree(0) == TriDegree(0, 1, 0)
    assert H1 == h_degree(1) == TriDegree(1, 1, 1)
    assert h_degree(3) == TriDegree(7, 1, 4)
    assert PH1 == P + H1
    assert periodicity_degree(2) == P


def test_internal_degree():
    assert TriDegree(3, 2, 1).t == 5
    assert TriDegree(-4, -1, 0).t == -5


def test_plane_membership():
    may = Plane(Fraction(1, 5), 0, Fraction(12, 5))
    adams = Plane(Fraction(1, 2), 0, Fraction(3, 2))
    assert not may.contains(TriDegree(3, 3, 5))      # on the plane
    assert not adams.contains(TriDegree(0, 1, 0))
    assert may.contains(TriDegree(9, 5, 5))
    assert strictly_above(TriDegree(9, 5, 5), may)


def test_plane_rejects_unknown_intercept():
    with pytest.raises(ValueError):
        Plane(Fraction(1, 5), 0, None).contains(TriDegree(0, 0, 0))


def test_parse_degree():
    assert parse_degree("(3,-1,2)") == TriDegree(3, -1, 2)
    assert parse_degree(" 9, 5 ,5 ") == TriDegree(9, 5, 5)
    with pytest.raises(ValueError):
        parse_degree("1,2")


@given(degs, degs, degs)
def test_addition_is_associative_and_commutative(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a


@given(degs, st.integers(0, 20))
def test_plane_strictness_is_exact(d, c):
    p = Plane(Fraction(1, 3), Fraction(1, 7), c)
    boundary = p.value(d)
    assert p.contains(d) == (d.f > boundary)
