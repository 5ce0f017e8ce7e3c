import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tropbuild.tropcore import (
    INF,
    TropPoint,
    fmt_trop,
    min_attained_twice,
    normalize,
    project_coords,
    shift,
    tadd,
    tmul,
    trop_value,
)

tval = st.one_of(st.just(INF), st.fractions(min_value=-20, max_value=20, max_denominator=6))
points = st.lists(tval, min_size=1, max_size=6).filter(lambda u: any(x != INF for x in u))


def test_semiring_operations():
    assert tadd(3, INF) == 3 and tadd(INF, INF) == INF
    assert tmul(3, INF) == INF and tmul(Fraction(1, 2), 2) == Fraction(5, 2)


def test_trop_value_coercion():
    assert trop_value("inf") == INF
    assert trop_value("3/6") == Fraction(1, 2)
    assert trop_value(Fraction(4, 2)) == 2 and isinstance(trop_value(Fraction(4, 2)), int)
    with pytest.raises(TypeError):
        trop_value(0.5)
    with pytest.raises(TypeError):
        trop_value(True)


def test_min_attained_twice_examples():
    assert min_attained_twice([0, 0, 1])
    assert not min_attained_twice([-1, 0, 0])
    assert min_attained_twice([INF, INF])
    with pytest.raises(ValueError):
        min_attained_twice([])


def test_normalize_examples():
    assert tuple(normalize([3, 4, INF])) == (0, 1, INF)
    assert tuple(normalize([0, 0, 0])) == (0, 0, 0)
    assert tuple(normalize([INF, 2, 5])) == (INF, 0, 3)
    with pytest.raises(ValueError):
        normalize([INF, INF])


def test_project_coords_examples():
    assert tuple(project_coords(normalize([0, 1, INF]), [0, 1])) == (0, 1)
    with pytest.raises(ValueError):
        project_coords(normalize([0, INF, INF]), [1, 2])
    assert tuple(project_coords(normalize([0, 1, 5]), [1, 2])) == (0, 4)


@given(points, st.fractions(min_value=-10, max_value=10, max_denominator=5))
def test_normalize_idempotent_and_class_constant(u, c):
    p = normalize(u)
    assert normalize(p) == p
    assert normalize(shift(u, c)) == p
    first = next(x for x in p if x != INF)
    assert first == 0


@given(points, st.data())
def test_project_commutes_with_normalize(u, data):
    S = data.draw(st.sets(st.integers(0, len(u) - 1), min_size=1))
    if all(u[i] == INF for i in S):
        return
    assert project_coords(normalize(u), S) == project_coords(TropPoint(tuple(u)), S)


@given(st.lists(tval, min_size=1, max_size=6), st.fractions(min_value=-10, max_value=10, max_denominator=5))
def test_min_attained_twice_shift_invariant(vals, c):
    assert min_attained_twice(vals) == min_attained_twice([x if x == INF else x + c for x in vals])


def test_point_accessors():
    p = normalize([2, INF, 3])
    assert p.support() == (0, 2) and p.infinite_set() == {1}
    assert not p.is_finite()
    assert fmt_trop(Fraction(-1, 2)) == "-1/2" and fmt_trop(INF) == "inf"
