from fractions import Fraction as Q

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ild.numerics import (Interval, IntervalSet, RatSyntaxError, fmt_rat, interval_ops,
                          parse_rat, set_insert)


def I(a, b):
    return Interval(Q(a), Q(b))


def test_intersection_and_hull():
    assert interval_ops(I(0, Q(1, 2)), I(Q(1, 3), 1)).intersection == I(Q(1, 3), Q(1, 2))
    assert interval_ops(I(0, Q(1, 3)), I(Q(2, 3), 1)).intersection is None
    assert interval_ops(I(0, Q(1, 4)), I(Q(1, 2), 1)).hull == I(0, 1)


def test_contains_triple():
    ops = interval_ops(I(0, Q(1, 2)), I(Q(1, 4), Q(3, 4)))
    assert ops.contains == (True, False, False)
    assert interval_ops(I(0, 1), I(Q(1, 4), Q(3, 4))).contains == (True, True, True)


def test_set_insert_merges_adjacent():
    assert set_insert(IntervalSet(), I(0, Q(1, 2))).parts == (I(0, Q(1, 2)),)
    assert set_insert(IntervalSet([I(0, Q(1, 3))]), I(Q(1, 3), Q(1, 2))).parts == (I(0, Q(1, 2)),)
    s = IntervalSet([I(0, Q(1, 4)), I(Q(1, 2), 1)])
    assert set_insert(s, I(Q(1, 4), Q(1, 2))).parts == (I(0, 1),)


def test_empty_interval_rejected():
    with pytest.raises(ValueError):
        I(Q(1, 2), Q(1, 3))


@pytest.mark.parametrize("text,value", [("1/2", Q(1, 2)), ("-3/6", Q(-1, 2)), ("7", Q(7)), (" 2/4 ", Q(1, 2))])
def test_parse_rat(text, value):
    assert parse_rat(text) == value


@pytest.mark.parametrize("text", ["0.5", "1e3", "1/0", "a/b", "1//2", ""])
def test_parse_rat_rejects(text):
    with pytest.raises(RatSyntaxError):
        parse_rat(text)


def test_decimal_hint_names_the_fraction():
    with pytest.raises(RatSyntaxError, match="1/4"):
        parse_rat("0.25")


rats = st.fractions(min_value=0, max_value=1, max_denominator=64)
intervals = st.tuples(rats, rats).map(lambda t: Interval(min(t), max(t)))


@given(st.fractions(max_denominator=10**6))
def test_fmt_parse_roundtrip(x):
    assert parse_rat(fmt_rat(x)) == x


@given(st.lists(intervals, max_size=8))
def test_interval_set_is_canonical(parts):
    s = IntervalSet(parts)
    for a, b in zip(s.parts, s.parts[1:]):
        assert a.hi < b.lo
    # same point set: every endpoint of the inputs is covered, and every part is a union of inputs
    for p in parts:
        assert s.covers(p)
    for p in s.parts:
        assert p.lo in {q.lo for q in parts} and p.hi in {q.hi for q in parts}


@given(st.lists(intervals, max_size=6), intervals)
def test_insert_matches_union(parts, a):
    s = IntervalSet(parts)
    assert set_insert(s, a).parts == IntervalSet(list(parts) + [a]).parts
    assert set_insert(set_insert(s, a), a).parts == set_insert(s, a).parts


@given(st.lists(intervals, max_size=6), rats)
def test_membership_and_distance(parts, x):
    s = IntervalSet(parts)
    inside = any(x in p for p in parts)
    assert (x in s) == inside
    if parts:
        d = min(max(p.lo - x, x - p.hi, 0) for p in parts)
        assert s.distance(x) == d


@given(intervals, intervals)
def test_ops_consistent(a, b):
    ops = interval_ops(a, b)
    assert ops.hull.contains_interval(a) and ops.hull.contains_interval(b)
    if ops.intersection is not None:
        assert a.contains_interval(ops.intersection) and b.contains_interval(ops.intersection)
    else:
        assert a.hi < b.lo or b.hi < a.lo


@given(st.fractions(), st.fractions())
def test_arithmetic_roundtrips(a, b):
    assert (a + b) - b == a
    if b != 0:
        assert (a * b) / b == a
    assert (a < b) == (b - a > 0)


@given(st.lists(intervals, max_size=8), st.randoms())
def test_insert_order_irrelevant(parts, rnd):
    s = IntervalSet()
    for p in parts:
        s = set_insert(s, p)
    shuffled = list(parts)
    rnd.shuffle(shuffled)
    t = IntervalSet()
    for p in shuffled:
        t = set_insert(t, p)
    assert s.parts == t.parts
