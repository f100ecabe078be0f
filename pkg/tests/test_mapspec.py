from fractions import Fraction as Q

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ild.mapspec import (ConsistencyError, OrbitSpec, ParseError, document_of, parse_map,
                         parse_orbit, serialize)
from ild.plmap import SpecError, gallery_map
from mapgen import pl_maps

T2 = gallery_map("t2")


def test_parse_tent():
    doc = parse_map("map t2\npoint 0 0\npoint 1/2 1\npoint 1 0")
    assert doc.to_map() == T2
    assert doc.name == "t2"


def test_comments_metadata_and_order():
    doc = parse_map("# tent\nmap t\nmeta source hand typed\npoint 1 0\npoint 0 0  # left\npoint 1/2 1\n")
    assert doc.metadata == {"source": "hand typed"}
    assert doc.to_map() == T2


def test_not_surjective():
    with pytest.raises(SpecError, match="never attained"):
        parse_map("map bad\npoint 0 0\npoint 1 1/2")


def test_zero_denominator_position():
    with pytest.raises(ParseError) as e:
        parse_map("map z\npoint 1/0 0")
    assert "zero denominator" in e.value.message
    assert (e.value.line, e.value.column) == (2, 9)


@pytest.mark.parametrize("text,line", [
    ("point 0 0", 1),
    ("map a\nmap b", 2),
    ("map a\npoint 0", 2),
    ("map a\nwibble 1", 2),
    ("map a\npoint 0.5 1", 2),
    ("map a\nmeta k v\nmeta k w", 3),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as e:
        parse_map(text)
    assert e.value.line == line


@given(pl_maps())
def test_serialize_roundtrip(f):
    doc = document_of(f, "m")
    text = serialize(doc)
    again = parse_map(text)
    assert again.to_map() == f
    assert serialize(again) == text


def test_orbit_fixed_endpoint():
    o = parse_orbit("0 | cycle: 0", T2)
    assert o.coords(5) == [0] * 5 and o.infinite


def test_orbit_two_cycle():
    u2 = gallery_map("u2")
    o = parse_orbit("1/2, 1 | cycle: 1/2, 1", u2)
    assert o.coords(6) == [Q(1, 2), 1] * 3


def test_orbit_inconsistent_link():
    with pytest.raises(ConsistencyError) as e:
        parse_orbit("1/2, 1/3", T2)
    assert e.value.k == 1


def test_orbit_cycle_seam_checked():
    with pytest.raises(ConsistencyError) as e:
        parse_orbit("1/2 | cycle: 1/2", T2)
    assert e.value.k == 1


def test_orbit_syntax():
    with pytest.raises(ParseError):
        parse_orbit("1/2, , 1")
    with pytest.raises(ParseError):
        parse_orbit("1/2 | loop: 1")
    with pytest.raises(ParseError):
        parse_orbit("")


def test_orbit_shift_and_str():
    o = OrbitSpec((Q(1, 2),), (Q(1, 3), Q(2, 3)))
    assert o.shift(2).coords(3) == [Q(2, 3), Q(1, 3), Q(2, 3)]
    assert str(o) == "1/2 | cycle: 1/3, 2/3"
    assert parse_orbit(str(o)) == o


GOOD = ["map fuzz", "meta note ok", "point 0 0", "point 1/3 1", "point 2/3 1/4", "point 1 1"]
DEFECTS = ["point 1/0 0", "point 0.5 1", "pointy 1 1", "point 1", "map again", "point a b"]


@given(st.integers(0, len(GOOD)), st.sampled_from(DEFECTS))
def test_single_defect_reports_its_line(pos, bad):
    lines = GOOD[:pos] + [bad] + GOOD[pos:]
    if pos == 0 and bad == "map again":
        return  # becomes the header; the real header is then the duplicate
    with pytest.raises(ParseError) as e:
        parse_map("\n".join(lines))
    assert e.value.line == pos + 1
