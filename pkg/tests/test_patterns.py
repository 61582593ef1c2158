import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from langshift.errors import PatternFormatError
from langshift.patterns import Cylinder, Pattern, format_patterns, parse_pattern_text, shift

arrays = st.tuples(st.integers(1, 6), st.integers(1, 6)).flatmap(
    lambda rc: st.lists(st.integers(0, 3), min_size=rc[0] * rc[1], max_size=rc[0] * rc[1]).map(
        lambda v: np.array(v, dtype=np.uint8).reshape(rc)
    )
)


@given(arrays)
def test_text_round_trip(a):
    p = Pattern.from_array(a)
    q, bg = parse_pattern_text(p.to_text())
    assert q == p and bg is None
    assert Pattern.literal(p.to_literal()) == p


def test_background_header():
    p, bg = parse_pattern_text("background 2\n1 3\n301\n")
    assert bg == 2
    assert p.to_literal() == "301"


def test_no_trailing_newline():
    p, _ = parse_pattern_text("2 2\n01\n23")
    assert p.array.tolist() == [[0, 1], [2, 3]]


@pytest.mark.parametrize(
    "text, line",
    [
        ("2 2\n01\n2x\n", 3),
        ("2 2\n01\n", 3),
        ("2 3\n012\n01\n", 3),
        ("two 2\n01\n", 1),
        ("background 7\n1 1\n0\n", 1),
        ("", 1),
    ],
)
def test_parse_errors_carry_line(text, line):
    with pytest.raises(PatternFormatError) as exc:
        parse_pattern_text(text)
    assert exc.value.line == line


def test_records_are_blank_line_separated():
    text = "".join(format_patterns([Pattern.literal("3"), Pattern.literal("01/23")]))
    assert text == "1 1\n3\n\n2 2\n01\n23\n"


def test_symmetries_and_contains():
    assert {p.to_literal() for p in Pattern.literal("33").symmetries()} == {"33", "3/3"}
    assert len(Pattern.literal("01/23").symmetries()) == 8
    big = Pattern.literal("000/030/030")
    assert big.contains(Pattern.literal("3/3"))
    assert not big.contains(Pattern.literal("33"))
    assert not Pattern.literal("3").contains(Pattern.literal("33"))


def test_shift_bookkeeping():
    w = Pattern.literal("12")
    assert shift(w, (0, 0)) == Cylinder(w, (0, 0))
    c = Cylinder(w, (4, -2))
    assert c.shift((1, 0)) == Cylinder(w, (5, -2))
    assert c.shift((3, 7)).shift((-3, -7)) == c


def test_pattern_validation():
    with pytest.raises(ValueError):
        Pattern(1, 2, bytes([0]))
    with pytest.raises(ValueError):
        Pattern(1, 1, bytes([4]))
