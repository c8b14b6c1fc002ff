# -*- coding: utf-8 -*-
"""Tests for labels and small helpers."""
import math

import pytest
from hypothesis import given
from hypothesis.strategies import from_regex, integers, lists, tuples

from pygtep._internal_utils import content_digest, discount_factor, relative_gap
from pygtep.exceptions import ParseError
from pygtep.labels import MapIndex, format_label, is_identifier, parse_label
from pygtep.utils import assignment_count, iter_assignments

identifiers = from_regex(r"\A[A-Za-z0-9_]{1,8}\Z")


class TestLabels:
    """Test formatting and parsing of labels."""

    def test_format(self):
        """Test the index order."""
        assert format_label("p", k="CCGT", t=7, c="winter", y=2030, w="HC") == "p[k=CCGT,t=7,c=winter,y=2030,w=HC]"

    def test_no_indices(self):
        """Test a bare symbol."""
        assert format_label("theta") == "theta"
        assert parse_label("theta").indices == ()

    def test_get(self):
        """Test index lookup."""
        label = parse_label("N[k=K1,y=2030]")
        assert label.get("y") == "2030"
        with pytest.raises(KeyError):
            label.get("w")

    @given(tuples(identifiers, identifiers))
    def test_parse_back(self, values):
        """Test that parsing inverts formatting."""
        k, w = values
        text = format_label("x", k=k, w=w)
        assert str(parse_label(text)) == text

    @pytest.mark.parametrize("text", ["", "1abc", "x[k]", "x[k=]", "x[k=1", "x[[k=1]]"])
    def test_not_a_label(self, text):
        """Test malformed labels."""
        with pytest.raises(ParseError):
            parse_label(text)

    def test_identifiers(self):
        """Test the characters allowed in identifiers."""
        assert is_identifier("ITn-2.b")
        assert not is_identifier("a=b")
        assert not is_identifier("")
        assert not is_identifier(3)


class TestMapIndex:
    """Test the growable index."""

    def test_positions(self):
        """Test the bijection."""
        index = MapIndex(["a", "b"])
        assert index.add("c") == 2
        assert index.get_label(1) == "b"
        assert "c" in index and "d" not in index
        assert list(index) == ["a", "b", "c"]
        assert len(index) == 3

    def test_missing(self):
        """Test lookups outside the index."""
        index = MapIndex(["a"])
        with pytest.raises(ValueError, match="Label 'z' not found"):
            index.get_index("z")
        with pytest.raises(ValueError, match="No label for index 5") as first:
            index.get_label(5)
        with pytest.raises(ValueError, match="No label for index -1") as second:
            index.get_label(-1)
        assert first.value is not second.value

    def test_equality(self):
        """Test that order matters."""
        assert MapIndex(["a", "b"]) == MapIndex(["a", "b"])
        assert MapIndex(["a", "b"]) != MapIndex(["b", "a"])


class TestHelpers:
    """Test the numeric helpers."""

    @given(lists(tuples(integers(0, 2), integers(0, 2)), max_size=4))
    def test_assignment_count(self, ranges):
        """Test the count against the enumeration."""
        assert assignment_count(ranges) == len(list(iter_assignments(ranges)))

    def test_relative_gap(self):
        """Test the gap between bounds."""
        assert relative_gap(90.0, 100.0) == pytest.approx(0.1)
        assert relative_gap(100.0, 100.0) == 0.0
        assert relative_gap(101.0, 100.0) == 0.0
        assert relative_gap(-1.0, 0.0) == math.inf
        assert relative_gap(-math.inf, math.inf) == math.inf

    def test_discount_factor(self):
        """Test discounting."""
        assert discount_factor(0.05, 2030, 2030) == 1.0
        assert discount_factor(0.05, 2032, 2030) == pytest.approx(1 / 1.1025)

    def test_digest_ignores_key_order(self):
        """Test that the digest only depends on the content."""
        assert content_digest({"a": 1, "b": 2}) == content_digest({"b": 2, "a": 1})
        assert content_digest({"a": 1}) != content_digest({"a": 2})
