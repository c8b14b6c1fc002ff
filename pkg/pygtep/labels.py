# -*- coding: utf-8 -*-
"""
Deterministic labels for columns and rows.

A label is a symbol followed by an ordered list of ``key=value`` indices,
e.g. ``N[k=CCGT3,y=2025]``.

>>> format_label("N", k="CCGT3", y=2025)
'N[k=CCGT3,y=2025]'
>>> parse_label("bal_P[z=ITn,t=7,c=2,y=2025,w=HC]").symbol
'bal_P'
>>> parse_label("theta[w=HC]").indices
(('w', 'HC'),)
"""
import re
from typing import Iterable, Iterator, List, NamedTuple, Tuple, Union

from pygtep.core import LabelIndex, LabelType
from pygtep.exceptions import ParseError

IndexValue = Union[str, int]

_IDENTIFIER = re.compile(r"^[A-Za-z0-9_.\-]+$")
_LABEL = re.compile(r"^(?P<symbol>[A-Za-z_][A-Za-z0-9_]*)(\[(?P<args>[^\[\]]*)\])?$")


class Label(NamedTuple):
    """A parsed label."""

    symbol: str
    indices: Tuple[Tuple[str, str], ...]

    def get(self, key: str) -> str:
        """Get the value of an index key."""
        for k, v in self.indices:
            if k == key:
                return v
        raise KeyError(key)

    def __str__(self) -> str:
        """Format the label back."""
        if not self.indices:
            return self.symbol
        return "{}[{}]".format(
            self.symbol, ",".join("{}={}".format(k, v) for k, v in self.indices)
        )


def is_identifier(name: str) -> bool:
    """
    Check that a name can be used inside a label.

    >>> is_identifier("CCGT_3")
    True
    >>> is_identifier("a,b")
    False
    """
    return isinstance(name, str) and _IDENTIFIER.match(name) is not None


def format_label(symbol: str, **indices: IndexValue) -> str:
    """Format a label; keyword order is kept."""
    return str(Label(symbol, tuple((k, str(v)) for k, v in indices.items())))


def parse_label(text: str) -> Label:
    """
    Parse a label.

    :param text: the label text.
    :return: the parsed label.
    :raise ParseError: if the text is not a label.
    """
    match = _LABEL.match(text)
    if match is None:
        raise ParseError("Not a label: {!r}".format(text))
    args = match.group("args")
    indices = []  # type: List[Tuple[str, str]]
    if args:
        for item in args.split(","):
            key, sep, value = item.partition("=")
            if not sep or not key or not value:
                raise ParseError("Bad index {!r} in label {!r}".format(item, text))
            indices.append((key, value))
    return Label(match.group("symbol"), tuple(indices))


class MapIndex(LabelIndex[LabelType]):
    """
    A growable index implemented with a mapping.

    >>> index = MapIndex(["x", "y"])
    >>> index.add("z")
    2
    >>> index.get_index("y")
    1
    >>> index.add("x")
    Traceback (most recent call last):
    ...
    ValueError: Duplicate label 'x'.
    """

    def __init__(self, labels: Iterable[LabelType] = ()):
        """Initialize the map index."""
        self._labels = []  # type: List[LabelType]
        self._positions = {}  # type: dict
        for label in labels:
            self.add(label)

    def add(self, label: LabelType) -> int:
        """
        Append a label.

        :param label: the new label.
        :return: its position.
        :raise ValueError: if the label is already present.
        """
        if label in self._positions:
            raise ValueError("Duplicate label {!r}.".format(label))
        self._positions[label] = len(self._labels)
        self._labels.append(label)
        return len(self._labels) - 1

    def get_label(self, index: int) -> LabelType:
        """Get the label at a position."""
        if index < 0 or index >= len(self._labels):
            raise ValueError("No label for index {}.".format(index))
        return self._labels[index]

    def get_index(self, label: LabelType) -> int:
        """Get the position of a label."""
        try:
            return self._positions[label]
        except KeyError:
            raise ValueError("Label {!r} not found.".format(label))

    @property
    def size(self) -> int:
        """Get the size of the index."""
        return len(self._labels)

    def __iter__(self) -> Iterator[LabelType]:
        """Iterate over the labels."""
        return iter(self._labels)
