# -*- coding: utf-8 -*-
"""Utils module."""
import itertools
from typing import Iterator, Sequence, Tuple


def iter_assignments(ranges: Sequence[Tuple[int, int]]) -> Iterator[Tuple[int, ...]]:
    """
    Iterate over every integer assignment inside closed ranges.

    >>> list(iter_assignments([(0, 1), (2, 3)]))
    [(0, 2), (0, 3), (1, 2), (1, 3)]
    >>> list(iter_assignments([]))
    [()]
    """
    return itertools.product(*(range(lo, hi + 1) for lo, hi in ranges))


def assignment_count(ranges: Sequence[Tuple[int, int]]) -> int:
    """
    Count the assignments produced by iter_assignments.

    >>> assignment_count([(0, 1)] * 20) == 2 ** 20
    True
    """
    count = 1
    for lo, hi in ranges:
        count *= max(hi - lo + 1, 0)
    return count
