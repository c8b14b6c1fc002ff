# -*- coding: utf-8 -*-
"""
Export of problems in fixed MPS format.

Fields start at columns 2, 5, 15, 25, 40 and 50. Labels do not fit the 8-character
name fields, so rows and columns are renamed ``R0000001``, ``C0000001``, ...; the
original labels can be listed in comment lines.

>>> format_number(0.1)
'0.1'
>>> format_number(-0.0)
'0'
>>> format_number(1e20)
'1e20'
>>> len(format_number(1 / 3))
12
"""
import io
from typing import List, TextIO

import numpy as np

from pygtep.lp import LpProblem

OBJECTIVE_ROW = "COST"
_FIELD_WIDTH = 12


def format_number(value: float) -> str:
    """Shortest representation of a number fitting in 12 characters."""
    if value == 0.0:
        return "0"
    for precision in range(17, 0, -1):
        text = "%.{}g".format(precision) % value
        text = text.replace("e+0", "e").replace("e+", "e").replace("e-0", "e-")
        if len(text) <= _FIELD_WIDTH and float(text) == value:
            return text
    for precision in range(17, 0, -1):
        text = "%.{}g".format(precision) % value
        text = text.replace("e+0", "e").replace("e+", "e").replace("e-0", "e-")
        if len(text) <= _FIELD_WIDTH:
            return text
    raise ValueError("Cannot format {}.".format(value))  # pragma: no cover


def row_name(index: int) -> str:
    """Generated name of a row."""
    return "R{:07d}".format(index + 1)


def column_name(index: int) -> str:
    """Generated name of a column."""
    return "C{:07d}".format(index + 1)


def _line(f1: str = "", f2: str = "", f3: str = "", f4: str = "", f5: str = "", f6: str = "") -> str:
    text = " {:<2} {:<8}  {:<8}  {:<12}   {:<8}  {:<12}".format(f1, f2, f3, f4, f5, f6)
    return text.rstrip()


def _bound_lines(problem: LpProblem, j: int) -> List[str]:
    name = column_name(j)
    lo, hi = problem.lower[j], problem.upper[j]
    integer = bool(problem.integer[j])
    if integer and lo == 0.0 and hi == 1.0:
        return [_line("BV", "BND", name)]
    if lo == hi:
        return [_line("FX", "BND", name, format_number(lo))]
    if np.isneginf(lo) and np.isposinf(hi):
        return [_line("FR", "BND", name)]
    lines = []
    if np.isneginf(lo):
        lines.append(_line("MI", "BND", name))
    elif lo != 0.0:
        lines.append(_line("LI" if integer else "LO", "BND", name, format_number(lo)))
    if np.isfinite(hi):
        lines.append(_line("UI" if integer else "UP", "BND", name, format_number(hi)))
    elif integer:
        lines.append(_line("PL", "BND", name))
    return lines


def write_mps(problem: LpProblem, stream: TextIO, with_labels: bool = False) -> None:
    """
    Write a problem in fixed MPS format.

    The objective row is ``COST``; a nonzero objective offset is written as minus the
    right-hand side of ``COST``.

    :param problem: the problem.
    :param stream: a text stream.
    :param with_labels: whether to list the generated names with their labels as comments.
    """
    out = []  # type: List[str]
    out.append("NAME          {}".format(problem.name.replace(" ", "_")[:8]))
    if with_labels:
        for i, label in enumerate(problem.row_labels):
            out.append("* {} {}".format(row_name(i), label))
        for j, label in enumerate(problem.col_labels):
            out.append("* {} {}".format(column_name(j), label))
    out.append("ROWS")
    out.append(_line("N", OBJECTIVE_ROW))
    for i, sense in enumerate(problem.senses):
        out.append(_line(sense, row_name(i)))

    out.append("COLUMNS")
    matrix = problem.matrix.tocsc()
    in_integer_block = False
    markers = 0
    for j in range(problem.n):
        if bool(problem.integer[j]) != in_integer_block:
            out.append(
                _line("", "MARKER{}".format(markers), "'MARKER'", "", "'INTEND'" if in_integer_block else "'INTORG'")
            )
            markers += 1
            in_integer_block = not in_integer_block
        entries = []
        if problem.cost[j] != 0.0:
            entries.append((OBJECTIVE_ROW, problem.cost[j]))
        start, end = matrix.indptr[j], matrix.indptr[j + 1]
        for i, value in sorted(zip(matrix.indices[start:end], matrix.data[start:end])):
            if value != 0.0:
                entries.append((row_name(int(i)), value))
        if not entries:
            entries.append((OBJECTIVE_ROW, 0.0))
        for k in range(0, len(entries), 2):
            pair = entries[k:k + 2]
            fields = [column_name(j), pair[0][0], format_number(pair[0][1])]
            if len(pair) == 2:
                fields += [pair[1][0], format_number(pair[1][1])]
            out.append(_line("", *fields))
    if in_integer_block:
        out.append(_line("", "MARKER{}".format(markers), "'MARKER'", "", "'INTEND'"))

    out.append("RHS")
    rhs_entries = [(row_name(i), b) for i, b in enumerate(problem.rhs) if b != 0.0]
    if problem.offset != 0.0:
        rhs_entries.insert(0, (OBJECTIVE_ROW, -problem.offset))
    for k in range(0, len(rhs_entries), 2):
        pair = rhs_entries[k:k + 2]
        fields = ["RHS", pair[0][0], format_number(pair[0][1])]
        if len(pair) == 2:
            fields += [pair[1][0], format_number(pair[1][1])]
        out.append(_line("", *fields))

    bounds = [line for j in range(problem.n) for line in _bound_lines(problem, j)]
    if bounds:
        out.append("BOUNDS")
        out.extend(bounds)
    out.append("ENDATA")
    stream.write("\n".join(out) + "\n")


def to_mps(problem: LpProblem, with_labels: bool = False) -> str:
    """Get the fixed MPS text of a problem."""
    buffer = io.StringIO()
    write_mps(problem, buffer, with_labels)
    return buffer.getvalue()
