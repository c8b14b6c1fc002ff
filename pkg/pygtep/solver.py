# -*- coding: utf-8 -*-
"""
Solver entry points.

>>> from pygtep.lp import LpBuilder
>>> builder = LpBuilder()
>>> x = builder.add_column("x", cost=1.0)
>>> _ = builder.add_row("r", [(x, 1.0)], "G", 1.0, fixing=True)
>>> solution = solve_lp(builder.build(), backend="builtin")
>>> solution.status.value, solution.objective, float(solution.duals[0])
('optimal', 1.0, 1.0)
"""
import logging
from typing import Optional, Sequence, Union

import numpy as np

from pygtep.core import SolverBackend
from pygtep.exceptions import SizeLimitError
from pygtep.impl import get_backend
from pygtep.lp import Basis, LpProblem, LpSolution, MilpSolution, SolverOptions, Status
from pygtep.utils import assignment_count, iter_assignments

logger = logging.getLogger(__name__)

BackendLike = Union[None, str, SolverBackend]

MAX_ORACLE_INTEGERS = 20
MAX_ORACLE_RANGE = 4
MAX_ORACLE_ASSIGNMENTS = 2 ** 20


def resolve_backend(backend: BackendLike, options: Optional[SolverOptions] = None) -> SolverBackend:
    """Turn a name, a backend or None into a backend."""
    if isinstance(backend, SolverBackend):
        return backend
    return get_backend(backend, options)


def solve_lp(
    problem: LpProblem,
    warm: Optional[Basis] = None,
    backend: BackendLike = None,
    options: Optional[SolverOptions] = None,
) -> LpSolution:
    """
    Solve the continuous relaxation of a problem.

    :param problem: the problem; integrality flags are ignored.
    :param warm: an optional basis hint.
    :param backend: a backend, its name, or None for the default.
    :param options: tolerances and limits, used when the backend is built here.
    :return: the solution, with duals for every row.
    """
    return resolve_backend(backend, options).solve_lp(problem, warm)


def solve_milp(
    problem: LpProblem,
    incumbent_hint: Optional[Sequence[float]] = None,
    backend: BackendLike = None,
    options: Optional[SolverOptions] = None,
) -> MilpSolution:
    """Solve a problem enforcing integrality."""
    return resolve_backend(backend, options).solve_milp(problem, incumbent_hint)


def enumerate_oracle(
    problem: LpProblem, backend: BackendLike = "builtin", options: Optional[SolverOptions] = None
) -> MilpSolution:
    """
    Exact MILP optimum by trying every integer assignment.

    The continuous part is solved by an LP for each assignment.

    :raise SizeLimitError: with more than 20 integer columns, an integer range wider
      than 4 or more than 2^20 assignments.
    """
    solver = resolve_backend(backend, options)
    if not problem.is_mip:
        lp = solver.solve_lp(problem)
        if not lp.is_optimal:
            return MilpSolution(status=lp.status, nodes=1)
        return MilpSolution(Status.OPTIMAL, lp.objective, lp.x, lp.objective, 0.0, 1)

    ints = problem.integer_columns
    ranges = _integer_ranges(problem, ints)
    count = assignment_count(ranges)
    if count > MAX_ORACLE_ASSIGNMENTS:
        raise SizeLimitError("Enumeration of {} assignments exceeds 2^20.".format(count))

    best_obj, best_x = np.inf, None
    unbounded = False
    for values in iter_assignments(ranges):
        lower, upper = problem.lower.copy(), problem.upper.copy()
        lower[ints], upper[ints] = values, values
        lp = solver.solve_lp(problem.with_bounds(lower, upper))
        if lp.status is Status.UNBOUNDED:
            unbounded = True
        elif lp.is_optimal and lp.objective < best_obj:
            best_obj, best_x = lp.objective, lp.x
    logger.debug("%s: enumerated %d assignments", problem.name, count)
    if unbounded:
        return MilpSolution(status=Status.UNBOUNDED, nodes=count)
    if best_x is None:
        return MilpSolution(status=Status.INFEASIBLE, nodes=count)
    return MilpSolution(Status.OPTIMAL, best_obj, best_x, best_obj, 0.0, count)


def _integer_ranges(problem: LpProblem, ints: np.ndarray):
    if ints.size > MAX_ORACLE_INTEGERS:
        raise SizeLimitError("{} integer columns, at most {} can be enumerated.".format(ints.size, MAX_ORACLE_INTEGERS))
    ranges = []
    for j in ints:
        lo, hi = problem.lower[j], problem.upper[j]
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise SizeLimitError("Integer column {} has an infinite range.".format(problem.col_labels[j]))
        lo, hi = int(np.ceil(lo - 1e-9)), int(np.floor(hi + 1e-9))
        if hi - lo > MAX_ORACLE_RANGE:
            raise SizeLimitError(
                "Integer column {} spans {} values, at most {} allowed.".format(
                    problem.col_labels[j], hi - lo + 1, MAX_ORACLE_RANGE + 1
                )
            )
        ranges.append((lo, hi))
    return ranges
