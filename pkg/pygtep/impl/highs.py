# -*- coding: utf-8 -*-
"""A backend delegating to the HiGHS solvers shipped with scipy."""
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.optimize import Bounds, LinearConstraint, linprog, milp

from pygtep.core import SolverBackend
from pygtep.lp import Basis, LpProblem, LpSolution, MilpSolution, SolverOptions, Status, mip_gap, to_ge_duals

logger = logging.getLogger(__name__)

_LP_STATUS = {
    0: Status.OPTIMAL,
    1: Status.ITERATION_LIMIT,
    2: Status.INFEASIBLE,
    3: Status.UNBOUNDED,
    4: Status.NUMERICAL_FAILURE,
}
_MILP_STATUS = {
    0: Status.OPTIMAL,
    1: Status.NODE_LIMIT,
    2: Status.INFEASIBLE,
    3: Status.UNBOUNDED,
    4: Status.NUMERICAL_FAILURE,
}


def _split_rows(problem: LpProblem) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Positions of the L, G and E rows."""
    senses = np.array(problem.senses, dtype=object)
    return (
        np.flatnonzero(senses == "L"),
        np.flatnonzero(senses == "G"),
        np.flatnonzero(senses == "E"),
    )


def _bounds(problem: LpProblem) -> List[Tuple[Optional[float], Optional[float]]]:
    return [
        (lo if np.isfinite(lo) else None, hi if np.isfinite(hi) else None)
        for lo, hi in zip(problem.lower, problem.upper)
    ]


class HighsBackend(SolverBackend):
    """
    LP and MILP solves through scipy.optimize.linprog and scipy.optimize.milp.

    Warm bases and incumbent hints are not forwarded; no basis is returned.
    """

    def __init__(self, options: Optional[SolverOptions] = None):
        """Initialize the backend."""
        self.options = options or SolverOptions()

    @property
    def name(self) -> str:
        """Get the registry name."""
        return "highs"

    def solve_lp(self, problem: LpProblem, warm: Optional[Basis] = None) -> LpSolution:
        """Solve the LP relaxation with HiGHS."""
        le, ge, eq = _split_rows(problem)
        matrix = problem.matrix.tocsr()
        a_ub = sp.vstack([matrix[le], -matrix[ge]]).tocsr() if le.size + ge.size else None
        b_ub = np.concatenate([problem.rhs[le], -problem.rhs[ge]]) if a_ub is not None else None
        a_eq = matrix[eq] if eq.size else None
        b_eq = problem.rhs[eq] if eq.size else None
        result = linprog(
            problem.cost,
            A_ub=a_ub,
            b_ub=b_ub,
            A_eq=a_eq,
            b_eq=b_eq,
            bounds=_bounds(problem),
            method="highs",
            options={
                "primal_feasibility_tolerance": self.options.feas_tol,
                "dual_feasibility_tolerance": self.options.feas_tol,
                "maxiter": self.options.max_pivots,
                "presolve": self.options.presolve,
            },
        )
        status = _LP_STATUS.get(result.status, Status.NUMERICAL_FAILURE)
        iterations = int(getattr(result, "nit", 0) or 0)
        logger.debug("%s: highs LP %s (%s)", problem.name, status.value, result.message)
        if status is not Status.OPTIMAL:
            return LpSolution(status=status, iterations=iterations)
        sensitivities = np.zeros(problem.m)
        if a_ub is not None:
            marginals = np.asarray(result.ineqlin.marginals)
            sensitivities[le] = marginals[: le.size]
            sensitivities[ge] = -marginals[le.size:]
        if eq.size:
            sensitivities[eq] = np.asarray(result.eqlin.marginals)
        reduced = np.asarray(result.lower.marginals) + np.asarray(result.upper.marginals)
        x = np.asarray(result.x, dtype=float)
        return LpSolution(
            status=Status.OPTIMAL,
            objective=problem.objective_value(x),
            x=x,
            duals=to_ge_duals(problem.senses, sensitivities),
            reduced_costs=reduced,
            iterations=iterations,
        )

    def solve_milp(self, problem: LpProblem, incumbent_hint: Optional[Sequence[float]] = None) -> MilpSolution:
        """Solve the MILP with the HiGHS branch-and-cut."""
        if not problem.is_mip:
            lp = self.solve_lp(problem)
            if not lp.is_optimal:
                return MilpSolution(status=lp.status, nodes=1)
            return MilpSolution(Status.OPTIMAL, lp.objective, lp.x, lp.objective, 0.0, 1)
        if incumbent_hint is not None:
            logger.debug("%s: incumbent hints are not forwarded to HiGHS", problem.name)
        lower_rows = np.where(np.isin(problem.senses, ("G", "E")), problem.rhs, -np.inf)
        upper_rows = np.where(np.isin(problem.senses, ("L", "E")), problem.rhs, np.inf)
        constraints = [LinearConstraint(problem.matrix, lower_rows, upper_rows)] if problem.m else []
        result = milp(
            problem.cost,
            integrality=problem.integer.astype(int),
            bounds=Bounds(problem.lower, problem.upper),
            constraints=constraints,
            options={
                "node_limit": self.options.max_nodes,
                "mip_rel_gap": self.options.mip_gap,
                "presolve": self.options.presolve,
            },
        )
        status = _MILP_STATUS.get(result.status, Status.NUMERICAL_FAILURE)
        nodes = int(getattr(result, "mip_node_count", 0) or 0)
        logger.debug("%s: highs MILP %s after %d nodes", problem.name, status.value, nodes)
        if result.x is None:
            return MilpSolution(status=status, nodes=nodes)
        x = np.asarray(result.x, dtype=float)
        ints = problem.integer_columns
        x[ints] = np.round(x[ints])
        objective = problem.objective_value(x)
        dual_bound = getattr(result, "mip_dual_bound", None)
        bound = float(dual_bound) + problem.offset if dual_bound is not None and np.isfinite(dual_bound) else objective
        bound = min(bound, objective)
        return MilpSolution(status, objective, x, bound, mip_gap(objective, bound), nodes)
