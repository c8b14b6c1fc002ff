# -*- coding: utf-8 -*-
"""
The built-in solver: a bounded-variable revised simplex and a branch-and-bound on top of it.

Rows are handled through logical variables, ``A x - s = 0``, whose bounds encode
the row sense. A cold start puts every logical in the basis and adds an artificial
variable on each row whose activity violates the row bounds; phase one drives the
artificials to zero.
"""
import heapq
import itertools
import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from pygtep._internal_utils import fractionality
from pygtep.core import SolverBackend
from pygtep.lp import (
    Basis,
    LpProblem,
    LpSolution,
    MilpSolution,
    SolverOptions,
    Status,
    VarStatus,
    mip_gap,
    to_ge_duals,
)

logger = logging.getLogger(__name__)

_PIVOT_TOL = 1e-9
_RATIO_TIE = 1e-12
_DEGENERATE_STEP = 1e-12

BoundOverrides = Dict[int, Tuple[float, float]]


class _SingularBasis(Exception):
    pass


class _Factor:
    """LU factor of a basis matrix followed by a list of eta updates."""

    def __init__(self, matrix: sp.csc_matrix):
        try:
            self.lu = splu(matrix)
        except RuntimeError as e:
            raise _SingularBasis(str(e))
        self.etas = []  # type: List[Tuple[int, np.ndarray]]

    def ftran(self, a: np.ndarray) -> np.ndarray:
        """Solve B v = a."""
        v = self.lu.solve(a)
        for r, alpha in self.etas:
            vr = v[r] / alpha[r]
            v -= alpha * vr
            v[r] = vr
        return v

    def btran(self, c: np.ndarray) -> np.ndarray:
        """Solve B^T y = c."""
        u = np.array(c, dtype=float)
        for r, alpha in reversed(self.etas):
            s = alpha @ u - alpha[r] * u[r]
            u[r] = (u[r] - s) / alpha[r]
        return self.lu.solve(u, trans="T")

    def update(self, r: int, alpha: np.ndarray) -> None:
        """Record that the basis column at position r was replaced."""
        self.etas.append((r, alpha.copy()))


class _RevisedSimplex:
    """One LP solve; columns are structurals, then row logicals, then row artificials."""

    def __init__(self, problem: LpProblem, options: SolverOptions):
        self.problem = problem
        self.options = options
        self.A = problem.matrix.tocsc()
        self.AT = self.A.transpose().tocsr()
        self.n, self.m = problem.n, problem.m
        n, m = self.n, self.m
        total = n + 2 * m
        self.lb = np.empty(total)
        self.ub = np.empty(total)
        self.lb[:n], self.ub[:n] = problem.lower, problem.upper
        for i, (sense, b) in enumerate(zip(problem.senses, problem.rhs)):
            self.lb[n + i] = b if sense in ("G", "E") else -np.inf
            self.ub[n + i] = b if sense in ("L", "E") else np.inf
        self.lb[n + m:] = 0.0
        self.ub[n + m:] = 0.0
        self.sigma = np.ones(m)
        self.x = np.zeros(total)
        self.state = np.array([VarStatus.AT_LOWER] * total, dtype=object)
        self.head = np.arange(n, n + m)
        self.position = -np.ones(total, dtype=int)
        self.cost = np.zeros(total)
        self.factor = None  # type: Optional[_Factor]
        self.iterations = 0
        scale = max(1.0, float(np.max(np.abs(problem.cost)))) if n else 1.0
        self.dual_tol = 1e-9 * scale
        rhs_scale = max(1.0, float(np.max(np.abs(problem.rhs)))) if m else 1.0
        self.primal_tol = options.feas_tol * rhs_scale

    # -- columns ------------------------------------------------------------

    def column(self, j: int) -> np.ndarray:
        a = np.zeros(self.m)
        if j < self.n:
            start, end = self.A.indptr[j], self.A.indptr[j + 1]
            a[self.A.indices[start:end]] = self.A.data[start:end]
        elif j < self.n + self.m:
            a[j - self.n] = -1.0
        else:
            i = j - self.n - self.m
            a[i] = self.sigma[i]
        return a

    def basis_matrix(self) -> sp.csc_matrix:
        rows, cols, vals = [], [], []
        for k, j in enumerate(self.head):
            if j < self.n:
                start, end = self.A.indptr[j], self.A.indptr[j + 1]
                rows.extend(self.A.indices[start:end])
                cols.extend([k] * (end - start))
                vals.extend(self.A.data[start:end])
            elif j < self.n + self.m:
                rows.append(j - self.n)
                cols.append(k)
                vals.append(-1.0)
            else:
                i = j - self.n - self.m
                rows.append(i)
                cols.append(k)
                vals.append(self.sigma[i])
        return sp.csc_matrix((vals, (rows, cols)), shape=(self.m, self.m))

    def refactor(self) -> None:
        self.factor = _Factor(self.basis_matrix())
        self.compute_basic_values()

    def compute_basic_values(self) -> None:
        n, m = self.n, self.m
        xn = self.x.copy()
        xn[self.head] = 0.0
        rhs = -(self.A @ xn[:n] - xn[n:n + m] + self.sigma * xn[n + m:])
        self.x[self.head] = self.factor.ftran(rhs)

    def reduced_costs(self, y: np.ndarray) -> np.ndarray:
        n, m = self.n, self.m
        d = np.empty(n + 2 * m)
        d[:n] = self.cost[:n] - self.AT @ y
        d[n:n + m] = y
        d[n + m:] = self.cost[n + m:] - self.sigma * y
        return d

    # -- starts -------------------------------------------------------------

    def place_nonbasic(self, j: int) -> None:
        if np.isfinite(self.lb[j]):
            self.state[j], self.x[j] = VarStatus.AT_LOWER, self.lb[j]
        elif np.isfinite(self.ub[j]):
            self.state[j], self.x[j] = VarStatus.AT_UPPER, self.ub[j]
        else:
            self.state[j], self.x[j] = VarStatus.FREE_ZERO, 0.0

    def set_head(self, head: Sequence[int]) -> None:
        self.head = np.array(head, dtype=int)
        self.position[:] = -1
        for k, j in enumerate(self.head):
            self.position[j] = k
            self.state[j] = VarStatus.BASIC

    def cold_start(self) -> bool:
        """Install the slack/artificial basis; return whether artificials were needed."""
        n, m = self.n, self.m
        for j in range(n):
            self.place_nonbasic(j)
        activity = self.A @ self.x[:n]
        head = []
        needs_phase_one = False
        for i in range(m):
            logical, artificial = n + i, n + m + i
            r = activity[i]
            self.lb[artificial], self.ub[artificial] = 0.0, 0.0
            self.state[artificial], self.x[artificial] = VarStatus.AT_LOWER, 0.0
            if self.lb[logical] - self.primal_tol <= r <= self.ub[logical] + self.primal_tol:
                head.append(logical)
                self.x[logical] = r
                continue
            needs_phase_one = True
            if r < self.lb[logical]:
                target, self.state[logical] = self.lb[logical], VarStatus.AT_LOWER
            else:
                target, self.state[logical] = self.ub[logical], VarStatus.AT_UPPER
            self.x[logical] = target
            self.sigma[i] = 1.0 if target - r >= 0 else -1.0
            self.ub[artificial] = np.inf
            self.x[artificial] = abs(target - r)
            head.append(artificial)
        self.set_head(head)
        self.refactor()
        return needs_phase_one

    def warm_start(self, basis: Basis) -> bool:
        """Try a basis from a previous solve; return whether it is primal feasible."""
        n, m = self.n, self.m
        if len(basis.columns) != n or len(basis.rows) != m or basis.basic_count != m:
            return False
        head = []
        statuses = list(basis.columns) + list(basis.rows)
        for j, status in enumerate(statuses):
            if status is VarStatus.BASIC:
                head.append(j)
            elif status is VarStatus.AT_UPPER and np.isfinite(self.ub[j]):
                self.state[j], self.x[j] = VarStatus.AT_UPPER, self.ub[j]
            else:
                self.place_nonbasic(j)
        for i in range(m):
            artificial = n + m + i
            self.lb[artificial], self.ub[artificial] = 0.0, 0.0
            self.state[artificial], self.x[artificial] = VarStatus.AT_LOWER, 0.0
        self.set_head(head)
        try:
            self.refactor()
        except _SingularBasis:
            return False
        xb = self.x[self.head]
        return bool(
            np.all(xb >= self.lb[self.head] - self.primal_tol) and np.all(xb <= self.ub[self.head] + self.primal_tol)
        )

    # -- iterations ---------------------------------------------------------

    def choose_entering(self, d: np.ndarray, bland: bool) -> Tuple[int, float]:
        movable = self.lb != self.ub
        up = movable & (self.state == VarStatus.AT_LOWER) & (d < -self.dual_tol)
        down = movable & (self.state == VarStatus.AT_UPPER) & (d > self.dual_tol)
        free = movable & (self.state == VarStatus.FREE_ZERO) & (np.abs(d) > self.dual_tol)
        eligible = np.flatnonzero(up | down | free)
        if eligible.size == 0:
            return -1, 0.0
        if bland:
            j = int(eligible[0])
        else:
            j = int(eligible[np.argmax(np.abs(d[eligible]))])
        return j, (1.0 if d[j] < 0 else -1.0)

    def ratio_test(self, q: int, direction: float, alpha: np.ndarray, bland: bool) -> Tuple[float, int, bool]:
        """Return (step, leaving position or -1 for a bound flip, leaving goes to upper)."""
        step = self.ub[q] - self.lb[q] if np.isfinite(self.ub[q]) and np.isfinite(self.lb[q]) else np.inf
        leaving, to_upper = -1, False
        rates = -direction * alpha
        xb = self.x[self.head]
        lbb, ubb = self.lb[self.head], self.ub[self.head]
        best_alpha = 0.0
        for k in np.flatnonzero(np.abs(alpha) > _PIVOT_TOL):
            rate = rates[k]
            if rate < 0 and np.isfinite(lbb[k]):
                limit, upper = max(xb[k] - lbb[k], 0.0) / -rate, False
            elif rate > 0 and np.isfinite(ubb[k]):
                limit, upper = max(ubb[k] - xb[k], 0.0) / rate, True
            else:
                continue
            if limit < step - _RATIO_TIE:
                step, leaving, to_upper, best_alpha = limit, k, upper, abs(alpha[k])
            elif limit <= step + _RATIO_TIE and leaving >= 0:
                if bland:
                    if self.head[k] < self.head[leaving]:
                        leaving, to_upper, best_alpha = k, upper, abs(alpha[k])
                elif abs(alpha[k]) > best_alpha:
                    leaving, to_upper, best_alpha = k, upper, abs(alpha[k])
        return step, leaving, to_upper

    def run_phase(self, cost: np.ndarray) -> Status:
        self.cost = cost
        bland = False
        degenerate = 0
        while True:
            if self.iterations >= self.options.max_pivots:
                return Status.ITERATION_LIMIT
            y = self.factor.btran(self.cost[self.head])
            d = self.reduced_costs(y)
            q, direction = self.choose_entering(d, bland)
            if q < 0:
                if self.factor.etas:
                    self.refactor()
                    continue
                return Status.OPTIMAL
            alpha = self.factor.ftran(self.column(q))
            step, leaving, to_upper = self.ratio_test(q, direction, alpha, bland)
            if not np.isfinite(step):
                return Status.UNBOUNDED
            self.iterations += 1
            self.x[self.head] -= direction * step * alpha
            self.x[q] += direction * step
            if step <= _DEGENERATE_STEP:
                degenerate += 1
                if not bland and degenerate >= self.options.stall_threshold:
                    logger.debug("%s: stalling, switching to Bland's rule", self.problem.name)
                    bland = True
            else:
                degenerate = 0
            if leaving < 0:
                self.state[q] = VarStatus.AT_UPPER if direction > 0 else VarStatus.AT_LOWER
                self.x[q] = self.ub[q] if direction > 0 else self.lb[q]
                continue
            out = self.head[leaving]
            self.state[out] = VarStatus.AT_UPPER if to_upper else VarStatus.AT_LOWER
            self.x[out] = self.ub[out] if to_upper else self.lb[out]
            self.position[out] = -1
            self.head[leaving] = q
            self.position[q] = leaving
            self.state[q] = VarStatus.BASIC
            self.factor.update(leaving, alpha)
            if len(self.factor.etas) >= self.options.refactor_every:
                self.refactor()

    def solve(self, warm: Optional[Basis]) -> LpSolution:
        n, m = self.n, self.m
        try:
            if warm is not None and self.warm_start(warm):
                logger.debug("%s: warm basis accepted", self.problem.name)
            elif self.cold_start():
                phase_one = np.zeros(n + 2 * m)
                phase_one[n + m:] = 1.0
                status = self.run_phase(phase_one)
                if status is not Status.OPTIMAL:
                    return LpSolution(status=status, iterations=self.iterations)
                infeasibility = float(np.sum(self.x[n + m:]))
                if infeasibility > self.primal_tol:
                    return LpSolution(status=Status.INFEASIBLE, iterations=self.iterations)
                self.ub[n + m:] = 0.0
                for j in range(n + m, n + 2 * m):
                    if self.state[j] is not VarStatus.BASIC:
                        self.state[j], self.x[j] = VarStatus.AT_LOWER, 0.0
            phase_two = np.zeros(n + 2 * m)
            phase_two[:n] = self.problem.cost
            status = self.run_phase(phase_two)
        except _SingularBasis as e:
            logger.debug("%s: singular basis (%s)", self.problem.name, e)
            return LpSolution(status=Status.NUMERICAL_FAILURE, iterations=self.iterations)
        if status is not Status.OPTIMAL:
            return LpSolution(status=status, iterations=self.iterations)
        y = self.factor.btran(self.cost[self.head])
        d = self.reduced_costs(y)
        x = self.x[:n].copy()
        return LpSolution(
            status=Status.OPTIMAL,
            objective=self.problem.objective_value(x),
            x=x,
            duals=to_ge_duals(self.problem.senses, y),
            reduced_costs=d[:n].copy(),
            basis=Basis(columns=tuple(self.state[:n]), rows=tuple(self.state[n:n + m])),
            iterations=self.iterations,
        )


class _Node:
    """A branch-and-bound node: bound overrides along the path from the root."""

    __slots__ = ("bound", "depth", "overrides", "basis")

    def __init__(self, bound: float, depth: int, overrides: BoundOverrides, basis: Optional[Basis]):
        self.bound = bound
        self.depth = depth
        self.overrides = overrides
        self.basis = basis


class BuiltinBackend(SolverBackend):
    """Revised simplex for LPs, best-bound branch-and-bound for MILPs."""

    def __init__(self, options: Optional[SolverOptions] = None):
        """Initialize the backend."""
        self.options = options or SolverOptions()

    @property
    def name(self) -> str:
        """Get the registry name."""
        return "builtin"

    def solve_lp(self, problem: LpProblem, warm: Optional[Basis] = None) -> LpSolution:
        """Solve the LP relaxation with the revised simplex."""
        solution = _RevisedSimplex(problem, self.options).solve(warm)
        logger.debug(
            "%s: %s after %d pivots (obj=%s)", problem.name, solution.status.value, solution.iterations, solution.objective
        )
        return solution

    def solve_milp(self, problem: LpProblem, incumbent_hint: Optional[Sequence[float]] = None) -> MilpSolution:
        """
        Branch and bound.

        Nodes are explored by best bound, deeper nodes first on ties; the branching
        variable is the most fractional one.
        """
        if not problem.is_mip:
            lp = self.solve_lp(problem)
            if not lp.is_optimal:
                return MilpSolution(status=lp.status, nodes=1)
            return MilpSolution(Status.OPTIMAL, lp.objective, lp.x, lp.objective, 0.0, 1)

        ints = problem.integer_columns
        best_obj, best_x = np.inf, None  # type: float, Optional[np.ndarray]

        if incumbent_hint is not None:
            hinted = self._complete(problem, np.asarray(incumbent_hint, dtype=float)[ints])
            if hinted is not None:
                best_obj, best_x = hinted

        root = self.solve_lp(problem)
        nodes = 1
        if not root.is_optimal:
            if best_x is not None and root.status is Status.ITERATION_LIMIT:
                return MilpSolution(Status.ITERATION_LIMIT, best_obj, best_x, -np.inf, np.inf, nodes)
            return MilpSolution(status=root.status, nodes=nodes)

        if best_x is None:
            for rounding in (np.round, np.ceil):
                rounded = self._complete(problem, rounding(root.x[ints]))
                if rounded is not None:
                    best_obj, best_x = rounded
                    break

        counter = itertools.count()
        heap = []  # type: List[Tuple[float, int, int, _Node]]

        def prune_level() -> float:
            return best_obj - 1e-9 * (1.0 + abs(best_obj)) if np.isfinite(best_obj) else np.inf

        # parent bounds of nodes whose LP did not finish; they stay open
        unresolved = []  # type: List[float]
        failure = None  # type: Optional[Status]

        def process(solution: LpSolution, node: _Node) -> None:
            nonlocal best_obj, best_x, failure
            if solution.status in (Status.ITERATION_LIMIT, Status.NUMERICAL_FAILURE, Status.UNBOUNDED):
                logger.warning("%s: node at depth %d ended %s", problem.name, node.depth, solution.status.value)
                unresolved.append(node.bound)
                failure = failure or solution.status
                return
            if not solution.is_optimal or solution.objective >= prune_level():
                return
            frac = fractionality(solution.x[ints])
            if np.all(frac <= self.options.int_tol):
                best_obj, best_x = solution.objective, solution.x.copy()
                logger.debug("%s: new incumbent %s at depth %d", problem.name, best_obj, node.depth)
                return
            j = int(ints[int(np.argmax(frac))])
            value = solution.x[j]
            lo, hi = node.overrides.get(j, (problem.lower[j], problem.upper[j]))
            for child_lo, child_hi in ((lo, np.floor(value)), (np.ceil(value), hi)):
                if child_lo > child_hi:
                    continue
                overrides = dict(node.overrides)
                overrides[j] = (child_lo, child_hi)
                child = _Node(solution.objective, node.depth + 1, overrides, solution.basis)
                heapq.heappush(heap, (child.bound, -child.depth, next(counter), child))

        def open_bound() -> float:
            return min([heap[0][0]] + unresolved) if heap else min(unresolved, default=np.inf)

        process(root, _Node(root.objective, 0, {}, None))
        status = Status.OPTIMAL
        while heap:
            if best_x is not None and mip_gap(best_obj, open_bound()) <= self.options.mip_gap:
                break
            if nodes >= self.options.max_nodes:
                status = Status.NODE_LIMIT
                break
            _, _, _, node = heapq.heappop(heap)
            if node.bound >= prune_level():
                continue
            solution = self.solve_lp(self._restrict(problem, node.overrides), warm=node.basis)
            nodes += 1
            process(solution, node)

        bound = min(open_bound(), best_obj)
        if failure is not None and status is Status.OPTIMAL:
            if best_x is None or mip_gap(best_obj, bound) > self.options.mip_gap:
                status = failure
        if best_x is None:
            if status is Status.OPTIMAL:
                return MilpSolution(status=Status.INFEASIBLE, nodes=nodes)
            return MilpSolution(status=status, bound=bound, nodes=nodes)
        x = best_x.copy()
        x[ints] = np.round(x[ints])
        return MilpSolution(status, best_obj, x, bound, mip_gap(best_obj, bound), nodes)

    @staticmethod
    def _restrict(problem: LpProblem, overrides: BoundOverrides) -> LpProblem:
        lower, upper = problem.lower.copy(), problem.upper.copy()
        for j, (lo, hi) in overrides.items():
            lower[j], upper[j] = lo, hi
        return problem.with_bounds(lower, upper)

    def _complete(self, problem: LpProblem, values: np.ndarray) -> Optional[Tuple[float, np.ndarray]]:
        """Fix the integer columns to given values and solve for the rest."""
        ints = problem.integer_columns
        values = np.clip(np.round(values), problem.lower[ints], problem.upper[ints])
        lower, upper = problem.lower.copy(), problem.upper.copy()
        lower[ints], upper[ints] = values, values
        solution = self.solve_lp(problem.with_bounds(lower, upper))
        if not solution.is_optimal:
            return None
        return solution.objective, solution.x
