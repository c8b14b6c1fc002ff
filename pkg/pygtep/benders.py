# -*- coding: utf-8 -*-
"""
Multi-cut Benders decomposition of the planning problem.

Each iteration solves the master problem, evaluates the proposed plan on every
(year, scenario) subproblem, adds one optimality cut per scenario and updates the
bounds. After convergence the operations of the best plan are solved once more,
with integer commitment unless it is relaxed.
"""
import logging
import math
import pprint
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, TypeVar

import numpy as np

from pygtep._internal_utils import relative_gap
from pygtep.calendars import RepresentativeCalendar, ScenarioSet
from pygtep.catalog import InvestmentPlan, OperationSolution
from pygtep.core import SolverBackend
from pygtep.exceptions import DimensionError, SolverFailureError
from pygtep.formulation import (
    build_master,
    build_monolithic,
    build_subproblem,
    fixed_columns,
    gradients,
    investment_cost,
    operation_solution,
    pin,
)
from pygtep.lp import Basis, LpProblem, LpSolution, SolverOptions, Status
from pygtep.solver import resolve_backend, solve_lp, solve_milp
from pygtep.system import SystemInstance

logger = logging.getLogger(__name__)

Pair = Tuple[int, str]
ResultType = TypeVar("ResultType")


def _check_eps(eps: float):
    """Check the convergence tolerance."""
    if not eps >= 0:
        raise ValueError("Tolerance eps must be nonnegative. Found {}.".format(pprint.pformat(eps)))


def _check_at_least_one(name: str, value: int):
    """Check a count option."""
    if value < 1:
        raise ValueError("Option {} must be at least 1. Found {}.".format(name, pprint.pformat(value)))


@dataclass(frozen=True)
class BendersConfig:
    """Settings of a decomposition run."""

    eps: float = 1e-3
    max_iter: int = 100
    parallelism: int = 1
    relax_uc: bool = False
    discount_operations: bool = False
    backend: Optional[str] = None
    options: SolverOptions = field(default_factory=SolverOptions)

    def __post_init__(self):
        """Check the settings."""
        _check_eps(self.eps)
        _check_at_least_one("max_iter", self.max_iter)
        _check_at_least_one("parallelism", self.parallelism)


@dataclass(frozen=True)
class Anchor:
    """A subproblem optimum: its value, the pinned point and the gradient there."""

    objective: float
    point: Mapping[str, float]
    duals: Mapping[str, float]


@dataclass(frozen=True)
class Cut:
    """
    Linear under-estimator of the operating cost of one scenario over all years.

    >>> cut = make_cut(1, "HC", {2030: Anchor(100.0, {"x": 1.0}, {"x": -3.0})})
    >>> cut.evaluate({"x": 2.0})
    97.0
    """

    iteration: int
    scenario: str
    anchors: Mapping[int, Anchor]

    @property
    def gradient(self) -> Dict[str, float]:
        """Slope of the cut, keyed by first-stage label."""
        return {label: slope for anchor in self.anchors.values() for label, slope in anchor.duals.items()}

    @property
    def intercept(self) -> float:
        """Right-hand side of the cut row, sum over years of z - slope . anchor."""
        return float(
            sum(
                anchor.objective - sum(anchor.duals[label] * anchor.point[label] for label in anchor.duals)
                for anchor in self.anchors.values()
            )
        )

    def evaluate(self, values: Mapping[str, float]) -> float:
        """Value of the cut at a first-stage point."""
        return float(
            sum(
                anchor.objective
                + sum(anchor.duals[label] * (values[label] - anchor.point[label]) for label in anchor.duals)
                for anchor in self.anchors.values()
            )
        )


def make_cut(iteration: int, scenario: str, anchors: Mapping[int, Anchor]) -> Cut:
    """
    Build the cut of a scenario from one anchor per year.

    :raise DimensionError: if there are no anchors, or points and duals do not line up.
    """
    if not anchors:
        raise DimensionError("A cut needs at least one anchor.")
    for year, anchor in anchors.items():
        if set(anchor.point) != set(anchor.duals):
            raise DimensionError(
                "Anchor of year {} has {} values but {} duals.".format(year, len(anchor.point), len(anchor.duals))
            )
    return Cut(iteration, scenario, dict(anchors))


@dataclass
class IterationRecord:
    """One line of the convergence trace."""

    iteration: int
    lower: float
    upper: float
    rel_gap: float
    master_ms: float
    subproblems_ms: float


@dataclass
class BendersState:
    """Bounds, cuts and incumbent of a run."""

    eps: float = 1e-3
    max_iter: int = 100
    iteration: int = 0
    cuts: List[Cut] = field(default_factory=list)
    lower: float = -math.inf
    upper: float = math.inf
    best: Optional[InvestmentPlan] = None
    best_investment: float = 0.0
    lower_history: List[float] = field(default_factory=list)
    upper_history: List[float] = field(default_factory=list)
    records: List[IterationRecord] = field(default_factory=list)
    statuses: Dict[Pair, str] = field(default_factory=dict)

    @property
    def rel_gap(self) -> float:
        """Relative distance between the bounds."""
        return relative_gap(self.lower, self.upper)

    @property
    def is_converged(self) -> bool:
        """Whether the gap is within tolerance."""
        return self.iteration > 0 and self.rel_gap <= self.eps


def update_bounds(
    state: BendersState,
    lower: float,
    sub_costs: Mapping[Pair, float],
    plan: InvestmentPlan,
    investment: float,
    probabilities: Mapping[str, float],
) -> BendersState:
    """
    Record one iteration's bounds.

    The upper bound is the investment cost plus the expected operating cost of the
    plan; the incumbent changes only on strict improvement. The lower bound never
    decreases.
    """
    evaluated = investment + sum(probabilities[w] * cost for (_, w), cost in sub_costs.items())
    state.iteration += 1
    state.lower = max(state.lower, lower)
    if evaluated < state.upper:
        state.upper = evaluated
        state.best = plan
        state.best_investment = investment
    state.lower_history.append(state.lower)
    state.upper_history.append(state.upper)
    return state


@dataclass
class SolveReport:
    """Outcome of a planning run, by decomposition or in one piece."""

    method: str
    converged: bool
    objective: float
    lower: float
    upper: float
    iterations: int
    plan: InvestmentPlan
    operations: Dict[Pair, OperationSolution]
    investment: float
    final_objective: float
    final_gap: float
    eps: float
    relax_uc: bool
    records: List[IterationRecord] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def rel_gap(self) -> float:
        """Relative gap between the bounds."""
        return relative_gap(self.lower, self.upper)


def _map(function: Callable[[Pair], ResultType], keys: Sequence[Pair], parallelism: int) -> List[ResultType]:
    """Apply a function to every key, in order, on up to ``parallelism`` threads."""
    if parallelism <= 1 or len(keys) <= 1:
        return [function(key) for key in keys]
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(function, keys))


def _pairs(instance: SystemInstance, scenarios: ScenarioSet) -> List[Pair]:
    return [(y, w) for y in instance.years for w in scenarios.ids]


def solve_operations(
    instance: SystemInstance,
    calendar: RepresentativeCalendar,
    scenarios: ScenarioSet,
    plan: InvestmentPlan,
    relax_uc: bool,
    discount_operations: bool = False,
    backend: Optional[SolverBackend] = None,
    parallelism: int = 1,
) -> Dict[Pair, OperationSolution]:
    """
    Solve the operations of every (year, scenario) at a fixed plan.

    :raise SolverFailureError: if some subproblem has no optimal solution.
    """
    backend = resolve_backend(backend)

    def solve(pair: Pair) -> OperationSolution:
        y, w = pair
        problem = build_subproblem(instance, calendar, scenarios, y, w, plan, relax_uc, discount_operations)
        if relax_uc:
            lp = solve_lp(problem, backend=backend)
            if not lp.is_optimal:
                raise SolverFailureError("operations ended {}".format(lp.status.value), y, w)
            return operation_solution(problem, lp.x, lp.objective, y, w, True)
        milp = solve_milp(problem, backend=backend)
        if not milp.has_solution or milp.status not in (Status.OPTIMAL, Status.NODE_LIMIT):
            raise SolverFailureError("operations ended {}".format(milp.status.value), y, w)
        if milp.status is not Status.OPTIMAL:
            logger.warning("operations of (%s, %s) stopped at the node limit, gap %g", y, w, milp.gap)
        return operation_solution(problem, milp.x, milp.objective, y, w, False)

    pairs = _pairs(instance, scenarios)
    return dict(zip(pairs, _map(solve, pairs, parallelism)))


def expected_cost(operations: Mapping[Pair, OperationSolution], scenarios: ScenarioSet) -> float:
    """Probability-weighted sum of the operating costs."""
    probabilities = {s.id: s.probability for s in scenarios.scenarios}
    return float(sum(probabilities[w] * op.objective for (_, w), op in sorted(operations.items())))


class BendersDriver:
    """
    Step-by-step execution of the decomposition.

    Subproblem templates are built once per (year, scenario) and re-pinned at each
    iteration; their last optimal bases are kept as warm starts.
    """

    def __init__(
        self,
        instance: SystemInstance,
        calendar: RepresentativeCalendar,
        scenarios: ScenarioSet,
        config: BendersConfig = BendersConfig(),
    ):
        """Prepare a run."""
        self.instance = instance
        self.calendar = calendar
        self.scenarios = scenarios
        self.config = config
        self.backend = resolve_backend(config.backend, config.options)
        self.state = BendersState(config.eps, config.max_iter)
        self.probabilities = {s.id: s.probability for s in scenarios.scenarios}
        self.pairs = _pairs(instance, scenarios)
        self._templates = {}  # type: Dict[Pair, LpProblem]
        self._bases = {}  # type: Dict[Pair, Optional[Basis]]
        self._hint = None  # type: Optional[np.ndarray]

    @property
    def is_done(self) -> bool:
        """Whether the run converged or hit the iteration limit."""
        return self.state.is_converged or self.state.iteration >= self.config.max_iter

    def _template(self, pair: Pair) -> LpProblem:
        if pair not in self._templates:
            y, w = pair
            self._templates[pair] = build_subproblem(
                self.instance,
                self.calendar,
                self.scenarios,
                y,
                w,
                relax_uc=True,
                discount_operations=self.config.discount_operations,
            )
        return self._templates[pair]

    def _evaluate(self, plan: InvestmentPlan) -> Callable[[Pair], Tuple[LpSolution, Optional[Anchor]]]:
        def evaluate(pair: Pair) -> Tuple[LpSolution, Optional[Anchor]]:
            y, _ = pair
            problem = pin(self._template(pair), plan, y)
            solution = solve_lp(problem, warm=self._bases.get(pair), backend=self.backend)
            if not solution.is_optimal:
                return solution, None
            values = plan.year_values(y)
            point = {label: values[label] for label in fixed_columns(problem)}
            return solution, Anchor(solution.objective, point, gradients(problem, solution.duals))

        return evaluate

    def step(self) -> IterationRecord:
        """Run one iteration: master, subproblems, cuts and bounds."""
        iteration = self.state.iteration + 1
        start = time.perf_counter()
        master = build_master(self.instance, self.calendar, self.scenarios, self.state.cuts, iteration)
        solution = solve_milp(master, self._hint, backend=self.backend)
        if not solution.has_solution:
            raise SolverFailureError("master problem ended {}".format(solution.status.value))
        lower = solution.bound if np.isfinite(solution.bound) else solution.objective
        plan = InvestmentPlan.from_solution(master, solution.x, "benders", self.config.options.int_tol)
        investment = investment_cost(master, solution.x)
        master_ms = 1000.0 * (time.perf_counter() - start)

        start = time.perf_counter()
        for pair in self.pairs:
            self._template(pair)
        results = _map(self._evaluate(plan), self.pairs, self.config.parallelism)
        subproblems_ms = 1000.0 * (time.perf_counter() - start)
        anchors = {}  # type: Dict[Pair, Anchor]
        for pair, (sub, anchor) in zip(self.pairs, results):
            self.state.statuses[pair] = sub.status.value
            if anchor is None:
                raise SolverFailureError("subproblem ended {}".format(sub.status.value), *pair)
            self._bases[pair] = sub.basis
            anchors[pair] = anchor
        sub_costs = {pair: anchor.objective for pair, anchor in anchors.items()}
        for w in self.scenarios.ids:
            by_year = {y: anchor for (y, v), anchor in anchors.items() if v == w}
            self.state.cuts.append(make_cut(iteration, w, by_year))

        update_bounds(self.state, lower, sub_costs, plan, investment, self.probabilities)
        record = IterationRecord(
            iteration, self.state.lower, self.state.upper, self.state.rel_gap, master_ms, subproblems_ms
        )
        self.state.records.append(record)
        self._hint = solution.x
        logger.info(
            "iteration %d: lower %.10g upper %.10g gap %.3g (master %.0f ms, subproblems %.0f ms)",
            iteration,
            record.lower,
            record.upper,
            record.rel_gap,
            master_ms,
            subproblems_ms,
        )
        return record

    def run(self) -> BendersState:
        """Iterate until convergence or the iteration limit."""
        while not self.is_done:
            self.step()
        if not self.state.is_converged:
            logger.warning(
                "no convergence after %d iterations, gap %.3g", self.state.iteration, self.state.rel_gap
            )
        return self.state


def run_benders(
    instance: SystemInstance,
    calendar: RepresentativeCalendar,
    scenarios: ScenarioSet,
    config: BendersConfig = BendersConfig(),
) -> SolveReport:
    """
    Solve the planning problem by decomposition.

    :raise SolverFailureError: if the master or a subproblem has no optimal solution.
    """
    start = time.perf_counter()
    driver = BendersDriver(instance, calendar, scenarios, config)
    state = driver.run()
    plan = state.best
    assert plan is not None
    investment = state.best_investment
    operations = solve_operations(
        instance,
        calendar,
        scenarios,
        plan,
        config.relax_uc,
        config.discount_operations,
        driver.backend,
        config.parallelism,
    )
    final = investment + expected_cost(operations, scenarios)
    report = SolveReport(
        method="benders",
        converged=state.is_converged,
        objective=state.upper,
        lower=state.lower,
        upper=state.upper,
        iterations=state.iteration,
        plan=plan,
        operations=operations,
        investment=investment,
        final_objective=final,
        final_gap=_final_gap(final, state.upper),
        eps=config.eps,
        relax_uc=config.relax_uc,
        records=list(state.records),
        wall_time=time.perf_counter() - start,
    )
    logger.info("final pass: %.10g (gap to upper bound %.3g)", final, report.final_gap)
    return report


def run_monolithic(
    instance: SystemInstance,
    calendar: RepresentativeCalendar,
    scenarios: ScenarioSet,
    config: BendersConfig = BendersConfig(),
) -> SolveReport:
    """
    Solve the planning problem in one piece, then the operations of its plan.

    HiGHS presolve is off for the whole problem: it stops short of the optimum on
    objectives with coefficients near 1e8.

    :raise SolverFailureError: if no solution is found.
    """
    start = time.perf_counter()
    backend = resolve_backend(config.backend, replace(config.options, presolve=False))
    problem = build_monolithic(instance, calendar, scenarios, config.relax_uc, config.discount_operations)
    solution = solve_milp(problem, backend=backend)
    if not solution.has_solution:
        raise SolverFailureError("monolithic problem ended {}".format(solution.status.value))
    plan = InvestmentPlan.from_solution(problem, solution.x, "monolithic", config.options.int_tol)
    investment = investment_cost(problem, solution.x)
    operations = solve_operations(
        instance, calendar, scenarios, plan, config.relax_uc, config.discount_operations, backend, config.parallelism
    )
    final = investment + expected_cost(operations, scenarios)
    bound = solution.bound if np.isfinite(solution.bound) else solution.objective
    return SolveReport(
        method="monolithic",
        converged=solution.is_optimal,
        objective=solution.objective,
        lower=bound,
        upper=solution.objective,
        iterations=1,
        plan=plan,
        operations=operations,
        investment=investment,
        final_objective=final,
        final_gap=_final_gap(final, solution.objective),
        eps=config.options.mip_gap,
        relax_uc=config.relax_uc,
        wall_time=time.perf_counter() - start,
    )


def _final_gap(final: float, upper: float) -> float:
    if upper == 0.0:
        return 0.0 if final == 0.0 else math.inf
    return (final - upper) / abs(upper)


def trace_rows(records: Iterable[IterationRecord]) -> List[Dict[str, float]]:
    """The convergence trace as rows of a table."""
    return [
        {
            "iter": r.iteration,
            "z_LB": r.lower,
            "z_UB": r.upper,
            "rel_gap": r.rel_gap,
            "master_ms": r.master_ms,
            "subproblems_ms": r.subproblems_ms,
        }
        for r in records
    ]
