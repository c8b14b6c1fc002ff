# -*- coding: utf-8 -*-
"""Evaluation of fixed plans, the mean-value problem and the value of the stochastic solution."""
import logging
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from pygtep._internal_utils import content_digest
from pygtep.benders import (
    BendersConfig,
    Pair,
    SolveReport,
    expected_cost,
    run_benders,
    run_monolithic,
    solve_operations,
)
from pygtep.calendars import (
    RepresentativeCalendar,
    ScenarioSet,
    calendar_to_document,
    mean_value_scenario,
    scenarios_to_document,
)
from pygtep.catalog import SLACK_SYMBOLS, InvestmentPlan, OperationSolution
from pygtep.exceptions import DimensionError, InfeasiblePlanError, MismatchedInputsError
from pygtep.formulation import build_first_stage, investment_cost
from pygtep.lp import SolverOptions
from pygtep.solver import resolve_backend
from pygtep.system import SystemInstance, instance_to_document

logger = logging.getLogger(__name__)

UC_MODES = ("integer", "relaxed")
METHODS = ("benders", "monolithic")


def digest(instance: SystemInstance, calendar: RepresentativeCalendar, scenarios: ScenarioSet) -> str:
    """Fingerprint of a set of inputs, stable across runs."""
    return content_digest(
        instance_to_document(instance), calendar_to_document(calendar), scenarios_to_document(scenarios)
    )


@dataclass(frozen=True)
class PlanEvaluation:
    """Operating costs of a fixed plan under every scenario."""

    provenance: str
    digest: str
    uc: str
    investment: float
    totals: Mapping[str, float]
    breakdowns: Mapping[str, Mapping[str, float]]
    slack_totals: Mapping[str, Mapping[str, float]]
    expected_operations: float
    operations: Mapping[Pair, OperationSolution] = field(default_factory=dict, repr=False)

    @property
    def expected_total(self) -> float:
        """Investment plus expected operating cost."""
        return self.investment + self.expected_operations


def check_plan(
    instance: SystemInstance,
    calendar: RepresentativeCalendar,
    plan: InvestmentPlan,
    options: SolverOptions = SolverOptions(),
) -> float:
    """
    Check a plan against the first-stage constraints.

    :return: the discounted investment cost of the plan.
    :raise DimensionError: if the plan misses a first-stage value.
    :raise InfeasiblePlanError: if a bound, integrality or first-stage row is violated.
    """
    problem = build_first_stage(instance, calendar)
    values = plan.flat()
    missing = [label for label in problem.col_labels if label not in values]
    if missing:
        raise DimensionError("Plan misses {} first-stage values, e.g. {}.".format(len(missing), missing[0]))
    x = np.array([values[label] for label in problem.col_labels], dtype=float)
    violations = problem.violations(x, options.feas_tol, check_integrality=True)
    if violations:
        raise InfeasiblePlanError(
            "Plan violates {} first-stage constraints, e.g. {}.".format(len(violations), "; ".join(violations[:3]))
        )
    return investment_cost(problem, x)


def evaluate_plan(
    instance: SystemInstance,
    calendar: RepresentativeCalendar,
    scenarios: ScenarioSet,
    plan: InvestmentPlan,
    uc: str = "integer",
    discount_operations: bool = False,
    backend: Optional[str] = None,
    parallelism: int = 1,
    options: SolverOptions = SolverOptions(),
) -> PlanEvaluation:
    """
    Solve the operations of a fixed plan under every scenario.

    :param uc: ``integer`` keeps commitment integral, ``relaxed`` relaxes it.
    :raise DimensionError: if the plan misses a first-stage value.
    :raise InfeasiblePlanError: if the plan violates the first-stage constraints.
    :raise SolverFailureError: if some operating problem has no optimal solution.
    """
    if uc not in UC_MODES:
        raise ValueError("Commitment mode must be one of {}, found {!r}.".format(UC_MODES, uc))
    investment = check_plan(instance, calendar, plan, options)
    operations = solve_operations(
        instance,
        calendar,
        scenarios,
        plan,
        relax_uc=uc == "relaxed",
        discount_operations=discount_operations,
        backend=resolve_backend(backend, options),
        parallelism=parallelism,
    )
    totals = {w: 0.0 for w in scenarios.ids}  # type: Dict[str, float]
    breakdowns = {w: {} for w in scenarios.ids}  # type: Dict[str, Dict[str, float]]
    slacks = {w: {symbol: 0.0 for symbol in SLACK_SYMBOLS} for w in scenarios.ids}  # type: Dict[str, Dict[str, float]]
    for (y, w), op in sorted(operations.items()):
        totals[w] += op.objective
        for term, value in op.breakdown.items():
            breakdowns[w][term] = breakdowns[w].get(term, 0.0) + value
        for symbol, value in op.slack_totals(calendar[y].weights).items():
            slacks[w][symbol] += value
    evaluation = PlanEvaluation(
        provenance=plan.provenance,
        digest=digest(instance, calendar, scenarios),
        uc=uc,
        investment=investment,
        totals=totals,
        breakdowns=breakdowns,
        slack_totals=slacks,
        expected_operations=expected_cost(operations, scenarios),
        operations=operations,
    )
    logger.info(
        "plan from %s: investment %.10g, expected total %.10g", plan.provenance, investment, evaluation.expected_total
    )
    return evaluation


def solve_planning(
    instance: SystemInstance,
    calendar: RepresentativeCalendar,
    scenarios: ScenarioSet,
    method: str = "benders",
    config: BendersConfig = BendersConfig(),
) -> SolveReport:
    """Solve the planning problem with the chosen method."""
    if method not in METHODS:
        raise ValueError("Method must be one of {}, found {!r}.".format(METHODS, method))
    runner = run_benders if method == "benders" else run_monolithic
    return runner(instance, calendar, scenarios, config)


def solve_mvp(
    instance: SystemInstance,
    calendar: RepresentativeCalendar,
    scenarios: ScenarioSet,
    method: str = "benders",
    config: BendersConfig = BendersConfig(),
) -> Tuple[InvestmentPlan, float]:
    """
    Solve the problem with every scenario replaced by the mean scenario.

    :return: the mean-value plan and its objective.
    """
    mean = mean_value_scenario(scenarios)
    report = solve_planning(instance, calendar, mean, method, config)
    if not report.converged:
        logger.warning(
            "mean-value problem stopped after %d iterations with gap %.3g; its plan is not optimal",
            report.iterations,
            report.rel_gap,
        )
    plan = InvestmentPlan(report.plan.values, "mvp")
    return plan, report.objective


@dataclass(frozen=True)
class VssResult:
    """Value of the stochastic solution, in money and relative to the mean-value plan."""

    stochastic_total: float
    mvp_expected_total: float

    @property
    def vss(self) -> float:
        """Expected cost of the mean-value plan minus that of the stochastic plan."""
        return self.mvp_expected_total - self.stochastic_total

    @property
    def vss_pct(self) -> float:
        """VSS as a share of the mean-value plan's expected cost."""
        if self.mvp_expected_total == 0.0:
            return 0.0
        return self.vss / self.mvp_expected_total


def compute_vss(
    stoch_objective: float,
    mvp_eval: PlanEvaluation,
    stoch_digest: Optional[str] = None,
    stoch_uc: Optional[str] = None,
) -> VssResult:
    """
    Compare the stochastic objective with the evaluated mean-value plan.

    :param stoch_digest: digest of the inputs the stochastic objective comes from.
    :param stoch_uc: commitment mode of the stochastic operations, "relaxed" or "integer".
    :raise MismatchedInputsError: if the digests or the commitment modes differ.
    """
    if stoch_uc is not None and stoch_uc != mvp_eval.uc:
        raise MismatchedInputsError(
            "Stochastic solution and mean-value evaluation use different commitment ({} != {}).".format(
                stoch_uc, mvp_eval.uc
            )
        )
    if stoch_digest is not None and stoch_digest != mvp_eval.digest:
        raise MismatchedInputsError(
            "Stochastic solution and mean-value evaluation come from different inputs ({} != {}).".format(
                stoch_digest[:12], mvp_eval.digest[:12]
            )
        )
    result = VssResult(float(stoch_objective), mvp_eval.expected_total)
    if result.vss < 0:
        logger.warning("negative value of the stochastic solution: %.10g", result.vss)
    return result
