# -*- coding: utf-8 -*-
"""
Machine-readable outputs of a run.

Tables are written with pandas, numbers with 17 significant digits so that they
parse back to the values of the JSON documents.
"""
import json
import logging
import math
import os
from typing import Any, Dict, List, Mapping

import pandas as pd

from pygtep.analysis import PlanEvaluation, VssResult
from pygtep.benders import SolveReport, trace_rows
from pygtep.calendars import ScenarioSet
from pygtep.catalog import COST_TERMS, InvestmentPlan, OperationSolution

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
PLAN_CSV = "plan.csv"
COSTS_CSV = "costs.csv"
CONVERGENCE_CSV = "convergence.csv"
SOLUTION_JSON = "solution.json"
SUMMARY_JSON = "summary.json"
EVALUATION_JSON = "evaluation.json"
VSS_JSON = "vss.json"
EXPECTED = "expected"


def _number(value: float) -> Any:
    """JSON has no infinities: they are written as null."""
    value = float(value)
    return value if math.isfinite(value) else None


def plan_frame(plan: InvestmentPlan) -> pd.DataFrame:
    """One row per year, one column per technology addition."""
    frame = pd.DataFrame.from_dict(plan.additions(), orient="index").fillna(0.0)
    frame = frame.reindex(sorted(frame.columns), axis=1)
    frame.index.name = "year"
    return frame.sort_index()


def costs_frame(
    investment: float, operations: Mapping[Any, OperationSolution], scenarios: ScenarioSet
) -> pd.DataFrame:
    """
    Itemized cost per scenario over all years, plus the expected row.

    The investment column is the same on every row: the plan does not depend on the scenario.
    """
    rows = {}  # type: Dict[str, Dict[str, float]]
    for w in scenarios.ids:
        rows[w] = {term: 0.0 for term in COST_TERMS}
        rows[w]["operations"] = 0.0
    for (_, w), op in sorted(operations.items()):
        for term, value in op.breakdown.items():
            rows[w][term] += value
        rows[w]["operations"] += op.objective
    frame = pd.DataFrame.from_dict(rows, orient="index", columns=list(COST_TERMS) + ["operations"])
    frame.insert(0, "investment", investment)
    frame["total"] = frame["investment"] + frame["operations"]
    probabilities = pd.Series({s.id: s.probability for s in scenarios.scenarios})
    frame.loc[EXPECTED] = frame.mul(probabilities, axis=0).sum()
    frame.loc[EXPECTED, "investment"] = investment
    frame.loc[EXPECTED, "total"] = frame.loc[EXPECTED, "investment"] + frame.loc[EXPECTED, "operations"]
    frame.index.name = "scenario"
    return frame


def convergence_frame(report: SolveReport) -> pd.DataFrame:
    """The per-iteration bounds and timings."""
    columns = ["iter", "z_LB", "z_UB", "rel_gap", "master_ms", "subproblems_ms"]
    return pd.DataFrame(trace_rows(report.records), columns=columns)


def write_frame(frame: pd.DataFrame, path: str, index: bool = True) -> str:
    frame.to_csv(path, index=index, float_format=FLOAT_FORMAT)
    logger.debug("wrote %s", path)
    return path


def write_document(document: Any, path: str) -> str:
    with open(path, "w") as f:
        json.dump(document, f, indent=2, sort_keys=True, allow_nan=False)
        f.write("\n")
    logger.debug("wrote %s", path)
    return path


def summary_document(report: SolveReport) -> Dict[str, Any]:
    """Objective, bounds, gaps, iterations and wall time of a run."""
    return {
        "method": report.method,
        "converged": report.converged,
        "objective": _number(report.objective),
        "lower": _number(report.lower),
        "upper": _number(report.upper),
        "rel_gap": _number(report.rel_gap),
        "iterations": report.iterations,
        "investment": _number(report.investment),
        "final_objective": _number(report.final_objective),
        "final_gap": _number(report.final_gap),
        "eps": report.eps,
        "relax_uc": report.relax_uc,
        "wall_time": report.wall_time,
    }


def _operations_document(operations: Mapping[Any, OperationSolution]) -> Dict[str, Any]:
    return {
        "{}/{}".format(y, w): {
            "year": y,
            "scenario": w,
            "objective": _number(op.objective),
            "relaxed": op.relaxed,
            "breakdown": {term: _number(v) for term, v in op.breakdown.items()},
            "values": {label: _number(v) for label, v in op.values.items()},
        }
        for (y, w), op in sorted(operations.items())
    }


def solution_document(report: SolveReport) -> Dict[str, Any]:
    """The plan and the operations of every (year, scenario)."""
    return {
        "provenance": report.plan.provenance,
        "plan": {label: _number(v) for label, v in sorted(report.plan.flat().items())},
        "operations": _operations_document(report.operations),
    }


def evaluation_document(evaluation: PlanEvaluation) -> Dict[str, Any]:
    """Every field of a plan evaluation."""
    return {
        "provenance": evaluation.provenance,
        "digest": evaluation.digest,
        "uc": evaluation.uc,
        "investment": _number(evaluation.investment),
        "expected_operations": _number(evaluation.expected_operations),
        "expected_total": _number(evaluation.expected_total),
        "totals": {w: _number(v) for w, v in evaluation.totals.items()},
        "breakdowns": {w: {t: _number(v) for t, v in b.items()} for w, b in evaluation.breakdowns.items()},
        "slack_totals": {w: {s: _number(v) for s, v in b.items()} for w, b in evaluation.slack_totals.items()},
        "operations": _operations_document(evaluation.operations),
    }


def vss_document(result: VssResult) -> Dict[str, Any]:
    return {
        "stoch_total": _number(result.stochastic_total),
        "mvp_expected_total": _number(result.mvp_expected_total),
        "vss": _number(result.vss),
        "vss_pct": _number(result.vss_pct),
    }


def write_reports(out_dir: str, report: SolveReport, scenarios: ScenarioSet) -> List[str]:
    """
    Write the outputs of a planning run.

    :return: the paths written.
    """
    os.makedirs(out_dir, exist_ok=True)
    paths = [
        write_frame(plan_frame(report.plan), os.path.join(out_dir, PLAN_CSV)),
        write_frame(costs_frame(report.investment, report.operations, scenarios), os.path.join(out_dir, COSTS_CSV)),
    ]
    if report.method == "benders":
        paths.append(write_frame(convergence_frame(report), os.path.join(out_dir, CONVERGENCE_CSV), index=False))
    paths.append(write_document(solution_document(report), os.path.join(out_dir, SOLUTION_JSON)))
    paths.append(write_document(summary_document(report), os.path.join(out_dir, SUMMARY_JSON)))
    return paths


def write_evaluation(out_dir: str, evaluation: PlanEvaluation, scenarios: ScenarioSet, name: str = EVALUATION_JSON) -> str:
    """Write a plan evaluation as JSON, with its costs table next to it."""
    os.makedirs(out_dir, exist_ok=True)
    stem = os.path.splitext(name)[0]
    write_frame(
        costs_frame(evaluation.investment, evaluation.operations, scenarios),
        os.path.join(out_dir, "{}_costs.csv".format(stem)),
    )
    return write_document(evaluation_document(evaluation), os.path.join(out_dir, name))


def write_vss(out_dir: str, result: VssResult) -> str:
    os.makedirs(out_dir, exist_ok=True)
    return write_document(vss_document(result), os.path.join(out_dir, VSS_JSON))
