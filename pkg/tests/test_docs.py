# -*- coding: utf-8 -*-
"""This module contains tests for the code snippets of the documentation."""
import pytest

from pygtep import (
    BendersConfig,
    build_monolithic,
    compute_vss,
    evaluate_plan,
    run_benders,
    run_monolithic,
    solve_milp,
    solve_mvp,
    validate_instance,
)
from pygtep.benders import trace_rows
from pygtep.mps import to_mps
from pygtep.toys import tiny_toy


def test_quickstart():
    """Test the quickstart guide."""
    instance, calendar, scenarios = tiny_toy(candidate_units=2, scenarios=(("LO", 0.5, 10.0), ("HI", 0.5, 90.0)))

    report = validate_instance(instance, calendar, scenarios)
    assert report.ok

    config = BendersConfig(eps=1e-6, relax_uc=True, backend="highs")
    monolithic = run_monolithic(instance, calendar, scenarios, config)
    benders = run_benders(instance, calendar, scenarios, config)
    assert benders.converged
    assert benders.objective == pytest.approx(monolithic.objective, rel=1e-5)

    assert benders.plan.additions()[2030]["Nplus[k=K1]"] == 2.0

    rows = trace_rows(benders.records)
    assert rows[-1]["z_LB"] <= rows[-1]["z_UB"]

    mvp_plan, _ = solve_mvp(instance, calendar, scenarios, "benders", config)
    evaluation = evaluate_plan(instance, calendar, scenarios, mvp_plan, uc="relaxed", backend="highs")
    result = compute_vss(benders.final_objective, evaluation)
    assert result.vss == pytest.approx(0.0, abs=1e-5 * benders.final_objective)

    problem = build_monolithic(instance, calendar, scenarios, relax_uc=True)
    solution = solve_milp(problem, backend="highs")
    assert solution.objective == pytest.approx(monolithic.objective, rel=1e-5)
    assert to_mps(problem).endswith("ENDATA\n")
