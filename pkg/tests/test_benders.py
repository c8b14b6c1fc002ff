# -*- coding: utf-8 -*-
"""Tests for the decomposition."""
import dataclasses
import math

import numpy as np
import pytest

from pygtep.benders import (
    Anchor,
    BendersConfig,
    BendersDriver,
    BendersState,
    make_cut,
    run_benders,
    run_monolithic,
    solve_operations,
    trace_rows,
    update_bounds,
)
from pygtep.catalog import InvestmentPlan
from pygtep.exceptions import DimensionError
from pygtep.formulation import build_first_stage
from pygtep.impl import highs
from pygtep.solver import solve_milp
from pygtep.toys import random_toy, tiny_toy

from .conftest import EXACT

HOURS_PER_YEAR = 365 * 24
HIGHS = BendersConfig(eps=1e-4, max_iter=300, relax_uc=True, backend="highs", options=EXACT)


class TestCuts:
    """Test the cut objects."""

    def test_no_anchor(self):
        """Test that a cut needs an anchor."""
        with pytest.raises(DimensionError, match="A cut needs at least one anchor."):
            make_cut(1, "LC", {})

    def test_misaligned_anchor(self):
        """Test that points and duals must share their labels."""
        with pytest.raises(DimensionError, match="Anchor of year 2030 has 2 values but 1 duals."):
            make_cut(1, "LC", {2030: Anchor(1.0, {"a": 0.0, "b": 0.0}, {"a": 1.0})})

    def test_sum_over_years(self):
        """Test that a cut adds the anchors of every year."""
        cut = make_cut(
            3,
            "LC",
            {2030: Anchor(10.0, {"a": 1.0}, {"a": -2.0}), 2031: Anchor(5.0, {"b": 0.0}, {"b": -1.0})},
        )
        assert cut.gradient == {"a": -2.0, "b": -1.0}
        assert cut.intercept == pytest.approx(17.0)
        assert cut.evaluate({"a": 2.0, "b": 1.0}) == pytest.approx(12.0)
        assert cut.evaluate({"a": 1.0, "b": 0.0}) == pytest.approx(15.0)


class TestBounds:
    """Test the bookkeeping of the bounds."""

    def test_update(self):
        """Test the upper bound, the incumbent and the lower bound."""
        probabilities = {"LC": 0.5, "HC": 0.5}
        first, second, third = InvestmentPlan({}, "a"), InvestmentPlan({}, "b"), InvestmentPlan({}, "c")
        state = BendersState()
        update_bounds(state, 10.0, {(2030, "LC"): 100.0, (2030, "HC"): 200.0}, first, 5.0, probabilities)
        assert state.upper == 155.0
        assert state.best is first
        update_bounds(state, 8.0, {(2030, "LC"): 100.0, (2030, "HC"): 200.0}, second, 5.0, probabilities)
        assert state.lower == 10.0
        assert state.best is first
        update_bounds(state, 150.0, {(2030, "LC"): 90.0, (2030, "HC"): 200.0}, third, 0.0, probabilities)
        assert state.upper == 145.0
        assert state.best is third
        assert state.best_investment == 0.0
        assert state.lower_history == [10.0, 10.0, 150.0]
        assert state.upper_history == [155.0, 155.0, 145.0]
        assert state.iteration == 3
        assert state.rel_gap == 0.0

    def test_fresh_state(self):
        """Test that a state without iterations is not converged."""
        state = BendersState(eps=1.0)
        assert not state.is_converged
        assert state.rel_gap == math.inf


class TestConfig:
    """Test the checks of the settings."""

    def test_eps(self):
        """Test a negative tolerance."""
        with pytest.raises(ValueError, match="Tolerance eps must be nonnegative"):
            BendersConfig(eps=-1e-3)

    @pytest.mark.parametrize("name", ["max_iter", "parallelism"])
    def test_counts(self, name):
        """Test counts below one."""
        with pytest.raises(ValueError, match="Option {} must be at least 1".format(name)):
            BendersConfig(**{name: 0})

    def test_default_driver(self):
        """Test a driver built without explicit settings."""
        instance, calendar, scenarios = tiny_toy(units=2)
        driver = BendersDriver(instance, calendar, scenarios)
        assert driver.config == BendersConfig()
        assert driver.config.eps == 1e-3
        assert not driver.is_done


class TestTiny:
    """Test runs whose optimum is known."""

    def test_no_candidates(self):
        """Test that a fixed system converges once the cut is in."""
        instance, calendar, scenarios = tiny_toy(units=2)
        report = run_benders(instance, calendar, scenarios, HIGHS)
        assert report.converged
        assert report.iterations == 2
        assert report.records[0].lower == pytest.approx(0.0, abs=1e-6)
        assert report.objective == pytest.approx(HOURS_PER_YEAR * 100.0 * 55.0, rel=1e-9)
        assert report.final_objective == pytest.approx(report.objective, rel=1e-9)

    def test_candidates(self):
        """Test that the candidates worth building are built."""
        instance, calendar, scenarios = tiny_toy(candidate_units=2)
        report = run_benders(instance, calendar, scenarios, HIGHS)
        assert report.converged
        assert report.plan.values[2030]["N[k=K1,y=2030]"] == 2.0
        assert report.investment == pytest.approx(1e7)
        assert report.objective == pytest.approx(1e7 + HOURS_PER_YEAR * 100.0 * 55.0, rel=2e-4)

    def test_integer_final_pass(self):
        """Test the final pass with integral commitment."""
        instance, calendar, scenarios = tiny_toy(candidate_units=2)
        config = dataclasses.replace(HIGHS, relax_uc=False)
        report = run_benders(instance, calendar, scenarios, config)
        assert all(not op.relaxed for op in report.operations.values())
        assert report.final_objective == pytest.approx(report.objective, rel=1e-6)

    def test_iteration_limit(self):
        """Test a run stopped after one iteration."""
        instance, calendar, scenarios = tiny_toy(units=2)
        report = run_benders(instance, calendar, scenarios, dataclasses.replace(HIGHS, max_iter=1))
        assert not report.converged
        assert report.iterations == 1
        rows = trace_rows(report.records)
        assert len(rows) == 1
        assert sorted(rows[0]) == ["iter", "master_ms", "rel_gap", "subproblems_ms", "z_LB", "z_UB"]

    def test_parallel_subproblems(self):
        """Test that threads give the same run."""
        inputs = tiny_toy(candidate_units=2, years=(2030, 2031), scenarios=(("A", 0.4, 20.0), ("B", 0.6, 80.0)))
        serial = run_benders(*inputs, HIGHS)
        parallel = run_benders(*inputs, dataclasses.replace(HIGHS, parallelism=4))
        assert parallel.iterations == serial.iterations
        assert parallel.objective == pytest.approx(serial.objective, rel=1e-9)

    def test_parallel_step_records(self):
        """Test that a threaded step keeps the status and the basis of every subproblem."""
        inputs = tiny_toy(years=(2030, 2031), scenarios=(("A", 0.4, 20.0), ("B", 0.6, 80.0)))
        config = BendersConfig(relax_uc=True, parallelism=2, backend="builtin", options=EXACT)
        driver = BendersDriver(*inputs, config)
        driver.step()
        assert driver.state.statuses == {pair: "optimal" for pair in driver.pairs}
        assert sorted(driver._bases) == sorted(driver.pairs)
        assert all(basis is not None for basis in driver._bases.values())


@pytest.mark.parametrize(
    "inputs",
    [tiny_toy(candidate_units=2, solar_max=80.0), random_toy(0), random_toy(1)],
    ids=["tiny", "random-0", "random-1"],
)
def test_agrees_with_monolithic(inputs):
    """Test that both methods reach the same optimum of the relaxed problem."""
    instance, calendar, scenarios = inputs
    benders = run_benders(instance, calendar, scenarios, HIGHS)
    monolithic = run_monolithic(instance, calendar, scenarios, HIGHS)
    assert benders.converged
    assert benders.lower <= monolithic.objective * (1 + 1e-6) + 1e-6
    assert benders.objective == pytest.approx(monolithic.objective, rel=2e-4)


def test_monolithic_without_presolve(monkeypatch):
    """Test that the whole problem goes to HiGHS with presolve off."""
    seen = []
    run = highs.milp

    def milp_and_record(*args, **kwargs):
        seen.append(kwargs["options"]["presolve"])
        return run(*args, **kwargs)

    monkeypatch.setattr(highs, "milp", milp_and_record)
    report = run_monolithic(*tiny_toy(candidate_units=2), HIGHS)
    assert seen == [False]
    assert report.plan.values[2030]["N[k=K1,y=2030]"] == 2.0
    assert HIGHS.options.presolve


def test_bundled_agrees_with_monolithic(toy2z):
    """Test the bundled toy."""
    benders = run_benders(*toy2z, HIGHS)
    monolithic = run_monolithic(*toy2z, HIGHS)
    assert benders.converged
    assert benders.objective == pytest.approx(monolithic.objective, rel=2e-4)
    assert np.all(np.diff([r.lower for r in benders.records]) >= 0.0)
    assert np.all(np.diff([r.upper for r in benders.records]) <= 0.0)


class TestCutValidity:
    """Test that cuts never exceed the operating cost of a feasible plan."""

    @classmethod
    def setup_class(cls):
        """Run a few iterations and draw feasible plans."""
        cls.instance, cls.calendar, cls.scenarios = random_toy(3)
        cls.driver = BendersDriver(cls.instance, cls.calendar, cls.scenarios, HIGHS)
        for _ in range(3):
            cls.driver.step()
        first_stage = build_first_stage(cls.instance, cls.calendar)
        rng = np.random.default_rng(7)
        cls.plans = []
        for _ in range(3):
            cost = first_stage.cost + rng.uniform(-1e5, 1e5, first_stage.n)
            solution = solve_milp(dataclasses.replace(first_stage, cost=cost), backend="highs")
            assert solution.has_solution
            cls.plans.append(InvestmentPlan.from_solution(first_stage, solution.x, "random"))

    def test_cut_count(self):
        """Test that every iteration adds one cut per scenario."""
        assert len(self.driver.state.cuts) == 3 * len(self.scenarios)

    def test_cuts_under_estimate(self):
        """Test every cut at every drawn plan."""
        for plan in self.plans:
            operations = solve_operations(self.instance, self.calendar, self.scenarios, plan, relax_uc=True)
            values = plan.flat()
            for cut in self.driver.state.cuts:
                cost = sum(op.objective for (_, w), op in operations.items() if w == cut.scenario)
                assert cut.evaluate(values) <= cost + 1e-6 * max(abs(cost), 1.0)
