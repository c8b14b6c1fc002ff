# -*- coding: utf-8 -*-
"""Tests for the column catalog and investment plans."""
import numpy as np
import pytest

from pygtep.catalog import (
    UNITS,
    InvestmentPlan,
    OperationSolution,
    VariableCatalog,
    column_count,
    empty_plan,
    first_stage_count,
    first_stage_labels,
    plan_from_values,
    second_stage_count,
)
from pygtep.exceptions import DimensionError
from pygtep.formulation import build_first_stage, build_monolithic, build_subproblem
from pygtep.lp import LpBuilder
from pygtep.toys import load_bundled, random_toy


class TestBundledCounts:
    """Test the closed-form sizes on the bundled toy."""

    @classmethod
    def setup_class(cls):
        """Set the test up."""
        cls.instance, cls.calendar, cls.scenarios = load_bundled()

    def test_first_stage(self):
        """Test the size of x_y."""
        for y in self.instance.years:
            assert first_stage_count(self.instance, self.calendar, y) == 64
            assert len(first_stage_labels(self.instance, self.calendar, y)) == 64

    def test_second_stage(self):
        """Test the size of s_{y,w}."""
        for y in self.instance.years:
            assert second_stage_count(self.instance, self.calendar, y) == 674

    def test_monolithic(self):
        """Test the size of the whole problem."""
        problem = build_monolithic(self.instance, self.calendar, self.scenarios)
        assert column_count(self.instance, self.calendar, len(self.scenarios)) == 2824
        assert problem.n == 2824

    def test_catalog_partition(self):
        """Test that the catalog splits the monolithic columns by stage."""
        problem = build_monolithic(self.instance, self.calendar, self.scenarios)
        catalog = VariableCatalog(problem)
        positions = []
        for y in self.instance.years:
            positions += catalog.first_stage(y)
            for w in self.scenarios.ids:
                positions += catalog.second_stage(y, w)
        assert sorted(positions) == list(range(problem.n))
        assert len(catalog.first_stage(2030)) == 64
        assert len(catalog.second_stage(2031, "HC")) == 674

    def test_subproblem(self):
        """Test that a subproblem holds copies of x_y and the columns of s_{y,w}."""
        problem = build_subproblem(self.instance, self.calendar, self.scenarios, 2030, "LC")
        assert problem.n == 64 + 674
        assert len(problem.fixing_rows) == 64


@pytest.mark.parametrize("seed", range(4))
def test_random_counts(seed):
    """Test the closed-form sizes against generated instances."""
    instance, calendar, scenarios = random_toy(seed)
    problem = build_monolithic(instance, calendar, scenarios, relax_uc=True)
    catalog = VariableCatalog(problem)
    assert problem.n == column_count(instance, calendar, len(scenarios))
    for y in instance.years:
        assert len(catalog.first_stage(y)) == first_stage_count(instance, calendar, y)
        for w in scenarios.ids:
            assert len(catalog.second_stage(y, w)) == second_stage_count(instance, calendar, y)


class TestVariableCatalog:
    """Test the symbol index of a problem."""

    @classmethod
    def setup_class(cls):
        """Set the test up."""
        builder = LpBuilder()
        builder.add_column("N[k=K1,y=2030]", 0, 3, integer=True)
        builder.add_column("S[z=Z1,y=2030]")
        builder.add_column("p[k=K1,t=1,c=d1,y=2030,w=LC]")
        builder.add_column("p[k=K1,t=2,c=d1,y=2030,w=LC]")
        builder.add_column("theta[w=LC]")
        cls.problem = builder.build()
        cls.catalog = VariableCatalog(cls.problem)

    def test_symbols(self):
        """Test the symbols in order of appearance."""
        assert self.catalog.symbols == ["N", "S", "p", "theta"]

    def test_stages(self):
        """Test the stage lookups."""
        assert self.catalog.first_stage(2030) == [0, 1]
        assert self.catalog.second_stage(2030, "LC") == [2, 3]
        assert self.catalog.second_stage(2030, "HC") == []
        assert self.catalog.first_stage(2031) == []

    def test_values(self):
        """Test the values of a symbol."""
        x = np.array([2.0, 1.5, 10.0, 20.0, 7.0])
        assert self.catalog.values(x, "p") == {
            "p[k=K1,t=1,c=d1,y=2030,w=LC]": 10.0,
            "p[k=K1,t=2,c=d1,y=2030,w=LC]": 20.0,
        }
        assert self.catalog.values(x, "missing") == {}

    def test_from_solution(self):
        """Test that first-stage values are extracted and integers rounded."""
        x = np.array([2.0000001, 1.5, 10.0, 20.0, 7.0])
        plan = InvestmentPlan.from_solution(self.problem, x, "test")
        assert plan.provenance == "test"
        assert plan.values == {2030: {"N[k=K1,y=2030]": 2.0, "S[z=Z1,y=2030]": 1.5}}

    def test_from_solution_keeps_fractional_integers(self):
        """Test that values far from an integer are not rounded."""
        x = np.array([1.4, 1.5, 10.0, 20.0, 7.0])
        plan = InvestmentPlan.from_solution(self.problem, x, "test")
        assert plan.values[2030]["N[k=K1,y=2030]"] == 1.4
        assert plan.integrality_violations() == ["N[k=K1,y=2030]"]


class TestInvestmentPlan:
    """Test the accessors of a plan."""

    @classmethod
    def setup_class(cls):
        """Set the test up."""
        cls.plan = InvestmentPlan(
            {
                2030: {"N[k=K1,y=2030]": 3.0, "Nplus[k=K1,y=2030]": 1.0, "S[z=Z1,y=2030]": 5.0},
                2031: {"N[k=K1,y=2031]": 3.0, "Nplus[k=K1,y=2031]": 0.0, "S[z=Z1,y=2031]": 0.0},
            },
            "file",
        )

    def test_years(self):
        """Test the years of a plan."""
        assert self.plan.years == (2030, 2031)

    def test_missing_year(self):
        """Test the lookup of an unknown year."""
        with pytest.raises(DimensionError, match="Plan has no values for year 2040."):
            self.plan.year_values(2040)

    def test_vector(self):
        """Test the alignment to labels."""
        vector = self.plan.vector(2030, ["S[z=Z1,y=2030]", "N[k=K1,y=2030]"])
        assert vector.tolist() == [5.0, 3.0]

    def test_vector_missing_label(self):
        """Test that missing values are reported."""
        with pytest.raises(DimensionError, match="misses 1 first-stage values in year 2030"):
            self.plan.vector(2030, ["W[z=Z1,y=2030]"])

    def test_flat(self):
        """Test that flattening keeps every value."""
        assert len(self.plan.flat()) == 6
        assert plan_from_values(self.plan.flat()).values == self.plan.values

    def test_additions(self):
        """Test the yearly additions."""
        assert self.plan.additions() == {
            2030: {"Nplus[k=K1]": 1.0, "S[z=Z1]": 5.0},
            2031: {"Nplus[k=K1]": 0.0, "S[z=Z1]": 0.0},
        }

    def test_installed(self):
        """Test the installed assets."""
        assert self.plan.installed() == {2030: {"N[k=K1]": 3.0}, 2031: {"N[k=K1]": 3.0}}

    def test_integral(self):
        """Test a plan without integrality violations."""
        assert self.plan.integrality_violations() == []

    def test_second_stage_value(self):
        """Test that operating values are not accepted as a plan."""
        with pytest.raises(DimensionError, match="is not a first-stage column"):
            plan_from_values({"p[k=K1,t=1,c=d1,y=2030,w=LC]": 1.0})


def test_empty_plan_covers_first_stage(toy2z):
    """Test that the zero plan has a value for every first-stage column."""
    instance, calendar, _ = toy2z
    values = empty_plan(instance, calendar)
    problem = build_first_stage(instance, calendar)
    assert sorted(values) == sorted(problem.col_labels)
    assert set(values.values()) == {0.0}
    assert sum(1 for label in values if label.startswith(UNITS + "[")) == 4


def test_slack_totals():
    """Test that slack energy is weighted by the representative days."""
    solution = OperationSolution(
        2030,
        "LC",
        0.0,
        {
            "ENP[z=Z1,t=1,c=d1,y=2030,w=LC]": 2.0,
            "ENP[z=Z1,t=2,c=d2,y=2030,w=LC]": 1.0,
            "OG[z=Z1,t=1,c=d1,y=2030,w=LC]": 0.5,
            "p[k=K1,t=1,c=d1,y=2030,w=LC]": 40.0,
        },
    )
    totals = solution.slack_totals({"d1": 300.0, "d2": 65.0})
    assert totals == {"ENP": 665.0, "OG": 150.0, "RNP": 0.0, "GCURT": 0.0}
