# -*- coding: utf-8 -*-
"""Tests for the problem representation."""
import numpy as np
import pytest

from pygtep.exceptions import DimensionError
from pygtep.lp import LpBuilder, SolverOptions


class TestLpBuilder:
    """Test building a problem."""

    @classmethod
    def setup_class(cls):
        """Set the test up."""
        builder = LpBuilder("demo")
        cls.x = builder.add_column("x", 0.0, 4.0, 1.0)
        cls.n = builder.add_column("n", 0.0, 3.0, 2.0, integer=True)
        builder.add_cost(cls.x, 0.5)
        builder.add_row("r1", [(cls.x, 1.0), (cls.n, 1.0), (cls.x, 1.0)], "G", 2.0)
        builder.add_row("r2", {cls.n: 1.0}, "E", 1.0, fixing=True)
        builder.offset = 10.0
        cls.problem = builder.build()

    def test_dimensions(self):
        """Test the sizes and labels."""
        assert (self.problem.n, self.problem.m) == (2, 2)
        assert self.problem.col_labels == ("x", "n")
        assert self.problem.row_labels == ("r1", "r2")

    def test_duplicate_entries_are_summed(self):
        """Test that repeated coefficients add up."""
        assert self.problem.matrix[0, self.x] == 2.0

    def test_cost_accumulates(self):
        """Test add_cost."""
        assert self.problem.cost[self.x] == 1.5

    def test_lookups(self):
        """Test label lookups."""
        assert self.problem.column("n") == 1
        assert self.problem.row("r2") == 1
        with pytest.raises(KeyError):
            self.problem.column("missing")

    def test_integrality(self):
        """Test the integer columns."""
        assert self.problem.is_mip
        assert list(self.problem.integer_columns) == [1]
        assert not self.problem.relaxed().is_mip

    def test_fixing_rows(self):
        """Test that fixing rows are recorded."""
        assert self.problem.fixing_rows == frozenset({1})

    def test_objective_includes_offset(self):
        """Test objective evaluation."""
        assert self.problem.objective_value(np.array([1.0, 1.0])) == 13.5

    def test_feasible_point(self):
        """Test a point without violations."""
        assert self.problem.violations(np.array([0.5, 1.0])) == []

    def test_violations(self):
        """Test the reported violations."""
        messages = self.problem.violations(np.array([5.0, 0.5]))
        assert any(m.startswith("row r2") for m in messages)
        assert any(m.startswith("column x") for m in messages)
        assert any("not integral" in m for m in messages)
        assert self.problem.violations(np.array([1.0, 1.5]), check_integrality=False) == ["row r2 E 1.0: activity 1.5"]

    def test_with_bounds(self):
        """Test that a copy with other bounds keeps the rest."""
        copy = self.problem.with_bounds(np.zeros(2), np.ones(2))
        assert copy.upper.tolist() == [1.0, 1.0]
        assert copy.row_labels == self.problem.row_labels
        assert copy.offset == self.problem.offset

    def test_duplicate_label(self):
        """Test that labels are unique."""
        builder = LpBuilder()
        builder.add_column("x")
        with pytest.raises(ValueError, match="Duplicate label 'x'"):
            builder.add_column("x")

    def test_crossed_bounds(self):
        """Test that crossed bounds are refused."""
        with pytest.raises(ValueError, match="crossed bounds"):
            LpBuilder().add_column("x", 2.0, 1.0)

    def test_unknown_sense(self):
        """Test that row senses are checked."""
        builder = LpBuilder()
        x = builder.add_column("x")
        with pytest.raises(ValueError, match="Unknown row sense"):
            builder.add_row("r", [(x, 1.0)], "<", 1.0)

    def test_infinite_rhs(self):
        """Test that right-hand sides must be finite."""
        builder = LpBuilder()
        x = builder.add_column("x")
        builder.add_row("r", [(x, 1.0)], "L", np.inf)
        with pytest.raises(ValueError, match="Right-hand sides must be finite"):
            builder.build()

    def test_mismatched_bounds(self):
        """Test that bound vectors must match the columns."""
        with pytest.raises(DimensionError, match="Field lower must have 2 entries"):
            self.problem.with_bounds(np.zeros(3), np.ones(2))


class TestSolverOptions:
    """Test the option checks."""

    def test_defaults(self):
        """Test the default tolerances."""
        options = SolverOptions()
        assert (options.feas_tol, options.int_tol, options.mip_gap) == (1e-7, 1e-6, 1e-6)

    def test_negative_tolerance(self):
        """Test that tolerances are nonnegative."""
        with pytest.raises(ValueError, match="Option feas_tol must be nonnegative"):
            SolverOptions(feas_tol=-1.0)

    def test_zero_limit(self):
        """Test that limits are positive."""
        with pytest.raises(ValueError, match="Option max_nodes must be at least 1"):
            SolverOptions(max_nodes=0)
