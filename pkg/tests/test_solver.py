# -*- coding: utf-8 -*-
"""Tests for the LP and MILP backends."""
import itertools

import numpy as np
import pytest
from hypothesis import given, settings

from pygtep.exceptions import SizeLimitError
from pygtep.impl import BACKEND_ENV_VAR, available_backends, get_backend, highs
from pygtep.impl.builtin import BuiltinBackend
from pygtep.lp import LpBuilder, LpSolution, SolverOptions, Status, mip_gap
from pygtep.solver import enumerate_oracle, solve_lp, solve_milp

from .strategies import bounded_lps, small_milps

EXACT = SolverOptions(mip_gap=0.0)


def _close(a: float, b: float, tol: float = 1e-6) -> bool:
    return abs(a - b) <= tol * (1.0 + abs(b))


def _cycling_lp():
    """A degenerate LP on which the textbook pivoting rule cycles."""
    builder = LpBuilder("cycling")
    x4 = builder.add_column("x4", cost=-0.75)
    x5 = builder.add_column("x5", cost=20.0)
    x6 = builder.add_column("x6", cost=-0.5)
    x7 = builder.add_column("x7", cost=6.0)
    builder.add_row("r1", [(x4, 0.25), (x5, -8.0), (x6, -1.0), (x7, 9.0)], "L", 0.0)
    builder.add_row("r2", [(x4, 0.5), (x5, -12.0), (x6, -0.5), (x7, 3.0)], "L", 0.0)
    builder.add_row("r3", [(x6, 1.0)], "L", 1.0)
    return builder.build()


def _knapsack():
    builder = LpBuilder("knapsack")
    a = builder.add_column("a", 0, 1, -5.0, integer=True)
    b = builder.add_column("b", 0, 1, -4.0, integer=True)
    c = builder.add_column("c", 0, 1, -3.0, integer=True)
    builder.add_row("w1", [(a, 2.0), (b, 3.0), (c, 1.0)], "L", 5.0)
    builder.add_row("w2", [(a, 4.0), (b, 1.0), (c, 2.0)], "L", 11.0)
    builder.add_row("w3", [(a, 3.0), (b, 4.0), (c, 2.0)], "L", 8.0)
    return builder.build()


def _best_vertex(problem) -> float:
    """Optimum of a bounded LP by enumeration of the basic feasible points."""
    A = problem.matrix.toarray()
    blocks, limits = [], []
    for a, sense, b in zip(A, problem.senses, problem.rhs):
        if sense in ("L", "E"):
            blocks.append(a)
            limits.append(b)
        if sense in ("G", "E"):
            blocks.append(-a)
            limits.append(-b)
    eye = np.eye(problem.n)
    G = np.vstack([np.array(blocks).reshape(-1, problem.n), eye, -eye])
    h = np.concatenate([limits, problem.upper, -problem.lower])
    subsets = np.array(list(itertools.combinations(range(G.shape[0]), problem.n)))
    systems = G[subsets]
    regular = np.abs(np.linalg.det(systems)) > 1e-9
    points = np.linalg.solve(systems[regular], h[subsets][regular][..., None])[..., 0]
    feasible = np.all(points @ G.T <= h + 1e-9 * (1.0 + np.abs(h)), axis=1)
    return float(np.min(points[feasible] @ problem.cost) + problem.offset)


class TestSmallLp:
    """Test a two-column LP with a row of each sense."""

    @classmethod
    def setup_class(cls):
        """Set the test up."""
        builder = LpBuilder("small")
        x = builder.add_column("x", cost=1.0)
        y = builder.add_column("y", cost=2.0)
        builder.add_row("cover", [(x, 1.0), (y, 1.0)], "G", 4.0)
        builder.add_row("cap", [(x, 1.0)], "L", 5.0)
        builder.add_row("fix", [(y, 1.0), (x, -1.0)], "E", -2.0, fixing=True)
        cls.problem = builder.build()

    @pytest.mark.parametrize("backend", ["builtin", "highs"])
    def test_optimum(self, backend):
        """Test the optimal point and value."""
        solution = solve_lp(self.problem, backend=backend)
        assert solution.is_optimal
        # y = x - 2 and x + y >= 4 give x >= 3; cap is slack.
        assert np.allclose(solution.x, [3.0, 1.0])
        assert _close(solution.objective, 5.0)

    @pytest.mark.parametrize("backend", ["builtin", "highs"])
    def test_duals_are_sensitivities(self, backend):
        """Test the sign convention of the reported duals."""
        solution = solve_lp(self.problem, backend=backend)
        base = solution.objective
        for i, label in enumerate(self.problem.row_labels):
            rhs = self.problem.rhs.copy()
            rhs[i] += 1e-3
            moved = solve_lp(self.problem.with_rhs(rhs), backend="builtin").objective
            derivative = (moved - base) / 1e-3
            expected = -derivative if self.problem.senses[i] == "L" else derivative
            assert abs(solution.duals[i] - expected) <= 1e-5, label

    @pytest.mark.parametrize("backend", ["builtin", "highs"])
    def test_fixing_duals(self, backend):
        """Test that only the fixing row is reported."""
        duals = solve_lp(self.problem, backend=backend).fixing_duals(self.problem)
        assert list(duals) == ["fix"]

    @pytest.mark.parametrize("backend", ["builtin", "highs"])
    def test_strong_duality(self, backend):
        """Test that the dual objective equals the primal one."""
        solution = solve_lp(self.problem, backend=backend)
        assert _close(solution.dual_objective(self.problem), solution.objective)

    def test_builtin_returns_a_basis(self):
        """Test that the builtin simplex reports a complete basis."""
        basis = solve_lp(self.problem, backend="builtin").basis
        assert basis is not None
        assert len(basis.columns) == self.problem.n
        assert len(basis.rows) == self.problem.m

    def test_highs_returns_no_basis(self):
        """Test that HiGHS solutions carry no basis."""
        assert solve_lp(self.problem, backend="highs").basis is None

    def test_warm_start_gives_the_same_optimum(self):
        """Test a re-solve from the previous basis after a rhs change."""
        first = solve_lp(self.problem, backend="builtin")
        rhs = self.problem.rhs.copy()
        rhs[0] = 5.0
        changed = self.problem.with_rhs(rhs)
        cold = solve_lp(changed, backend="builtin")
        warm = solve_lp(changed, warm=first.basis, backend="builtin")
        assert warm.is_optimal
        assert _close(warm.objective, cold.objective)


class TestDegenerateLp:
    """Test the anti-cycling safeguard."""

    @classmethod
    def setup_class(cls):
        """Set the test up."""
        cls.problem = _cycling_lp()

    @pytest.mark.parametrize("stall_threshold", [1, 50])
    def test_optimum(self, stall_threshold):
        """Test that the simplex terminates at the optimum."""
        options = SolverOptions(stall_threshold=stall_threshold)
        solution = solve_lp(self.problem, backend="builtin", options=options)
        assert solution.is_optimal
        assert _close(solution.objective, -1.25)

    def test_iteration_limit(self):
        """Test that a pivot budget is honored."""
        solution = solve_lp(self.problem, backend="builtin", options=SolverOptions(max_pivots=1))
        assert solution.status is Status.ITERATION_LIMIT
        assert not solution.is_optimal


class TestInfeasibleAndUnbounded:
    """Test the non-optimal outcomes."""

    @pytest.mark.parametrize("backend", ["builtin", "highs"])
    def test_infeasible(self, backend):
        """Test an empty feasible region."""
        builder = LpBuilder()
        x = builder.add_column("x", 0.0, 10.0, 1.0)
        builder.add_row("low", [(x, 1.0)], "L", -1.0)
        assert solve_lp(builder.build(), backend=backend).status is Status.INFEASIBLE

    def test_unbounded(self):
        """Test a ray of decreasing cost."""
        builder = LpBuilder()
        x = builder.add_column("x", cost=-1.0)
        y = builder.add_column("y", cost=0.0)
        builder.add_row("r", [(x, 1.0), (y, -1.0)], "G", 0.0)
        assert solve_lp(builder.build(), backend="builtin").status is Status.UNBOUNDED

    def test_infeasible_milp(self):
        """Test a MILP whose relaxation is feasible but has no integer point."""
        builder = LpBuilder()
        x = builder.add_column("x", 0.0, 1.0, 1.0, integer=True)
        builder.add_row("half", [(x, 2.0)], "E", 1.0)
        assert solve_milp(builder.build(), backend="builtin").status is Status.INFEASIBLE


class TestRandomLps:
    """Cross-check the builtin simplex with HiGHS."""

    @given(bounded_lps())
    @settings(max_examples=200, deadline=None)
    def test_builtin_matches_highs(self, problem):
        """Test equal optima and feasible points."""
        builtin = solve_lp(problem, backend="builtin")
        highs = solve_lp(problem, backend="highs")
        assert builtin.is_optimal and highs.is_optimal
        assert _close(builtin.objective, highs.objective)
        assert problem.violations(builtin.x, 1e-6, check_integrality=False) == []

    @given(bounded_lps())
    @settings(max_examples=200, deadline=None)
    def test_strong_duality(self, problem):
        """Test that the builtin duals close the duality gap."""
        solution = solve_lp(problem, backend="builtin")
        assert _close(solution.dual_objective(problem), solution.objective, 1e-5)

    @given(bounded_lps(max_columns=4, max_rows=3))
    @settings(max_examples=200, deadline=None)
    def test_builtin_matches_vertex_enumeration(self, problem):
        """Test the optimum against the best feasible vertex."""
        solution = solve_lp(problem, backend="builtin")
        assert solution.is_optimal
        assert abs(solution.objective - _best_vertex(problem)) <= 1e-8


class TestMilp:
    """Test branch and bound."""

    @pytest.mark.parametrize("backend", ["builtin", "highs"])
    def test_knapsack(self, backend):
        """Test a small binary problem."""
        solution = solve_milp(_knapsack(), backend=backend, options=EXACT)
        assert solution.is_optimal
        assert _close(solution.objective, -9.0)
        assert np.allclose(solution.x, [1.0, 1.0, 0.0])
        assert solution.gap <= 1e-9

    def test_oracle_on_knapsack(self):
        """Test the enumeration oracle."""
        solution = enumerate_oracle(_knapsack())
        assert solution.nodes == 8
        assert _close(solution.objective, -9.0)

    def test_incumbent_hint(self):
        """Test that a feasible hint does not change the optimum."""
        solution = solve_milp(_knapsack(), incumbent_hint=[0.0, 0.0, 1.0], backend="builtin", options=EXACT)
        assert _close(solution.objective, -9.0)

    def test_presolve_switch(self, monkeypatch):
        """Test that the presolve option reaches HiGHS."""
        seen = []
        run = highs.milp

        def milp_and_record(*args, **kwargs):
            seen.append(kwargs["options"]["presolve"])
            return run(*args, **kwargs)

        monkeypatch.setattr(highs, "milp", milp_and_record)
        for presolve in (True, False):
            options = SolverOptions(mip_gap=0.0, presolve=presolve)
            solution = solve_milp(_knapsack(), backend="highs", options=options)
            assert _close(solution.objective, -9.0)
        assert seen == [True, False]

    @pytest.fixture
    def failing_nodes(self, monkeypatch):
        """Make every warm-started node LP stop at the iteration limit."""
        solve = BuiltinBackend.solve_lp

        def solve_lp_or_give_up(backend, problem, warm=None):
            if warm is not None:
                return LpSolution(Status.ITERATION_LIMIT)
            return solve(backend, problem, warm)

        monkeypatch.setattr(BuiltinBackend, "solve_lp", solve_lp_or_give_up)

    def test_unfinished_nodes_without_incumbent(self, failing_nodes):
        """Test that unsolved nodes are not taken for infeasible ones."""
        solution = solve_milp(_knapsack(), backend="builtin", options=EXACT)
        assert solution.status is Status.ITERATION_LIMIT
        assert not solution.has_solution
        assert solution.bound <= -9.0

    def test_unfinished_nodes_keep_the_bound_open(self, failing_nodes):
        """Test that a hinted incumbent is not reported optimal while nodes stay unsolved."""
        solution = solve_milp(_knapsack(), incumbent_hint=[0.0, 0.0, 1.0], backend="builtin", options=EXACT)
        assert solution.status is Status.ITERATION_LIMIT
        assert _close(solution.objective, -3.0)
        assert solution.bound <= -9.0
        assert solution.gap > 0.0

    @given(small_milps())
    @settings(max_examples=100, deadline=None)
    def test_builtin_matches_oracle(self, problem):
        """Test branch and bound against enumeration."""
        solution = solve_milp(problem, backend="builtin", options=EXACT)
        oracle = enumerate_oracle(problem)
        assert solution.is_optimal and oracle.is_optimal
        assert _close(solution.objective, oracle.objective)
        assert problem.violations(solution.x, 1e-6) == []

    def test_oracle_refuses_many_integers(self):
        """Test the limit on the number of integer columns."""
        builder = LpBuilder()
        for j in range(21):
            builder.add_column("b{}".format(j), 0, 1, 1.0, integer=True)
        with pytest.raises(SizeLimitError, match="at most 20 can be enumerated"):
            enumerate_oracle(builder.build())

    def test_oracle_refuses_wide_ranges(self):
        """Test the limit on the range of an integer column."""
        builder = LpBuilder()
        builder.add_column("n", 0, 5, 1.0, integer=True)
        with pytest.raises(SizeLimitError, match="spans 6 values"):
            enumerate_oracle(builder.build())


class TestMipGap:
    """Test the gap formula."""

    def test_relative(self):
        """Test a gap on a large objective."""
        assert mip_gap(200.0, 198.0) == pytest.approx(0.01)

    def test_absolute_near_zero(self):
        """Test that small objectives use an absolute gap."""
        assert mip_gap(0.5, 0.25) == pytest.approx(0.25)


class TestBackendRegistry:
    """Test the backend lookup."""

    def test_available(self):
        """Test the registered names."""
        assert available_backends() == ["builtin", "highs"]

    def test_unknown(self):
        """Test an unknown name."""
        with pytest.raises(ValueError, match="Unknown solver backend"):
            get_backend("cplex")

    def test_environment_variable(self, monkeypatch):
        """Test the default taken from the environment."""
        monkeypatch.setenv(BACKEND_ENV_VAR, "highs")
        assert get_backend().name == "highs"
        monkeypatch.delenv(BACKEND_ENV_VAR)
        assert get_backend().name == "builtin"
