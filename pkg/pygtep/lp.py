# -*- coding: utf-8 -*-
"""
Sparse linear problems and their solutions.

Problems are always minimizations. Rows have a sense among ``L`` (<=),
``E`` (=) and ``G`` (>=). Duals are reported in the >=-form convention:
for a ``L`` row the reported dual is minus the derivative of the optimal
value with respect to the right-hand side, for ``G`` and ``E`` rows it is
the derivative itself. Duals of fixing rows are therefore the gradients of
the optimal value with respect to the fixed values.
"""
import pprint
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp

from pygtep.exceptions import DimensionError
from pygtep.labels import MapIndex

SENSES = ("L", "E", "G")
Coefficients = Union[Mapping[int, float], Iterable[Tuple[int, float]]]


class Status(Enum):
    """Outcome of a solve."""

    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"
    NODE_LIMIT = "node_limit"
    NUMERICAL_FAILURE = "numerical_failure"


class VarStatus(Enum):
    """Position of a variable with respect to a basis."""

    BASIC = "B"
    AT_LOWER = "L"
    AT_UPPER = "U"
    FREE_ZERO = "F"


@dataclass(frozen=True)
class SolverOptions:
    """Tolerances and limits shared by every backend."""

    feas_tol: float = 1e-7
    int_tol: float = 1e-6
    comp_tol: float = 1e-6
    mip_gap: float = 1e-6
    max_pivots: int = 50000
    max_nodes: int = 20000
    stall_threshold: int = 50
    refactor_every: int = 64
    # HiGHS only; the builtin backend has no presolve
    presolve: bool = True

    def __post_init__(self):
        """Check the options."""
        for name in ("feas_tol", "int_tol", "comp_tol", "mip_gap"):
            _check_non_negative(name, getattr(self, name))
        for name in ("max_pivots", "max_nodes", "stall_threshold", "refactor_every"):
            if getattr(self, name) < 1:
                raise ValueError(
                    "Option {} must be at least 1. Found {}.".format(
                        name, pprint.pformat(getattr(self, name))
                    )
                )


@dataclass(frozen=True)
class Basis:
    """Status of every structural column followed by every row logical."""

    columns: Tuple[VarStatus, ...]
    rows: Tuple[VarStatus, ...]

    @property
    def basic_count(self) -> int:
        """Count the basic entries."""
        return sum(s is VarStatus.BASIC for s in self.columns + self.rows)


@dataclass(frozen=True, eq=False)
class LpProblem:
    """
    A minimization problem in sparse row form.

    Build instances through LpBuilder; the constructor checks consistency.
    """

    cost: np.ndarray
    matrix: sp.csr_matrix
    senses: Tuple[str, ...]
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    integer: np.ndarray
    col_labels: Tuple[str, ...]
    row_labels: Tuple[str, ...]
    fixing_rows: FrozenSet[int] = frozenset()
    offset: float = 0.0
    name: str = "problem"

    def __post_init__(self):
        """Check the consistency of the fields."""
        _check_shapes(self)
        _check_finite_data(self)
        _check_bounds(self)
        _check_senses(self.senses)

    @property
    def n(self) -> int:
        """Number of columns."""
        return self.cost.shape[0]

    @property
    def m(self) -> int:
        """Number of rows."""
        return self.rhs.shape[0]

    @property
    def integer_columns(self) -> np.ndarray:
        """Positions of the integer columns."""
        return np.flatnonzero(self.integer)

    @property
    def is_mip(self) -> bool:
        """Whether any column is integer."""
        return bool(self.integer.any())

    def column(self, label: str) -> int:
        """Get the position of a column label."""
        return self._column_positions()[label]

    def row(self, label: str) -> int:
        """Get the position of a row label."""
        return self._row_positions()[label]

    def _column_positions(self) -> Dict[str, int]:
        cached = self.__dict__.get("_col_pos")
        if cached is None:
            cached = {label: i for i, label in enumerate(self.col_labels)}
            object.__setattr__(self, "_col_pos", cached)
        return cached

    def _row_positions(self) -> Dict[str, int]:
        cached = self.__dict__.get("_row_pos")
        if cached is None:
            cached = {label: i for i, label in enumerate(self.row_labels)}
            object.__setattr__(self, "_row_pos", cached)
        return cached

    def objective_value(self, x: np.ndarray) -> float:
        """Evaluate the objective at a point."""
        return float(self.cost @ x) + self.offset

    def row_activity(self, x: np.ndarray) -> np.ndarray:
        """Compute A x."""
        return self.matrix @ x

    def violations(self, x: np.ndarray, tol: float = 1e-6, check_integrality: bool = True) -> List[str]:
        """
        List the constraints, bounds and integrality flags a point violates.

        :param x: the point.
        :param tol: absolute tolerance, scaled by the magnitude of each right-hand side.
        :param check_integrality: whether integer columns must hold integers.
        :return: human-readable descriptions, empty when the point is feasible.
        """
        messages = []  # type: List[str]
        activity = self.row_activity(x)
        for i, (sense, value, b) in enumerate(zip(self.senses, activity, self.rhs)):
            slack = tol * (1.0 + abs(b))
            if (sense == "L" and value > b + slack) or (sense == "G" and value < b - slack) or (
                sense == "E" and abs(value - b) > slack
            ):
                messages.append("row {} {} {}: activity {}".format(self.row_labels[i], sense, b, value))
        for j in range(self.n):
            if x[j] < self.lower[j] - tol * (1.0 + abs(self.lower[j])) or x[j] > self.upper[j] + tol * (
                1.0 + abs(self.upper[j])
            ):
                messages.append(
                    "column {} = {} outside [{}, {}]".format(self.col_labels[j], x[j], self.lower[j], self.upper[j])
                )
            elif check_integrality and self.integer[j] and abs(x[j] - round(x[j])) > tol:
                messages.append("column {} = {} is not integral".format(self.col_labels[j], x[j]))
        return messages

    def with_bounds(self, lower: np.ndarray, upper: np.ndarray) -> "LpProblem":
        """Copy of the problem with other column bounds."""
        return LpProblem(
            cost=self.cost,
            matrix=self.matrix,
            senses=self.senses,
            rhs=self.rhs,
            lower=np.asarray(lower, dtype=float),
            upper=np.asarray(upper, dtype=float),
            integer=self.integer,
            col_labels=self.col_labels,
            row_labels=self.row_labels,
            fixing_rows=self.fixing_rows,
            offset=self.offset,
            name=self.name,
        )

    def with_rhs(self, rhs: np.ndarray) -> "LpProblem":
        """Copy of the problem with other right-hand sides."""
        return LpProblem(
            cost=self.cost,
            matrix=self.matrix,
            senses=self.senses,
            rhs=np.asarray(rhs, dtype=float),
            lower=self.lower,
            upper=self.upper,
            integer=self.integer,
            col_labels=self.col_labels,
            row_labels=self.row_labels,
            fixing_rows=self.fixing_rows,
            offset=self.offset,
            name=self.name,
        )

    def relaxed(self) -> "LpProblem":
        """Copy of the problem without integrality flags."""
        return LpProblem(
            cost=self.cost,
            matrix=self.matrix,
            senses=self.senses,
            rhs=self.rhs,
            lower=self.lower,
            upper=self.upper,
            integer=np.zeros(self.n, dtype=bool),
            col_labels=self.col_labels,
            row_labels=self.row_labels,
            fixing_rows=self.fixing_rows,
            offset=self.offset,
            name=self.name,
        )


class LpBuilder:
    """Incremental construction of an LpProblem from labelled columns and rows."""

    def __init__(self, name: str = "problem"):
        """Initialize an empty problem."""
        self.name = name
        self.columns = MapIndex()  # type: MapIndex[str]
        self.rows = MapIndex()  # type: MapIndex[str]
        self._cost = []  # type: List[float]
        self._lower = []  # type: List[float]
        self._upper = []  # type: List[float]
        self._integer = []  # type: List[bool]
        self._senses = []  # type: List[str]
        self._rhs = []  # type: List[float]
        self._entries_row = []  # type: List[int]
        self._entries_col = []  # type: List[int]
        self._entries_val = []  # type: List[float]
        self._fixing = set()  # type: set
        self.offset = 0.0

    def add_column(
        self,
        label: str,
        lower: float = 0.0,
        upper: float = np.inf,
        cost: float = 0.0,
        integer: bool = False,
    ) -> int:
        """
        Add a column.

        :return: its position.
        :raise ValueError: if the label already exists or the bounds are crossed.
        """
        if lower > upper:
            raise ValueError("Column {} has crossed bounds [{}, {}].".format(label, lower, upper))
        index = self.columns.add(label)
        self._cost.append(float(cost))
        self._lower.append(float(lower))
        self._upper.append(float(upper))
        self._integer.append(bool(integer))
        return index

    def add_cost(self, column: int, value: float) -> None:
        """Add to the objective coefficient of a column."""
        self._cost[column] += float(value)

    def set_bounds(self, column: int, lower: float, upper: float) -> None:
        """Overwrite the bounds of a column."""
        self._lower[column] = float(lower)
        self._upper[column] = float(upper)

    def add_row(
        self,
        label: str,
        coefficients: Coefficients,
        sense: str,
        rhs: float,
        fixing: bool = False,
    ) -> int:
        """
        Add a row; repeated columns in the coefficients are summed.

        :param label: the row label.
        :param coefficients: pairs (column, coefficient) or a mapping.
        :param sense: one of L, E, G.
        :param rhs: the right-hand side.
        :param fixing: whether the row pins a column and its dual must be reported.
        :return: the row position.
        """
        if sense not in SENSES:
            raise ValueError("Unknown row sense {}.".format(pprint.pformat(sense)))
        items = coefficients.items() if isinstance(coefficients, Mapping) else coefficients
        index = self.rows.add(label)
        for column, value in items:
            if value != 0.0:
                self._entries_row.append(index)
                self._entries_col.append(column)
                self._entries_val.append(float(value))
        self._senses.append(sense)
        self._rhs.append(float(rhs))
        if fixing:
            self._fixing.add(index)
        return index

    def build(self) -> LpProblem:
        """Freeze the problem."""
        n, m = self.columns.size, self.rows.size
        matrix = sp.coo_matrix(
            (self._entries_val, (self._entries_row, self._entries_col)), shape=(m, n)
        ).tocsr()
        matrix.sum_duplicates()
        return LpProblem(
            cost=np.array(self._cost, dtype=float),
            matrix=matrix,
            senses=tuple(self._senses),
            rhs=np.array(self._rhs, dtype=float),
            lower=np.array(self._lower, dtype=float),
            upper=np.array(self._upper, dtype=float),
            integer=np.array(self._integer, dtype=bool),
            col_labels=tuple(self.columns),
            row_labels=tuple(self.rows),
            fixing_rows=frozenset(self._fixing),
            offset=self.offset,
            name=self.name,
        )


@dataclass(frozen=True, eq=False)
class LpSolution:
    """Result of an LP solve."""

    status: Status
    objective: float = np.nan
    x: np.ndarray = field(default_factory=lambda: np.zeros(0))
    duals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    reduced_costs: np.ndarray = field(default_factory=lambda: np.zeros(0))
    basis: Optional[Basis] = None
    iterations: int = 0

    @property
    def is_optimal(self) -> bool:
        """Whether the solve ended at an optimum."""
        return self.status is Status.OPTIMAL

    def fixing_duals(self, problem: LpProblem) -> Dict[str, float]:
        """Duals of the fixing rows, keyed by row label."""
        return {problem.row_labels[i]: float(self.duals[i]) for i in sorted(problem.fixing_rows)}

    def dual_objective(self, problem: LpProblem) -> float:
        """
        Value of the dual objective built from the reported duals and reduced costs.

        Equals the primal objective at an optimum (strong duality).
        """
        signs = np.array([-1.0 if s == "L" else 1.0 for s in problem.senses])
        ge_rhs = signs * problem.rhs
        total = float(self.duals @ ge_rhs) + problem.offset
        for j in range(problem.n):
            d = self.reduced_costs[j]
            if d > 0.0 and np.isfinite(problem.lower[j]):
                total += d * problem.lower[j]
            elif d < 0.0 and np.isfinite(problem.upper[j]):
                total += d * problem.upper[j]
            else:
                total += d * self.x[j]
        return total


@dataclass(frozen=True, eq=False)
class MilpSolution:
    """Result of a MILP solve."""

    status: Status
    objective: float = np.nan
    x: np.ndarray = field(default_factory=lambda: np.zeros(0))
    bound: float = -np.inf
    gap: float = np.inf
    nodes: int = 0

    @property
    def is_optimal(self) -> bool:
        """Whether the solve proved optimality within the gap."""
        return self.status is Status.OPTIMAL

    @property
    def has_solution(self) -> bool:
        """Whether an incumbent exists."""
        return self.x.shape[0] > 0 and bool(np.isfinite(self.objective))


def mip_gap(objective: float, bound: float) -> float:
    """Gap between an incumbent and a bound, (obj - bound) / max(|obj|, 1)."""
    return (objective - bound) / max(abs(objective), 1.0)


def to_ge_duals(senses: Sequence[str], sensitivities: np.ndarray) -> np.ndarray:
    """Convert derivatives of the optimal value w.r.t. rhs to the reported convention."""
    signs = np.array([-1.0 if s == "L" else 1.0 for s in senses])
    return signs * sensitivities


def _check_non_negative(name: str, value: float):
    """Check that an option is nonnegative."""
    if value < 0:
        raise ValueError("Option {} must be nonnegative. Found {}.".format(name, pprint.pformat(value)))


def _check_shapes(problem: LpProblem):
    """Check that the dimensions agree."""
    n, m = problem.cost.shape[0], problem.rhs.shape[0]
    if problem.matrix.shape != (m, n):
        raise DimensionError(
            "Matrix shape {} does not match {} rows and {} columns.".format(problem.matrix.shape, m, n)
        )
    for name in ("lower", "upper", "integer"):
        if getattr(problem, name).shape[0] != n:
            raise DimensionError("Field {} must have {} entries.".format(name, n))
    if len(problem.col_labels) != n or len(problem.row_labels) != m or len(problem.senses) != m:
        raise DimensionError("Labels and senses must match the problem dimensions.")
    if any(i < 0 or i >= m for i in problem.fixing_rows):
        raise DimensionError(
            "Fixing rows {} out of range.".format(pprint.pformat(sorted(problem.fixing_rows)))
        )


def _check_finite_data(problem: LpProblem):
    """Check that costs, coefficients and right-hand sides are finite numbers."""
    if not np.all(np.isfinite(problem.cost)) or not np.all(np.isfinite(problem.matrix.data)):
        raise ValueError("Costs and coefficients must be finite.")
    if not np.all(np.isfinite(problem.rhs)):
        raise ValueError("Right-hand sides must be finite.")


def _check_bounds(problem: LpProblem):
    """Check that bounds are not NaN and not crossed."""
    if np.isnan(problem.lower).any() or np.isnan(problem.upper).any():
        raise ValueError("Bounds cannot be NaN.")
    crossed = np.flatnonzero(problem.lower > problem.upper)
    if crossed.size:
        raise ValueError(
            "Columns {} have crossed bounds.".format(pprint.pformat([problem.col_labels[j] for j in crossed]))
        )


def _check_senses(senses: Sequence[str]):
    """Check that row senses are known."""
    unknown = set(senses).difference(SENSES)
    if unknown:
        raise ValueError("Unknown row senses {}.".format(pprint.pformat(unknown)))
