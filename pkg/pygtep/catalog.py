# -*- coding: utf-8 -*-
"""
Naming and counting of model columns, and investment plans.

First-stage columns of year ``y`` form the vector ``x_y``; second-stage columns of
a pair (year, scenario) form ``s_{y,w}``. Every column label carries its symbol and
the full index tuple, e.g. ``N[k=CCGT,y=2030]`` or ``p[k=CCGT,t=7,c=winter,y=2030,w=HC]``.
"""
import pprint
from collections import OrderedDict, defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

import numpy as np

from pygtep.calendars import HOURS, RepresentativeCalendar, expand_checkpoints
from pygtep.exceptions import DimensionError
from pygtep.labels import Label, format_label, parse_label
from pygtep.lp import LpProblem
from pygtep.system import SystemInstance

# first stage
DELTA_LINE = "delta_L"
THETA_LINE = "theta_L"
DELTA_PIPE = "delta_J"
THETA_PIPE = "theta_J"
DELTA_HYDRO = "delta_H"
THETA_HYDRO = "theta_H"
UNITS = "N"
UNITS_BUILT = "Nplus"
UNITS_RETIRED = "Nminus"
SOLAR = "S"
WIND = "W"
BATTERY_CAP = "BCAP"
PTG_CAP = "PCAP"
BATTERY_AVAILABLE = "Bav"
PTG_AVAILABLE = "Pav"
RENEWABLE_OUTPUT = "RES"

FIRST_STAGE_SYMBOLS = (
    DELTA_LINE,
    THETA_LINE,
    DELTA_PIPE,
    THETA_PIPE,
    DELTA_HYDRO,
    THETA_HYDRO,
    UNITS,
    UNITS_BUILT,
    UNITS_RETIRED,
    SOLAR,
    WIND,
    BATTERY_CAP,
    PTG_CAP,
    BATTERY_AVAILABLE,
    PTG_AVAILABLE,
    RENEWABLE_OUTPUT,
)

# symbols whose values are additions within a year (plan.csv columns)
ADDITION_SYMBOLS = (
    DELTA_LINE,
    DELTA_PIPE,
    DELTA_HYDRO,
    UNITS_BUILT,
    UNITS_RETIRED,
    SOLAR,
    WIND,
    BATTERY_CAP,
    PTG_CAP,
)

# second stage
SECOND_STAGE_SYMBOLS = (
    "ENP",
    "OG",
    "RNP",
    "alpha",
    "beta",
    "gamma",
    "p",
    "gamma0",
    "HOUT",
    "HIN",
    "HSPILL",
    "HLT",
    "B",
    "BIN",
    "BOUT",
    "FL",
    "FJ",
    "GPTG",
    "G",
    "GIN",
    "GOUT",
    "GCURT",
    "GLT",
)

SLACK_SYMBOLS = ("ENP", "OG", "RNP", "GCURT")

# symbol groups of the itemized operating costs
COST_TERMS = OrderedDict(
    [
        ("hydro", ("HOUT",)),
        ("startup", ("alpha",)),
        ("thermal", ("gamma", "p")),
        ("battery", ("BOUT",)),
        ("overgeneration", ("OG",)),
        ("power_not_supplied", ("ENP",)),
        ("reserve_not_supplied", ("RNP",)),
        ("gas_supply", ("G",)),
        ("power_to_gas", ("GPTG",)),
        ("gas_curtailment", ("GCURT",)),
    ]
)


@dataclass(frozen=True)
class ColumnSpec:
    """Label, bounds and integrality of a column."""

    label: str
    lower: float = 0.0
    upper: float = np.inf
    integer: bool = False


def first_stage_columns(instance: SystemInstance, calendar: RepresentativeCalendar, year: int) -> List[ColumnSpec]:
    """
    The columns of x_y, in their canonical order.

    :param instance: the system.
    :param calendar: the representative days.
    :param year: the year y.
    :return: the column specifications.
    """
    y = year
    position = instance.years.index(year)
    specs = []  # type: List[ColumnSpec]
    for symbol_delta, symbol_theta, key, assets in (
        (DELTA_LINE, THETA_LINE, "l", instance.candidate_lines),
        (DELTA_PIPE, THETA_PIPE, "j", instance.candidate_pipelines),
        (DELTA_HYDRO, THETA_HYDRO, "h", instance.candidate_hydro),
    ):
        for asset in assets:
            specs.append(ColumnSpec(format_label(symbol_delta, **{key: asset.id, "y": y}), 0.0, 1.0, True))
            specs.append(ColumnSpec(format_label(symbol_theta, **{key: asset.id, "y": y}), 0.0, 1.0, True))
    for k in instance.thermal_clusters:
        previous = k.n0 if position == 0 else k.n_max.get(instance.years[position - 1], k.n0)
        n_max = k.n_max.get(y, 0.0)
        specs.append(ColumnSpec(format_label(UNITS, k=k.id, y=y), k.n_min.get(y, 0.0), n_max, True))
        specs.append(ColumnSpec(format_label(UNITS_BUILT, k=k.id, y=y), 0.0, n_max, True))
        specs.append(ColumnSpec(format_label(UNITS_RETIRED, k=k.id, y=y), 0.0, float(previous), True))
    for z in instance.power_zones:
        cap = 0.0 if instance.renewable(z) is None else np.inf
        specs.append(ColumnSpec(format_label(SOLAR, z=z, y=y), 0.0, cap))
        specs.append(ColumnSpec(format_label(WIND, z=z, y=y), 0.0, cap))
    for b in instance.batteries:
        specs.append(ColumnSpec(format_label(BATTERY_CAP, b=b.id, y=y), 0.0, max(b.cap_max - b.cap0, 0.0)))
    for g in instance.ptg:
        specs.append(ColumnSpec(format_label(PTG_CAP, g=g.id, y=y), 0.0, max(g.cap_max - g.cap0, 0.0)))
    for b in instance.batteries:
        specs.append(ColumnSpec(format_label(BATTERY_AVAILABLE, b=b.id, y=y)))
    for g in instance.ptg:
        specs.append(ColumnSpec(format_label(PTG_AVAILABLE, g=g.id, y=y)))
    for z in instance.power_zones:
        for c in calendar[y].clusters:
            for t in range(1, HOURS + 1):
                specs.append(ColumnSpec(format_label(RENEWABLE_OUTPUT, z=z, t=t, c=c, y=y)))
    return specs


def first_stage_labels(instance: SystemInstance, calendar: RepresentativeCalendar, year: int) -> List[str]:
    """Labels of x_y, in canonical order."""
    return [spec.label for spec in first_stage_columns(instance, calendar, year)]


def first_stage_count(instance: SystemInstance, calendar: RepresentativeCalendar, year: int) -> int:
    """
    Closed-form size of x_y.

    2|L_C| + 2|J_C| + 2|H_C| + 3|K| + 2|Z| + 2|B| + 2|G| + 24 |Z| C_y.
    """
    return (
        2 * len(instance.candidate_lines)
        + 2 * len(instance.candidate_pipelines)
        + 2 * len(instance.candidate_hydro)
        + 3 * len(instance.thermal_clusters)
        + 2 * len(instance.power_zones)
        + 2 * len(instance.batteries)
        + 2 * len(instance.ptg)
        + HOURS * len(instance.power_zones) * len(calendar[year].clusters)
    )


def second_stage_count(instance: SystemInstance, calendar: RepresentativeCalendar, year: int) -> int:
    """
    Closed-form size of s_{y,w}.

    24 C_y (3|Z| + 4|K| + |H| + 2|H_P| + 3|B| + |L| + |G| + 4|N| + |J|) + |K| C_y
    + xi_bar (|H_P| + |N|).
    """
    clusters = len(calendar[year].clusters)
    xi_bar = expand_checkpoints(calendar, instance.storage_check_period).xi_bar
    hourly = (
        3 * len(instance.power_zones)
        + 4 * len(instance.thermal_clusters)
        + len(instance.hydro_plants)
        + 2 * len(instance.programmable_hydro)
        + 3 * len(instance.batteries)
        + len(instance.lines)
        + len(instance.ptg)
        + 4 * len(instance.gas_zones)
        + len(instance.pipelines)
    )
    return (
        HOURS * clusters * hourly
        + len(instance.thermal_clusters) * clusters
        + xi_bar * (len(instance.programmable_hydro) + len(instance.gas_zones))
    )


def column_count(instance: SystemInstance, calendar: RepresentativeCalendar, n_scenarios: int) -> int:
    """Number of columns of the monolithic problem."""
    return sum(
        first_stage_count(instance, calendar, y) + n_scenarios * second_stage_count(instance, calendar, y)
        for y in instance.years
    )


class VariableCatalog:
    """
    The bijection between model symbols and the columns of a problem.

    >>> from pygtep.lp import LpBuilder
    >>> builder = LpBuilder()
    >>> _ = builder.add_column("N[k=CCGT,y=2030]", integer=True)
    >>> _ = builder.add_column("p[k=CCGT,t=1,c=d1,y=2030,w=LC]")
    >>> catalog = VariableCatalog(builder.build())
    >>> catalog.columns("N")
    [0]
    >>> catalog.first_stage(2030)
    [0]
    """

    def __init__(self, problem: LpProblem):
        """Index the columns of a problem by symbol, year and scenario."""
        self.problem = problem
        self.labels = [parse_label(text) for text in problem.col_labels]  # type: List[Label]
        self._by_symbol = defaultdict(list)  # type: Dict[str, List[int]]
        self._first_stage = defaultdict(list)  # type: Dict[int, List[int]]
        self._second_stage = defaultdict(list)  # type: Dict[Tuple[int, str], List[int]]
        for j, label in enumerate(self.labels):
            self._by_symbol[label.symbol].append(j)
            indices = dict(label.indices)
            if label.symbol in FIRST_STAGE_SYMBOLS:
                self._first_stage[int(indices["y"])].append(j)
            elif label.symbol in SECOND_STAGE_SYMBOLS:
                self._second_stage[(int(indices["y"]), indices["w"])].append(j)

    @property
    def symbols(self) -> List[str]:
        """The symbols present, in order of first appearance."""
        return list(self._by_symbol)

    def columns(self, symbol: str) -> List[int]:
        """Positions of the columns of a symbol."""
        return list(self._by_symbol.get(symbol, []))

    def first_stage(self, year: int) -> List[int]:
        """Positions of the columns of x_y."""
        return list(self._first_stage.get(year, []))

    def second_stage(self, year: int, scenario: str) -> List[int]:
        """Positions of the columns of s_{y,w}."""
        return list(self._second_stage.get((year, scenario), []))

    def values(self, x: np.ndarray, symbol: str) -> Dict[str, float]:
        """Values of the columns of a symbol, keyed by label."""
        return {self.problem.col_labels[j]: float(x[j]) for j in self.columns(symbol)}


@dataclass(frozen=True)
class InvestmentPlan:
    """
    Values of every first-stage column, per year.

    The provenance tells where the plan comes from (``benders``, ``monolithic``,
    ``file``, ...).
    """

    values: Mapping[int, Mapping[str, float]]
    provenance: str = "unknown"

    @property
    def years(self) -> Tuple[int, ...]:
        """The years covered."""
        return tuple(sorted(self.values))

    def year_values(self, year: int) -> Mapping[str, float]:
        """The values of x_y."""
        if year not in self.values:
            raise DimensionError("Plan has no values for year {}.".format(pprint.pformat(year)))
        return self.values[year]

    def vector(self, year: int, labels: Sequence[str]) -> np.ndarray:
        """
        The values of x_y aligned to a list of labels.

        :raise DimensionError: if a label has no value.
        """
        values = self.year_values(year)
        missing = [label for label in labels if label not in values]
        if missing:
            raise DimensionError(
                "Plan misses {} first-stage values in year {}, e.g. {}.".format(len(missing), year, missing[0])
            )
        return np.array([values[label] for label in labels], dtype=float)

    def flat(self) -> Dict[str, float]:
        """Every value keyed by label."""
        return {label: v for year in self.years for label, v in self.values[year].items()}

    @classmethod
    def from_solution(cls, problem: LpProblem, x: np.ndarray, provenance: str, int_tol: float = 1e-6) -> "InvestmentPlan":
        """
        Extract the first-stage values of a solution.

        Integer columns are rounded when within the integrality tolerance.
        """
        values = defaultdict(dict)  # type: Dict[int, Dict[str, float]]
        for j, text in enumerate(problem.col_labels):
            label = parse_label(text)
            if label.symbol not in FIRST_STAGE_SYMBOLS:
                continue
            value = float(x[j])
            if problem.integer[j] and abs(value - round(value)) <= int_tol:
                value = float(round(value))
            values[int(label.get("y"))][text] = value
        return cls({y: dict(v) for y, v in values.items()}, provenance)

    def additions(self) -> Dict[int, Dict[str, float]]:
        """
        Technology additions per year, keyed by the label without the year.

        >>> plan = InvestmentPlan({2030: {"S[z=ITn,y=2030]": 5.0, "N[k=K1,y=2030]": 3.0}})
        >>> plan.additions()
        {2030: {'S[z=ITn]': 5.0}}
        """
        return self._select(ADDITION_SYMBOLS)

    def installed(self) -> Dict[int, Dict[str, float]]:
        """Installed assets per year: built flags, unit counts and available capacities."""
        return self._select((THETA_LINE, THETA_PIPE, THETA_HYDRO, UNITS, BATTERY_AVAILABLE, PTG_AVAILABLE))

    def _select(self, symbols: Iterable[str]) -> Dict[int, Dict[str, float]]:
        wanted = set(symbols)
        result = {}  # type: Dict[int, Dict[str, float]]
        for year in self.years:
            row = {}  # type: Dict[str, float]
            for text, value in self.values[year].items():
                label = parse_label(text)
                if label.symbol in wanted:
                    row[str(Label(label.symbol, tuple(kv for kv in label.indices if kv[0] != "y")))] = value
            result[year] = row
        return result

    def integrality_violations(self, tol: float = 1e-6) -> List[str]:
        """Integer first-stage columns whose value is not integral."""
        integer_symbols = {
            DELTA_LINE,
            THETA_LINE,
            DELTA_PIPE,
            THETA_PIPE,
            DELTA_HYDRO,
            THETA_HYDRO,
            UNITS,
            UNITS_BUILT,
            UNITS_RETIRED,
        }
        return [
            text
            for text, value in sorted(self.flat().items())
            if parse_label(text).symbol in integer_symbols and abs(value - round(value)) > tol
        ]


def plan_from_values(values: Mapping[str, float], provenance: str = "file") -> InvestmentPlan:
    """Group flat first-stage values by year."""
    grouped = defaultdict(dict)  # type: Dict[int, Dict[str, float]]
    for text, value in values.items():
        label = parse_label(text)
        if label.symbol not in FIRST_STAGE_SYMBOLS:
            raise DimensionError("{} is not a first-stage column.".format(pprint.pformat(text)))
        grouped[int(label.get("y"))][text] = float(value)
    return InvestmentPlan({y: dict(v) for y, v in grouped.items()}, provenance)


def empty_plan(instance: SystemInstance, calendar: RepresentativeCalendar) -> Dict[str, float]:
    """Zero values for every first-stage column (not necessarily feasible)."""
    return {label: 0.0 for y in instance.years for label in first_stage_labels(instance, calendar, y)}


@dataclass(frozen=True)
class OperationSolution:
    """Values of s_{y,w} at an optimum, with the itemized costs."""

    year: int
    scenario: str
    objective: float
    values: Mapping[str, float]
    breakdown: Mapping[str, float] = field(default_factory=dict)
    relaxed: bool = True

    def slack_totals(self, weights: Mapping[str, float]) -> Dict[str, float]:
        """
        Weighted energy of each slack symbol.

        :param weights: representative-day weights psi_c keyed by cluster id.
        """
        totals = {symbol: 0.0 for symbol in SLACK_SYMBOLS}
        for text, value in self.values.items():
            label = parse_label(text)
            if label.symbol in totals:
                totals[label.symbol] += weights[label.get("c")] * value
        return totals
