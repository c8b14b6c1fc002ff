# -*- coding: utf-8 -*-
"""
Representative days, scenarios and storage checkpoint chains.

Every model year has 365 days. Each day is mapped to one representative
cluster; hourly profiles are given per cluster.

>>> chain = expand_checkpoints(RepresentativeCalendar({}), 30)
>>> chain.xi_bar, (chain.tail.first_day, chain.tail.last_day)
(12, (361, 365))
"""
import pprint
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np

from pygtep.exceptions import MissingPriceError, SchemaError
from pygtep.system import POWER_UNITS, DocumentReader, decode_document, encode_document

DAYS_PER_YEAR = 365
HOURS = 24

POWER_PROFILES = ("inflow", "demand_power", "demand_gas", "reserve")
UNIT_PROFILES = ("solar", "wind")
PROFILE_KINDS = UNIT_PROFILES + POWER_PROFILES


@dataclass(frozen=True, eq=False)
class YearCalendar:
    """
    Representative days of one year.

    Profiles map a profile kind to {owner: array of shape (clusters, 24)}; the
    owner is a power zone, a gas zone (demand_gas) or a hydro plant (inflow).
    """

    year: int
    clusters: Tuple[str, ...]
    weights: Mapping[str, float]
    day_map: Tuple[str, ...]
    profiles: Mapping[str, Mapping[str, np.ndarray]] = field(default_factory=dict)

    def position(self, cluster: str) -> int:
        """Row of a cluster in the profile arrays."""
        return self.clusters.index(cluster)

    def profile(self, kind: str, owner: str) -> np.ndarray:
        """Profile of an owner, zeros when it is not given."""
        values = self.profiles.get(kind, {}).get(owner)
        if values is None:
            return np.zeros((len(self.clusters), HOURS))
        return values

    def day_counts(self, first_day: int = 1, last_day: int = DAYS_PER_YEAR) -> Dict[str, int]:
        """Number of days mapped to each cluster in a range of days (1-based, inclusive)."""
        counts = Counter(self.day_map[first_day - 1:last_day])
        return {c: counts.get(c, 0) for c in self.clusters}

    def __eq__(self, other: Any) -> bool:
        """Compare field by field, profiles by value."""
        if not isinstance(other, YearCalendar):
            return False
        if (self.year, self.clusters, dict(self.weights), self.day_map) != (
            other.year,
            other.clusters,
            dict(other.weights),
            other.day_map,
        ):
            return False
        return _profiles_equal(self.profiles, other.profiles)


def _profiles_equal(a: Mapping[str, Mapping[str, np.ndarray]], b: Mapping[str, Mapping[str, np.ndarray]]) -> bool:
    kinds = {k for k in a if a[k]} | {k for k in b if b[k]}
    for kind in kinds:
        left, right = a.get(kind, {}), b.get(kind, {})
        if set(left) != set(right):
            return False
        if any(not np.array_equal(left[o], right[o]) for o in left):
            return False
    return True


@dataclass(frozen=True, eq=False)
class RepresentativeCalendar:
    """Representative days of every model year."""

    years: Mapping[int, YearCalendar]

    def __getitem__(self, year: int) -> YearCalendar:
        """Get the calendar of a year."""
        return self.years[year]

    def __eq__(self, other: Any) -> bool:
        """Compare year by year."""
        return isinstance(other, RepresentativeCalendar) and dict(self.years) == dict(other.years)


@dataclass(frozen=True)
class Scenario:
    """A price path with its probability."""

    id: str
    probability: float
    co2: Mapping[int, float]
    fuel: Mapping[str, Mapping[int, float]] = field(default_factory=dict)
    gas_cost: Mapping[str, Mapping[int, float]] = field(default_factory=dict)

    def co2_price(self, year: int) -> float:
        """CO2 price of a year."""
        try:
            return self.co2[year]
        except KeyError:
            raise MissingPriceError("Scenario {}: no CO2 price for year {}.".format(self.id, year))

    def fuel_price(self, fuel: str, year: int) -> float:
        """Price of a fuel in a year."""
        try:
            return self.fuel[fuel][year]
        except KeyError:
            raise MissingPriceError("Scenario {}: no price of fuel {} for year {}.".format(self.id, fuel, year))

    def gas_price(self, zone: str, year: int) -> float:
        """Gas supply cost of a gas zone in a year."""
        try:
            return self.gas_cost[zone][year]
        except KeyError:
            raise MissingPriceError("Scenario {}: no gas cost for zone {} in year {}.".format(self.id, zone, year))


@dataclass(frozen=True)
class ScenarioSet:
    """The scenarios of the second stage."""

    scenarios: Tuple[Scenario, ...]

    @property
    def ids(self) -> Tuple[str, ...]:
        """Scenario identifiers, in order."""
        return tuple(s.id for s in self.scenarios)

    def __getitem__(self, scenario_id: str) -> Scenario:
        """Get a scenario by identifier."""
        for scenario in self.scenarios:
            if scenario.id == scenario_id:
                return scenario
        raise KeyError(scenario_id)

    def __len__(self) -> int:
        """Number of scenarios."""
        return len(self.scenarios)


@dataclass(frozen=True)
class Segment:
    """A run of consecutive days closed by a storage level check."""

    index: int
    first_day: int
    last_day: int

    @property
    def days(self) -> int:
        """Length of the segment."""
        return max(self.last_day - self.first_day + 1, 0)

    def cluster_days(self, calendar: YearCalendar) -> Dict[str, int]:
        """Days of each cluster inside the segment."""
        return calendar.day_counts(self.first_day, self.last_day)

    def cluster_hours(self, calendar: YearCalendar) -> Dict[str, int]:
        """Hours of each cluster inside the segment."""
        return {c: HOURS * n for c, n in self.cluster_days(calendar).items()}


@dataclass(frozen=True)
class CheckpointChain:
    """
    Segments of M days ending at the checkpoints M, 2M, ..., xi_bar*M, plus the tail.

    The tail covers the days after the last checkpoint and closes the annual cycle;
    it is None when 365 is a multiple of M.
    """

    period: int
    segments: Tuple[Segment, ...]
    tail: Optional[Segment]

    @property
    def xi_bar(self) -> int:
        """Number of checkpoints."""
        return len(self.segments)


def expand_checkpoints(calendar: RepresentativeCalendar, period: int) -> CheckpointChain:
    """
    Split the year in checkpoint segments of a given period.

    Segment xi covers days (xi-1)*M+1 .. xi*M.

    :param calendar: the calendar; segments are the same for every year.
    :param period: the number of days M between checkpoints, 1 <= M <= 365.
    :return: the chain.
    """
    if not 1 <= period <= DAYS_PER_YEAR:
        raise ValueError("Checkpoint period must be between 1 and 365, found {}.".format(pprint.pformat(period)))
    xi_bar = DAYS_PER_YEAR // period
    segments = tuple(Segment(xi, (xi - 1) * period + 1, xi * period) for xi in range(1, xi_bar + 1))
    tail = Segment(xi_bar + 1, xi_bar * period + 1, DAYS_PER_YEAR) if xi_bar * period < DAYS_PER_YEAR else None
    return CheckpointChain(period, segments, tail)


def _common_keys(maps: List[Mapping[Any, Any]]) -> List[Any]:
    keys = set(maps[0])
    for other in maps[1:]:
        keys &= set(other)
    return sorted(keys)


def mean_value_scenario(scenarios: ScenarioSet, scenario_id: str = "MEAN") -> ScenarioSet:
    """
    The single scenario whose prices are the expected prices.

    Only prices defined in every scenario are averaged.

    >>> a = Scenario("LC", 0.3, {2030: 10.0})
    >>> b = Scenario("HC", 0.7, {2030: 20.0})
    >>> mean_value_scenario(ScenarioSet((a, b))).scenarios[0].co2[2030]
    17.0
    """
    items = scenarios.scenarios
    if len(items) == 1:
        return scenarios
    probabilities = [s.probability for s in items]

    def expectation(values: List[float]) -> float:
        return float(sum(p * v for p, v in zip(probabilities, values)))

    def mean_path(paths: List[Mapping[int, float]]) -> Dict[int, float]:
        return {year: expectation([path[year] for path in paths]) for year in _common_keys(paths)}

    def mean_nested(nested: List[Mapping[str, Mapping[int, float]]]) -> Dict[str, Dict[int, float]]:
        return {key: mean_path([n[key] for n in nested]) for key in _common_keys(nested)}

    mean = Scenario(
        id=scenario_id,
        probability=1.0,
        co2=mean_path([s.co2 for s in items]),
        fuel=mean_nested([s.fuel for s in items]),
        gas_cost=mean_nested([s.gas_cost for s in items]),
    )
    return ScenarioSet((mean,))


# -- files ---------------------------------------------------------------------


def _read_profiles(profiles: DocumentReader, scale_power: float) -> Dict[str, Dict[str, np.ndarray]]:
    result = {}  # type: Dict[str, Dict[str, np.ndarray]]
    for kind in profiles.data:
        if kind not in PROFILE_KINDS:
            raise SchemaError("{}: unknown profile {}.".format(profiles.path, pprint.pformat(kind)))
        owners = profiles.child(kind)
        scale = scale_power if kind in POWER_PROFILES else 1.0
        result[kind] = {}
        for owner, values in owners.data.items():
            try:
                array = np.array(values, dtype=float)
            except (TypeError, ValueError):
                raise SchemaError("{}.{}: expected a list of hourly lists of numbers.".format(owners.path, owner))
            if array.ndim != 2 or not np.all(np.isfinite(array)):
                raise SchemaError("{}.{}: expected a finite [cluster][hour] array.".format(owners.path, owner))
            result[kind][str(owner)] = array * scale
    return result


def calendar_from_document(document: Any) -> RepresentativeCalendar:
    """Build a calendar from a decoded document."""
    root = DocumentReader(document, "calendar")
    units = root.child("units", required=False)
    power = units.string("power", "MW")
    if power not in POWER_UNITS:
        raise SchemaError("calendar.units.power: unknown unit {}.".format(pprint.pformat(power)))
    years = {}  # type: Dict[int, YearCalendar]
    for item in root.items("years"):
        year = item.integer("year")
        clusters = item.items("clusters")
        day_map = tuple(item.strings("day_map"))
        if len(day_map) != DAYS_PER_YEAR:
            raise SchemaError("{}.day_map: expected 365 entries, found {}.".format(item.path, len(day_map)))
        if year in years:
            raise SchemaError("{}: year {} declared twice.".format(item.path, year))
        years[year] = YearCalendar(
            year=year,
            clusters=tuple(c.string("id") for c in clusters),
            weights={c.string("id"): c.number("weight") for c in clusters},
            day_map=day_map,
            profiles=_read_profiles(item.child("profiles", required=False), POWER_UNITS[power]),
        )
    return RepresentativeCalendar(years)


def load_calendar(data: bytes) -> RepresentativeCalendar:
    """
    Load a calendar file.

    :raise ParseError: if the file is not JSON.
    :raise SchemaError: if a field is missing or malformed.
    """
    return calendar_from_document(decode_document(data))


def calendar_to_document(calendar: RepresentativeCalendar) -> Dict[str, Any]:
    """Canonical document of a calendar (MW)."""
    return {
        "units": {"power": "MW"},
        "years": [
            {
                "year": cal.year,
                "clusters": [{"id": c, "weight": cal.weights[c]} for c in cal.clusters],
                "day_map": list(cal.day_map),
                "profiles": {
                    kind: {owner: values.tolist() for owner, values in sorted(owners.items())}
                    for kind, owners in sorted(cal.profiles.items())
                },
            }
            for _, cal in sorted(calendar.years.items())
        ],
    }


def save_calendar(calendar: RepresentativeCalendar) -> bytes:
    """Serialize a calendar."""
    return encode_document(calendar_to_document(calendar))


def _price_path(reader: DocumentReader, key: str) -> Dict[int, float]:
    return reader.year_map(key, required=False)


def scenarios_from_document(document: Any) -> ScenarioSet:
    """Build a scenario set from a decoded document."""
    root = DocumentReader(document, "scenarios")
    scenarios = []
    for item in root.items("scenarios"):
        fuel = item.child("fuel", required=False)
        gas = item.child("gas_cost", required=False)
        scenarios.append(
            Scenario(
                id=item.string("id"),
                probability=item.number("probability"),
                co2=item.year_map("co2"),
                fuel={str(f): _price_path(fuel, f) for f in fuel.data},
                gas_cost={str(n): _price_path(gas, n) for n in gas.data},
            )
        )
    if not scenarios:
        raise SchemaError("scenarios: at least one scenario is required.")
    return ScenarioSet(tuple(scenarios))


def load_scenarios(data: bytes) -> ScenarioSet:
    """
    Load a scenario file.

    :raise ParseError: if the file is not JSON.
    :raise SchemaError: if a field is missing or malformed.
    """
    return scenarios_from_document(decode_document(data))


def scenarios_to_document(scenarios: ScenarioSet) -> Dict[str, Any]:
    """Canonical document of a scenario set."""

    def path(values: Mapping[int, float]) -> Dict[str, float]:
        return {str(year): value for year, value in sorted(values.items())}

    return {
        "scenarios": [
            {
                "id": s.id,
                "probability": s.probability,
                "co2": path(s.co2),
                "fuel": {f: path(p) for f, p in sorted(s.fuel.items())},
                "gas_cost": {n: path(p) for n, p in sorted(s.gas_cost.items())},
            }
            for s in scenarios.scenarios
        ]
    }


def save_scenarios(scenarios: ScenarioSet) -> bytes:
    """Serialize a scenario set."""
    return encode_document(scenarios_to_document(scenarios))
