# -*- coding: utf-8 -*-
"""Cross-checks of an (instance, calendar, scenarios) triple."""
import logging
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, List, Mapping, Tuple

import numpy as np

from pygtep.calendars import DAYS_PER_YEAR, HOURS, UNIT_PROFILES, RepresentativeCalendar, ScenarioSet
from pygtep.labels import is_identifier
from pygtep.system import (
    CANDIDATE,
    EXISTING,
    GAS,
    HYDRO_KINDS,
    NO_FUEL,
    SystemInstance,
    reference_violations,
    structural_violations,
)

logger = logging.getLogger(__name__)

PROBABILITY_TOL = 1e-9


@dataclass(frozen=True)
class ValidationReport:
    """The violated invariants, as human-readable messages."""

    violations: Tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        """Whether nothing is violated."""
        return not self.violations

    def __bool__(self) -> bool:
        """A report is truthy when it is clean."""
        return self.ok

    def __str__(self) -> str:
        """One violation per line."""
        if self.ok:
            return "valid"
        return "\n".join("- " + v for v in self.violations)


def validate_instance(
    instance: SystemInstance, calendar: RepresentativeCalendar, scenarios: ScenarioSet
) -> ValidationReport:
    """
    Check every invariant of the triple.

    Violations are collected, never raised.
    """
    violations = []  # type: List[str]
    violations += structural_violations(instance)
    violations += reference_violations(instance)
    violations += _identifier_violations(instance, calendar, scenarios)
    violations += _network_violations(instance)
    violations += _cluster_violations(instance)
    violations += _hydro_violations(instance)
    violations += _storage_violations(instance)
    violations += _renewable_violations(instance)
    violations += _policy_violations(instance)
    violations += _calendar_violations(instance, calendar)
    violations += _scenario_violations(instance, scenarios)
    for message in violations:
        logger.debug("violation: %s", message)
    return ValidationReport(tuple(violations))


def _missing_years(values: Mapping[int, float], years: Iterable[int]) -> List[int]:
    return [y for y in years if y not in values]


def _identifier_violations(
    instance: SystemInstance, calendar: RepresentativeCalendar, scenarios: ScenarioSet
) -> List[str]:
    messages = []
    names = (
        [("power zone", z) for z in instance.power_zones]
        + [("gas zone", n) for n in instance.gas_zones]
        + [("area", a.id) for a in instance.areas]
        + [("line", x.id) for x in instance.lines]
        + [("pipeline", x.id) for x in instance.pipelines]
        + [("cluster", x.id) for x in instance.thermal_clusters]
        + [("hydro plant", x.id) for x in instance.hydro_plants]
        + [("battery", x.id) for x in instance.batteries]
        + [("PtG technology", x.id) for x in instance.ptg]
        + [("scenario", s) for s in scenarios.ids]
        + [("representative day", c) for cal in calendar.years.values() for c in cal.clusters]
    )
    for kind, name in names:
        if not is_identifier(name):
            messages.append("{} identifier {!r} must match [A-Za-z0-9_.-]+".format(kind, name))
    groups = (
        ("power zone", list(instance.power_zones)),
        ("gas zone", list(instance.gas_zones)),
        ("area", [a.id for a in instance.areas]),
        ("line", [x.id for x in instance.lines]),
        ("pipeline", [x.id for x in instance.pipelines]),
        ("cluster", [x.id for x in instance.thermal_clusters]),
        ("hydro plant", [x.id for x in instance.hydro_plants]),
        ("battery", [x.id for x in instance.batteries]),
        ("PtG technology", [x.id for x in instance.ptg]),
        ("scenario", list(scenarios.ids)),
    )
    for kind, ids in groups:
        for name, count in sorted(Counter(ids).items()):
            if count > 1:
                messages.append("{} {} is declared {} times".format(kind, name, count))
    for year, cal in sorted(calendar.years.items()):
        for name, count in sorted(Counter(cal.clusters).items()):
            if count > 1:
                messages.append("representative day {} is declared {} times in year {}".format(name, count, year))
    return messages


def _network_violations(instance: SystemInstance) -> List[str]:
    messages = []
    for kind, links in (("line", instance.lines), ("pipeline", instance.pipelines)):
        for link in links:
            if link.status not in (EXISTING, CANDIDATE):
                messages.append("{} {} has unknown status {!r}".format(kind, link.id, link.status))
            if not link.flow_min <= 0.0 <= link.flow_max:
                messages.append("{} {} must satisfy flow_min <= 0 <= flow_max".format(kind, link.id))
            if link.is_candidate and link.invest_cost is None:
                messages.append("candidate {} {} has no invest cost".format(kind, link.id))
            if link.invest_cost is not None and link.invest_cost < 0:
                messages.append("{} {} has a negative invest cost".format(kind, link.id))
    zones = Counter(z for area in instance.areas for z in area.zones)
    for zone, count in sorted(zones.items()):
        if count > 1:
            messages.append("zone {} belongs to {} areas".format(zone, count))
    for tech in instance.ptg:
        if not 0.0 < tech.efficiency <= 1.0:
            messages.append("PtG technology {} must have 0 < efficiency <= 1".format(tech.id))
        if not 0.0 <= tech.cap0 <= tech.cap_max:
            messages.append("PtG technology {} must have 0 <= cap0 <= cap_max".format(tech.id))
        if tech.invest_cost < 0 or tech.cost < 0:
            messages.append("PtG technology {} has negative costs".format(tech.id))
    for zone in instance.gas_zones:
        data = instance.gas_data(zone)
        if data is None:
            messages.append("gas zone {} has no supply data".format(zone))
            continue
        if not data.supply_min <= data.supply_max:
            messages.append("gas zone {} must have supply_min <= supply_max".format(zone))
        if not 0.0 <= data.level0 <= data.storage_max:
            messages.append("gas zone {} must have 0 <= level0 <= storage_max".format(zone))
        if min(data.inject_max, data.withdraw_max, data.storage_max) < 0:
            messages.append("gas zone {} has negative storage limits".format(zone))
    return messages


def _cluster_violations(instance: SystemInstance) -> List[str]:
    messages = []
    for k in instance.thermal_clusters:
        if not 0.0 <= k.p_min <= k.p_max:
            messages.append("cluster {} must have 0 <= p_min <= p_max".format(k.id))
        if not (1 <= k.mut <= 24 and 1 <= k.mdt <= 24):
            messages.append("cluster {} must have minimum up and down times between 1 and 24".format(k.id))
        if k.n0 < 0:
            messages.append("cluster {} must have a nonnegative initial count".format(k.id))
        if k.is_gas_fired and k.gas_zone is None:
            messages.append("gas-fired cluster {} has no gas zone".format(k.id))
        if not k.is_gas_fired and k.gas_zone is not None:
            messages.append("cluster {} burns {} but is attached to a gas zone".format(k.id, k.fuel))
        if min(k.startup_cost, k.heat_rate, k.co2_rate, k.om_cost) < 0:
            messages.append("cluster {} has negative cost or emission data".format(k.id))
        for name, values in (
            ("n_min", k.n_min),
            ("n_max", k.n_max),
            ("invest_cost", k.invest_cost),
            ("decommission_cost", k.decommission_cost),
        ):
            missing = _missing_years(values, instance.years)
            if missing:
                messages.append("cluster {} has no {} for years {}".format(k.id, name, missing))
        for y in instance.years:
            lo, hi = k.n_min.get(y, 0.0), k.n_max.get(y, 0.0)
            if lo != int(lo) or hi != int(hi) or lo < 0:
                messages.append("cluster {} count bounds in {} must be nonnegative integers".format(k.id, y))
            elif lo > hi:
                messages.append("cluster {} must have n_min <= n_max in {}".format(k.id, y))
    return messages


def _hydro_violations(instance: SystemInstance) -> List[str]:
    messages = []
    for h in instance.hydro_plants:
        if h.kind not in HYDRO_KINDS:
            messages.append("hydro plant {} has unknown kind {!r}".format(h.id, h.kind))
        if h.status not in (EXISTING, CANDIDATE):
            messages.append("hydro plant {} has unknown status {!r}".format(h.id, h.status))
        if h.kind == "run_of_river" and (h.programmable or h.in_max != 0.0 or h.epr != 0.0):
            messages.append("run-of-river plant {} must be non-programmable with in_max = 0 and epr = 0".format(h.id))
        if h.kind == "pumped" and h.in_max <= 0.0:
            messages.append("pumped plant {} must have in_max > 0".format(h.id))
        if not h.eff_in <= 1.0 <= h.eff_out:
            messages.append("hydro plant {} must have eff_in <= 1 <= eff_out".format(h.id))
        if not 0.0 <= h.level0 <= h.epr * h.out_max:
            messages.append("hydro plant {} must have 0 <= level0 <= epr * out_max".format(h.id))
        if min(h.out_max, h.in_max, h.spill_max, h.epr, h.cost) < 0:
            messages.append("hydro plant {} has negative limits or costs".format(h.id))
        if h.is_candidate and h.invest_cost is None:
            messages.append("candidate hydro plant {} has no invest cost".format(h.id))
    return messages


def _storage_violations(instance: SystemInstance) -> List[str]:
    messages = []
    for b in instance.batteries:
        if not 0.0 <= b.cap0 <= b.cap_max:
            messages.append("battery {} must have 0 <= cap0 <= cap_max".format(b.id))
        if b.initial_level < 0:
            messages.append("battery {} must have a nonnegative initial level".format(b.id))
        elif b.initial_level > b.epr * b.cap0:
            messages.append("battery {} initial level exceeds epr * cap0".format(b.id))
        if not 0.0 <= b.self_discharge <= 1.0:
            messages.append("battery {} must have 0 <= self_discharge <= 1".format(b.id))
        if not b.eff_in <= 1.0 <= b.eff_out:
            messages.append("battery {} must have eff_in <= 1 <= eff_out".format(b.id))
        if b.epr < 0 or b.cost < 0:
            messages.append("battery {} has negative epr or cost".format(b.id))
        missing = _missing_years(b.invest_cost, instance.years)
        if missing:
            messages.append("battery {} has no invest cost for years {}".format(b.id, missing))
    return messages


def _renewable_violations(instance: SystemInstance) -> List[str]:
    messages = []
    for r in instance.renewables:
        for name, values in (
            ("solar_min", r.solar_min),
            ("solar_max", r.solar_max),
            ("wind_min", r.wind_min),
            ("wind_max", r.wind_max),
            ("solar_invest_cost", r.solar_invest_cost),
            ("wind_invest_cost", r.wind_invest_cost),
        ):
            missing = _missing_years(values, instance.years)
            if missing:
                messages.append("zone {} has no {} for years {}".format(r.zone, name, missing))
        for y in instance.years:
            if r.solar_min.get(y, 0.0) > r.solar_max.get(y, 0.0):
                messages.append("zone {} must have solar_min <= solar_max in {}".format(r.zone, y))
            if r.wind_min.get(y, 0.0) > r.wind_max.get(y, 0.0):
                messages.append("zone {} must have wind_min <= wind_max in {}".format(r.zone, y))
            if y in r.solar_max and r.solar0 > r.solar_max[y]:
                messages.append("zone {} initial solar exceeds solar_max in {}".format(r.zone, y))
            if y in r.wind_max and r.wind0 > r.wind_max[y]:
                messages.append("zone {} initial wind exceeds wind_max in {}".format(r.zone, y))
    return messages


def _policy_violations(instance: SystemInstance) -> List[str]:
    messages = []
    for (area, year), share in sorted(instance.policy.res_share.items()):
        if not 0.0 <= share <= 1.0:
            messages.append("renewable share of area {} in {} must be between 0 and 1".format(area, year))
    for (area, year), cap in sorted(instance.policy.co2_cap.items()):
        if cap < 0:
            messages.append("CO2 cap of area {} in {} must be nonnegative".format(area, year))
    p = instance.penalties
    if min(p.overgeneration, p.energy_not_supplied, p.reserve_not_supplied, p.gas_curtailment) < 0:
        messages.append("penalties must be nonnegative")
    return messages


def _calendar_violations(instance: SystemInstance, calendar: RepresentativeCalendar) -> List[str]:
    messages = []
    owners = {
        "solar": set(instance.power_zones),
        "wind": set(instance.power_zones),
        "demand_power": set(instance.power_zones),
        "reserve": set(instance.power_zones),
        "demand_gas": set(instance.gas_zones),
        "inflow": {h.id for h in instance.hydro_plants},
    }
    for year in instance.years:
        if year not in calendar.years:
            messages.append("calendar has no representative days for year {}".format(year))
            continue
        cal = calendar[year]
        total = sum(cal.weights.values())
        if total != DAYS_PER_YEAR:
            messages.append("cluster weights must sum to 365 (year {}: found {:g})".format(year, total))
        declared = set(cal.clusters)
        unknown = sorted({c for c in cal.day_map if c not in declared})
        if unknown:
            messages.append("day map of year {} refers to undeclared clusters {}".format(year, unknown))
        counts = cal.day_counts()
        for c in cal.clusters:
            if cal.weights[c] != counts[c]:
                messages.append(
                    "weight of cluster {} in year {} is {:g} but {} days map to it".format(
                        c, year, cal.weights[c], counts[c]
                    )
                )
        shape = (len(cal.clusters), HOURS)
        for kind, by_owner in sorted(cal.profiles.items()):
            for owner, values in sorted(by_owner.items()):
                if owner not in owners[kind]:
                    messages.append("profile {} of year {} refers to undeclared {}".format(kind, year, owner))
                if values.shape != shape:
                    messages.append(
                        "profile {} of {} in year {} must cover 24 hours of {} clusters".format(
                            kind, owner, year, len(cal.clusters)
                        )
                    )
                elif kind in UNIT_PROFILES and (values.min() < 0 or values.max() > 1):
                    messages.append("profile {} of {} in year {} must lie in [0, 1]".format(kind, owner, year))
                elif values.min() < 0:
                    messages.append("profile {} of {} in year {} must be nonnegative".format(kind, owner, year))
        for kind, required in (("demand_power", instance.power_zones), ("demand_gas", instance.gas_zones)):
            for owner in required:
                if owner not in cal.profiles.get(kind, {}):
                    messages.append("calendar has no {} profile for {} in year {}".format(kind, owner, year))
    return messages


def _scenario_violations(instance: SystemInstance, scenarios: ScenarioSet) -> List[str]:
    messages = []
    total = sum(s.probability for s in scenarios.scenarios)
    if abs(total - 1.0) > PROBABILITY_TOL:
        messages.append("scenario probabilities must sum to 1 (found {!r})".format(total))
    fuels = sorted({k.fuel for k in instance.thermal_clusters if k.fuel not in (GAS, NO_FUEL)})
    for s in scenarios.scenarios:
        if not 0.0 <= s.probability <= 1.0:
            messages.append("scenario {} probability must lie in [0, 1]".format(s.id))
        prices = list(s.co2.values()) + [v for path in s.fuel.values() for v in path.values()]
        prices += [v for path in s.gas_cost.values() for v in path.values()]
        if prices and np.min(prices) < 0:
            messages.append("scenario {} has negative prices".format(s.id))
        missing = _missing_years(s.co2, instance.years)
        if missing:
            messages.append("scenario {} has no CO2 price for years {}".format(s.id, missing))
        for fuel in fuels:
            missing = _missing_years(s.fuel.get(fuel, {}), instance.years)
            if missing:
                messages.append("scenario {} has no {} price for years {}".format(s.id, fuel, missing))
        for zone in instance.gas_zones:
            missing = _missing_years(s.gas_cost.get(zone, {}), instance.years)
            if missing:
                messages.append("scenario {} has no gas cost of zone {} for years {}".format(s.id, zone, missing))
    return messages
