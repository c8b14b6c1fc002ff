# -*- coding: utf-8 -*-
"""
Assembly of the planning problems.

Three variants share the same building blocks:

- the monolithic problem, first stage plus the operations of every (year, scenario);
- the master problem, first stage plus one recourse estimate ``theta[w=...]`` per scenario;
- the subproblem of one (year, scenario), where copies of the columns of ``x_y`` are
  pinned by fixing rows ``fix_<label>`` whose duals are the cut gradients.
"""
import logging
import pprint
from collections import OrderedDict
from typing import TYPE_CHECKING, Dict, Iterable, List, Mapping, Optional, Tuple, Union

import numpy as np

from pygtep._internal_utils import discount_factor
from pygtep.calendars import HOURS, CheckpointChain, RepresentativeCalendar, Scenario, ScenarioSet, expand_checkpoints
from pygtep.catalog import (
    BATTERY_AVAILABLE,
    BATTERY_CAP,
    COST_TERMS,
    DELTA_HYDRO,
    DELTA_LINE,
    DELTA_PIPE,
    FIRST_STAGE_SYMBOLS,
    PTG_AVAILABLE,
    PTG_CAP,
    RENEWABLE_OUTPUT,
    SECOND_STAGE_SYMBOLS,
    SOLAR,
    THETA_HYDRO,
    THETA_LINE,
    THETA_PIPE,
    UNITS,
    UNITS_BUILT,
    UNITS_RETIRED,
    WIND,
    InvestmentPlan,
    OperationSolution,
    first_stage_columns,
)
from pygtep.exceptions import DimensionError
from pygtep.labels import format_label
from pygtep.lp import LpBuilder, LpProblem
from pygtep.system import NO_FUEL, GasZoneData, HydroPlant, Link, SystemInstance, ThermalCluster

if TYPE_CHECKING:  # pragma: no cover
    from pygtep.benders import Cut

logger = logging.getLogger(__name__)

FIX_PREFIX = "fix_"
THETA = "theta"
FixedValues = Union[InvestmentPlan, Mapping[str, float]]


def marginal_cost(cluster: ThermalCluster, year: int, scenario: Scenario) -> float:
    """
    Cost of one MWh produced by a thermal cluster.

    Gas-fired clusters pay their fuel through the gas balance, so only operation and
    maintenance plus emissions are counted; the others also pay heat rate times fuel price.

    :raise MissingPriceError: if a needed price is not defined.
    """
    cost = cluster.om_cost + cluster.co2_rate * scenario.co2_price(year)
    if cluster.is_gas_fired or cluster.fuel == NO_FUEL:
        return cost
    return cost + cluster.heat_rate * scenario.fuel_price(cluster.fuel, year)


def merit_order(
    instance: SystemInstance, scenarios: ScenarioSet, year: int, scenario_id: str
) -> List[Tuple[str, float]]:
    """
    Thermal clusters sorted by marginal cost, ties broken by identifier.

    :return: pairs (cluster id, marginal cost).
    """
    scenario = scenarios[scenario_id]
    costs = [(k.id, marginal_cost(k, year, scenario)) for k in instance.thermal_clusters]
    return sorted(costs, key=lambda item: (item[1], item[0]))


# -- first stage ------------------------------------------------------------------


def _add_first_stage_columns(
    builder: LpBuilder, instance: SystemInstance, calendar: RepresentativeCalendar, with_costs: bool
) -> Dict[str, int]:
    columns = {}  # type: Dict[str, int]
    for y in instance.years:
        for spec in first_stage_columns(instance, calendar, y):
            columns[spec.label] = builder.add_column(spec.label, spec.lower, spec.upper, integer=spec.integer)
        if with_costs:
            _add_investment_costs(builder, instance, y, columns)
    return columns


def _add_investment_costs(builder: LpBuilder, instance: SystemInstance, y: int, columns: Mapping[str, int]) -> None:
    rate = discount_factor(instance.discount_rate, y, instance.base_year)

    def cost(label: str, value: float) -> None:
        builder.add_cost(columns[label], rate * value)

    for line in instance.candidate_lines:
        cost(format_label(DELTA_LINE, l=line.id, y=y), line.invest_cost or 0.0)
    for pipe in instance.candidate_pipelines:
        cost(format_label(DELTA_PIPE, j=pipe.id, y=y), pipe.invest_cost or 0.0)
    for h in instance.candidate_hydro:
        cost(format_label(DELTA_HYDRO, h=h.id, y=y), (h.invest_cost or 0.0) * h.out_max)
    for k in instance.thermal_clusters:
        cost(format_label(UNITS_BUILT, k=k.id, y=y), k.invest_cost.get(y, 0.0) * k.p_max)
        cost(format_label(UNITS_RETIRED, k=k.id, y=y), k.decommission_cost.get(y, 0.0) * k.p_max)
    for data in instance.renewables:
        cost(format_label(SOLAR, z=data.zone, y=y), data.solar_invest_cost.get(y, 0.0))
        cost(format_label(WIND, z=data.zone, y=y), data.wind_invest_cost.get(y, 0.0))
    for b in instance.batteries:
        cost(format_label(BATTERY_CAP, b=b.id, y=y), b.invest_cost.get(y, 0.0))
    for g in instance.ptg:
        cost(format_label(PTG_CAP, g=g.id, y=y), g.invest_cost)


def _add_first_stage_rows(
    builder: LpBuilder, instance: SystemInstance, calendar: RepresentativeCalendar, columns: Mapping[str, int]
) -> None:
    years = instance.years
    for symbol_delta, symbol_theta, key, assets, row in (
        (DELTA_LINE, THETA_LINE, "l", instance.candidate_lines, "inv_L"),
        (DELTA_PIPE, THETA_PIPE, "j", instance.candidate_pipelines, "inv_J"),
        (DELTA_HYDRO, THETA_HYDRO, "h", instance.candidate_hydro, "inv_H"),
    ):
        for asset in assets:
            for position, y in enumerate(years):
                coefficients = [(columns[format_label(symbol_theta, **{key: asset.id, "y": y})], 1.0)]
                coefficients += [
                    (columns[format_label(symbol_delta, **{key: asset.id, "y": i})], -1.0)
                    for i in years[: position + 1]
                ]
                builder.add_row(format_label(row, **{key: asset.id, "y": y}), coefficients, "E", 0.0)

    for k in instance.thermal_clusters:
        for position, y in enumerate(years):
            coefficients = [
                (columns[format_label(UNITS, k=k.id, y=y)], 1.0),
                (columns[format_label(UNITS_BUILT, k=k.id, y=y)], -1.0),
                (columns[format_label(UNITS_RETIRED, k=k.id, y=y)], 1.0),
            ]
            rhs = float(k.n0)
            if position > 0:
                coefficients.append((columns[format_label(UNITS, k=k.id, y=years[position - 1])], -1.0))
                rhs = 0.0
            builder.add_row(format_label("inv_K", k=k.id, y=y), coefficients, "E", rhs)

    for data in instance.renewables:
        z = data.zone
        for position, y in enumerate(years):
            for symbol, initial, low, high in (
                (SOLAR, data.solar0, data.solar_min, data.solar_max),
                (WIND, data.wind0, data.wind_min, data.wind_max),
            ):
                cumulative = [(columns[format_label(symbol, z=z, y=i)], 1.0) for i in years[: position + 1]]
                builder.add_row(
                    format_label("cap_{}_lo".format(symbol), z=z, y=y), cumulative, "G", low.get(y, 0.0) - initial
                )
                builder.add_row(
                    format_label("cap_{}_hi".format(symbol), z=z, y=y), cumulative, "L", high.get(y, 0.0) - initial
                )

    for symbol_cap, symbol_available, key, techs, prefix in (
        (BATTERY_CAP, BATTERY_AVAILABLE, "b", instance.batteries, "B"),
        (PTG_CAP, PTG_AVAILABLE, "g", instance.ptg, "P"),
    ):
        for tech in techs:
            total = [(columns[format_label(symbol_cap, **{key: tech.id, "y": y})], 1.0) for y in years]
            builder.add_row(format_label("inv_" + prefix, **{key: tech.id}), total, "L", tech.cap_max - tech.cap0)
            for position, y in enumerate(years):
                coefficients = [(columns[format_label(symbol_available, **{key: tech.id, "y": y})], 1.0)]
                coefficients += [
                    (columns[format_label(symbol_cap, **{key: tech.id, "y": i})], -1.0) for i in years[: position + 1]
                ]
                builder.add_row(format_label("avail_" + prefix, **{key: tech.id, "y": y}), coefficients, "E", tech.cap0)

    for position, y in enumerate(years):
        cal = calendar[y]
        for z in instance.power_zones:
            data = instance.renewable(z)
            solar0 = data.solar0 if data is not None else 0.0
            wind0 = data.wind0 if data is not None else 0.0
            mu, rho = cal.profile("solar", z), cal.profile("wind", z)
            for ci, c in enumerate(cal.clusters):
                for t in range(1, HOURS + 1):
                    m, r = float(mu[ci, t - 1]), float(rho[ci, t - 1])
                    coefficients = [(columns[format_label(RENEWABLE_OUTPUT, z=z, t=t, c=c, y=y)], 1.0)]
                    for i in years[: position + 1]:
                        coefficients.append((columns[format_label(SOLAR, z=z, y=i)], -m))
                        coefficients.append((columns[format_label(WIND, z=z, y=i)], -r))
                    builder.add_row(
                        format_label("res_def", z=z, t=t, c=c, y=y), coefficients, "E", solar0 * m + wind0 * r
                    )
        for area in instance.areas:
            share = instance.policy.res_share.get((area.id, y))
            if share is None:
                continue
            coefficients = []
            demand = 0.0
            for z in area.zones:
                load = cal.profile("demand_power", z)
                for ci, c in enumerate(cal.clusters):
                    psi = cal.weights[c]
                    demand += psi * float(load[ci].sum())
                    coefficients += [
                        (columns[format_label(RENEWABLE_OUTPUT, z=z, t=t, c=c, y=y)], psi) for t in range(1, HOURS + 1)
                    ]
            builder.add_row(format_label("pen", a=area.id, y=y), coefficients, "G", share * demand)


def build_first_stage(instance: SystemInstance, calendar: RepresentativeCalendar) -> LpProblem:
    """The investment columns, costs and constraints alone."""
    builder = LpBuilder("first_stage")
    columns = _add_first_stage_columns(builder, instance, calendar, with_costs=True)
    _add_first_stage_rows(builder, instance, calendar, columns)
    return builder.build()


# -- operations ---------------------------------------------------------------------


class _Operations:
    """Columns and rows of the operations of one (year, scenario)."""

    def __init__(
        self,
        builder: LpBuilder,
        instance: SystemInstance,
        calendar: RepresentativeCalendar,
        chain: CheckpointChain,
        year: int,
        scenario: Scenario,
        first: Mapping[str, int],
        weight: float,
        relax_uc: bool,
        discount_operations: bool,
    ):
        self.builder = builder
        self.instance = instance
        self.cal = calendar[year]
        self.chain = chain
        self.y = year
        self.scenario = scenario
        self.w = scenario.id
        self.first = first
        self.relax_uc = relax_uc
        if discount_operations:
            weight *= discount_factor(instance.discount_rate, year, instance.base_year)
        self.weight = weight
        self.hours = range(1, HOURS + 1)

    def label(self, symbol: str, **indices) -> str:
        indices.update(y=self.y, w=self.w)
        return format_label(symbol, **indices)

    def x(self, symbol: str, **indices) -> int:
        indices.update(y=self.y)
        return self.first[format_label(symbol, **indices)]

    def hourly(
        self, symbol: str, key: str, owner: str, lower=0.0, upper=np.inf, cost: float = 0.0, integer: bool = False
    ) -> Dict[Tuple[str, int], int]:
        """One column per (cluster, hour); bounds may be arrays of shape (C, 24)."""
        lower = np.broadcast_to(lower, (len(self.cal.clusters), HOURS))
        upper = np.broadcast_to(upper, (len(self.cal.clusters), HOURS))
        result = {}
        for ci, c in enumerate(self.cal.clusters):
            unit_cost = self.weight * self.cal.weights[c] * cost
            for t in self.hours:
                result[(c, t)] = self.builder.add_column(
                    self.label(symbol, **{key: owner, "t": t, "c": c}),
                    float(lower[ci, t - 1]),
                    float(upper[ci, t - 1]),
                    unit_cost,
                    integer,
                )
        return result

    def build(self) -> None:
        instance, penalties = self.instance, self.instance.penalties
        self.enp = {z: self.hourly("ENP", "z", z, cost=penalties.energy_not_supplied) for z in instance.power_zones}
        self.og = {z: self.hourly("OG", "z", z, cost=penalties.overgeneration) for z in instance.power_zones}
        self.rnp = {z: self.hourly("RNP", "z", z, cost=penalties.reserve_not_supplied) for z in instance.power_zones}
        self._thermal_columns()
        self._hydro_columns()
        self._battery_columns()
        self.fl = {line.id: self._flow_columns("FL", "l", line) for line in instance.lines}
        self.fj = {pipe.id: self._flow_columns("FJ", "j", pipe) for pipe in instance.pipelines}
        self.gptg = {g.id: self.hourly("GPTG", "g", g.id, cost=g.cost) for g in instance.ptg}
        self._gas_columns()

        self._power_balance()
        self._gas_balance()
        self._flow_rows("L", THETA_LINE, "l", instance.lines, self.fl)
        self._flow_rows("J", THETA_PIPE, "j", instance.pipelines, self.fj)
        self._hydro_rows()
        self._unit_commitment_rows()
        self._reserve_rows()
        self._emission_rows()
        self._battery_rows()
        self._ptg_rows()
        self._storage_chains()

    # columns

    def _thermal_columns(self) -> None:
        integer = not self.relax_uc
        self.alpha, self.beta, self.gamma, self.p, self.gamma0 = {}, {}, {}, {}, {}
        for k in self.instance.thermal_clusters:
            mc = marginal_cost(k, self.y, self.scenario)
            n_max = k.n_max.get(self.y, 0.0)
            self.alpha[k.id] = self.hourly("alpha", "k", k.id, upper=n_max, cost=k.startup_cost, integer=integer)
            self.beta[k.id] = self.hourly("beta", "k", k.id, upper=n_max, integer=integer)
            self.gamma[k.id] = self.hourly("gamma", "k", k.id, upper=n_max, cost=mc * k.p_min, integer=integer)
            self.p[k.id] = self.hourly("p", "k", k.id, cost=mc)
            self.gamma0[k.id] = {
                c: self.builder.add_column(self.label("gamma0", k=k.id, c=c), 0.0, n_max) for c in self.cal.clusters
            }

    def _hydro_columns(self) -> None:
        self.hout, self.hin, self.hspill = {}, {}, {}
        for h in self.instance.hydro_plants:
            upper = np.full((len(self.cal.clusters), HOURS), h.out_max)
            if not h.programmable:
                upper = np.minimum(upper, self.cal.profile("inflow", h.id))
            self.hout[h.id] = self.hourly("HOUT", "h", h.id, upper=upper, cost=h.cost)
            if h.programmable:
                self.hin[h.id] = self.hourly("HIN", "h", h.id, upper=h.in_max)
                self.hspill[h.id] = self.hourly("HSPILL", "h", h.id, upper=h.spill_max)

    def _battery_columns(self) -> None:
        self.bat, self.bin, self.bout = {}, {}, {}
        for b in self.instance.batteries:
            upper = np.full((len(self.cal.clusters), HOURS), np.inf)
            lower = np.zeros((len(self.cal.clusters), HOURS))
            # the daily cycle closes on the initial level
            upper[:, HOURS - 1] = b.initial_level
            lower[:, HOURS - 1] = b.initial_level
            self.bat[b.id] = self.hourly("B", "b", b.id, lower=lower, upper=upper)
            self.bin[b.id] = self.hourly("BIN", "b", b.id)
            self.bout[b.id] = self.hourly("BOUT", "b", b.id, cost=b.cost)

    def _flow_columns(self, symbol: str, key: str, link: Link) -> Dict[Tuple[str, int], int]:
        return self.hourly(symbol, key, link.id, lower=link.flow_min, upper=link.flow_max)

    def _gas_columns(self) -> None:
        penalties = self.instance.penalties
        self.g, self.gin, self.gout, self.gcurt, self.glt = {}, {}, {}, {}, {}
        for n in self.instance.gas_zones:
            data = self._gas_data(n)
            self.g[n] = self.hourly(
                "G", "n", n, lower=data.supply_min, upper=data.supply_max, cost=self.scenario.gas_price(n, self.y)
            )
            self.gin[n] = self.hourly("GIN", "n", n, upper=data.inject_max)
            self.gout[n] = self.hourly("GOUT", "n", n, upper=data.withdraw_max)
            self.gcurt[n] = self.hourly("GCURT", "n", n, cost=penalties.gas_curtailment)
            self.glt[n] = [
                self.builder.add_column(self.label("GLT", n=n, xi=xi), 0.0, data.storage_max)
                for xi in range(1, self.chain.xi_bar + 1)
            ]

    def _gas_data(self, zone: str) -> GasZoneData:
        data = self.instance.gas_data(zone)
        if data is None:
            return GasZoneData(zone, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0)
        return data

    # rows

    def _power_balance(self) -> None:
        instance, cal = self.instance, self.cal
        for ci, c in enumerate(cal.clusters):
            for z in instance.power_zones:
                demand = cal.profile("demand_power", z)
                for t in self.hours:
                    key = (c, t)
                    row = [
                        (self.x(RENEWABLE_OUTPUT, z=z, t=t, c=c), 1.0),
                        (self.enp[z][key], 1.0),
                        (self.og[z][key], -1.0),
                    ]
                    for k in instance.thermal_clusters:
                        if k.zone == z:
                            row += [(self.gamma[k.id][key], k.p_min), (self.p[k.id][key], 1.0)]
                    for h in instance.hydro_plants:
                        if h.zone == z:
                            row.append((self.hout[h.id][key], 1.0))
                            if h.programmable:
                                row.append((self.hin[h.id][key], -1.0))
                    for b in instance.batteries:
                        if b.zone == z:
                            row += [(self.bout[b.id][key], 1.0), (self.bin[b.id][key], -1.0)]
                    for line in instance.lines:
                        if line.to_zone == z:
                            row.append((self.fl[line.id][key], 1.0))
                        if line.from_zone == z:
                            row.append((self.fl[line.id][key], -1.0))
                    for g in instance.ptg:
                        if g.power_zone == z:
                            row.append((self.gptg[g.id][key], -1.0 / g.efficiency))
                    self.builder.add_row(
                        self.label("bal_P", z=z, t=t, c=c), row, "E", float(demand[ci, t - 1])
                    )

    def _gas_balance(self) -> None:
        instance, cal = self.instance, self.cal
        for ci, c in enumerate(cal.clusters):
            for n in instance.gas_zones:
                demand = cal.profile("demand_gas", n)
                for t in self.hours:
                    key = (c, t)
                    row = [
                        (self.g[n][key], 1.0),
                        (self.gout[n][key], 1.0),
                        (self.gcurt[n][key], 1.0),
                        (self.gin[n][key], -1.0),
                    ]
                    for g in instance.ptg:
                        if g.gas_zone == n:
                            row.append((self.gptg[g.id][key], 1.0))
                    for pipe in instance.pipelines:
                        if pipe.to_zone == n:
                            row.append((self.fj[pipe.id][key], 1.0))
                        if pipe.from_zone == n:
                            row.append((self.fj[pipe.id][key], -1.0))
                    for k in instance.thermal_clusters:
                        if k.is_gas_fired and k.gas_zone == n:
                            row += [
                                (self.gamma[k.id][key], -k.heat_rate * k.p_min),
                                (self.p[k.id][key], -k.heat_rate),
                            ]
                    self.builder.add_row(
                        self.label("bal_G", n=n, t=t, c=c), row, "E", float(demand[ci, t - 1])
                    )

    def _flow_rows(
        self,
        suffix: str,
        theta: str,
        key: str,
        links: Iterable[Link],
        flows: Mapping[str, Dict[Tuple[str, int], int]],
    ) -> None:
        for link in links:
            if not link.is_candidate:
                continue
            built = self.x(theta, **{key: link.id})
            for (c, t), column in flows[link.id].items():
                indices = {key: link.id, "t": t, "c": c}
                self.builder.add_row(
                    self.label("flow_{}_lo".format(suffix), **indices), [(column, 1.0), (built, -link.flow_min)], "G", 0.0
                )
                self.builder.add_row(
                    self.label("flow_{}_hi".format(suffix), **indices), [(column, 1.0), (built, -link.flow_max)], "L", 0.0
                )

    def _hydro_rows(self) -> None:
        for h in self.instance.candidate_hydro:
            built = self.x(THETA_HYDRO, h=h.id)
            limits = [("hyd_out", self.hout, h.out_max)]
            if h.programmable:
                limits += [("hyd_in", self.hin, h.in_max), ("hyd_spill", self.hspill, h.spill_max)]
            for symbol, columns, bound in limits:
                for (c, t), column in columns[h.id].items():
                    self.builder.add_row(
                        self.label(symbol, h=h.id, t=t, c=c), [(column, 1.0), (built, -bound)], "L", 0.0
                    )

    def _unit_commitment_rows(self) -> None:
        add = self.builder.add_row
        for k in self.instance.thermal_clusters:
            units = self.x(UNITS, k=k.id)
            headroom = k.p_max - k.p_min
            for c in self.cal.clusters:
                alpha, beta, gamma, p = self.alpha[k.id], self.beta[k.id], self.gamma[k.id], self.p[k.id]
                initial = self.gamma0[k.id][c]
                add(self.label("uc_init", k=k.id, c=c), [(initial, 1.0), (units, -1.0)], "L", 0.0)
                for t in self.hours:
                    key = (c, t)
                    indices = {"k": k.id, "t": t, "c": c}
                    previous = initial if t == 1 else gamma[(c, t - 1)]
                    add(self.label("uc_on", **indices), [(gamma[key], 1.0), (units, -1.0)], "L", 0.0)
                    add(
                        self.label("uc_status", **indices),
                        [(gamma[key], 1.0), (previous, -1.0), (alpha[key], -1.0), (beta[key], 1.0)],
                        "E",
                        0.0,
                    )
                    if t >= k.mut:
                        starts = [(alpha[(c, tau)], 1.0) for tau in range(t - k.mut + 1, t + 1)]
                        add(self.label("uc_mut", **indices), starts + [(gamma[key], -1.0)], "L", 0.0)
                    if t >= k.mdt:
                        stops = [(beta[(c, tau)], 1.0) for tau in range(t - k.mdt + 1, t + 1)]
                        add(self.label("uc_mdt", **indices), stops + [(gamma[key], 1.0), (units, -1.0)], "L", 0.0)
                    add(self.label("uc_pmax", **indices), [(p[key], 1.0), (gamma[key], -headroom)], "L", 0.0)

    def _reserve_rows(self) -> None:
        for ci, c in enumerate(self.cal.clusters):
            for z in self.instance.power_zones:
                requirement = self.cal.profile("reserve", z)
                for t in self.hours:
                    key = (c, t)
                    row = [(self.rnp[z][key], 1.0)]
                    for k in self.instance.thermal_clusters:
                        if k.zone == z:
                            row += [(self.gamma[k.id][key], k.p_max - k.p_min), (self.p[k.id][key], -1.0)]
                    self.builder.add_row(
                        self.label("res_req", z=z, t=t, c=c), row, "G", float(requirement[ci, t - 1])
                    )

    def _emission_rows(self) -> None:
        for area in self.instance.areas:
            cap = self.instance.policy.co2_cap.get((area.id, self.y))
            if cap is None:
                continue
            row = []
            for k in self.instance.thermal_clusters:
                if k.zone not in area.zones:
                    continue
                for (c, t), column in self.gamma[k.id].items():
                    psi = self.cal.weights[c]
                    row += [(column, psi * k.co2_rate * k.p_min), (self.p[k.id][(c, t)], psi * k.co2_rate)]
            self.builder.add_row(self.label("co2", a=area.id), row, "L", cap)

    def _battery_rows(self) -> None:
        add = self.builder.add_row
        for b in self.instance.batteries:
            available = self.x(BATTERY_AVAILABLE, b=b.id)
            level, charge, discharge = self.bat[b.id], self.bin[b.id], self.bout[b.id]
            for c in self.cal.clusters:
                for t in self.hours:
                    key = (c, t)
                    indices = {"b": b.id, "t": t, "c": c}
                    row = [(level[key], 1.0), (charge[key], -b.eff_in), (discharge[key], b.eff_out)]
                    rhs = 0.0
                    if t == 1:
                        rhs = (1.0 - b.self_discharge) * b.initial_level
                    else:
                        row.append((level[(c, t - 1)], -(1.0 - b.self_discharge)))
                    add(self.label("bat_lvl", **indices), row, "E", rhs)
                    add(self.label("bat_cap", **indices), [(level[key], 1.0), (available, -b.epr)], "L", 0.0)
                    add(self.label("bat_in", **indices), [(charge[key], 1.0), (available, -1.0)], "L", 0.0)
                    add(self.label("bat_out", **indices), [(discharge[key], 1.0), (available, -1.0)], "L", 0.0)

    def _ptg_rows(self) -> None:
        for g in self.instance.ptg:
            available = self.x(PTG_AVAILABLE, g=g.id)
            for (c, t), column in self.gptg[g.id].items():
                self.builder.add_row(
                    self.label("ptg_cap", g=g.id, t=t, c=c), [(column, 1.0), (available, -1.0)], "L", 0.0
                )

    def _storage_chains(self) -> None:
        segments = list(self.chain.segments)
        for h in self.instance.programmable_hydro:
            self._hydro_chain(h, segments)
        for n in self.instance.gas_zones:
            self._gas_chain(n, segments)

    def _segment_terms(self, segment, flows) -> List[Tuple[int, float]]:
        """Sum over the days of a segment of coefficient times hourly column."""
        days = segment.cluster_days(self.cal)
        terms = []
        for columns, coefficient in flows:
            for (c, t), column in columns.items():
                if days[c]:
                    terms.append((column, days[c] * coefficient))
        return terms

    def _hydro_chain(self, h: HydroPlant, segments) -> None:
        inflow = self.cal.profile("inflow", h.id)
        flows = [(self.hin[h.id], h.eff_in), (self.hout[h.id], -h.eff_out), (self.hspill[h.id], -1.0)]
        built = self.x(THETA_HYDRO, h=h.id) if h.is_candidate else None
        levels = [
            self.builder.add_column(self.label("HLT", h=h.id, xi=xi), 0.0, h.epr * h.out_max)
            for xi in range(1, len(segments) + 1)
        ]

        def natural(segment) -> float:
            days = segment.cluster_days(self.cal)
            return float(sum(days[c] * inflow[ci].sum() for ci, c in enumerate(self.cal.clusters)))

        for position, segment in enumerate(segments):
            row = [(levels[position], 1.0)] + [(j, -v) for j, v in self._segment_terms(segment, flows)]
            rhs = h.level0 if position == 0 else 0.0
            if position > 0:
                row.append((levels[position - 1], -1.0))
            if built is None:
                rhs += natural(segment)
            else:
                row.append((built, -natural(segment)))
            self.builder.add_row(self.label("hyd_lt", h=h.id, xi=segment.index), row, "E", rhs)

        tail = self.chain.tail
        row = [(levels[-1], 1.0)]
        rhs = h.level0
        if tail is not None:
            row += self._segment_terms(tail, flows)
            if built is None:
                rhs -= natural(tail)
            else:
                row.append((built, natural(tail)))
        self.builder.add_row(self.label("hyd_wrap", h=h.id), row, "E", rhs)

    def _gas_chain(self, n: str, segments) -> None:
        data = self._gas_data(n)
        flows = [(self.gin[n], data.eff_in), (self.gout[n], -data.eff_out)]
        levels = self.glt[n]
        for position, segment in enumerate(segments):
            row = [(levels[position], 1.0)] + [(j, -v) for j, v in self._segment_terms(segment, flows)]
            if position > 0:
                row.append((levels[position - 1], -1.0))
            self.builder.add_row(
                self.label("gas_lt", n=n, xi=segment.index), row, "E", data.level0 if position == 0 else 0.0
            )
        row = [(levels[-1], 1.0)]
        if self.chain.tail is not None:
            row += self._segment_terms(self.chain.tail, flows)
        self.builder.add_row(self.label("gas_wrap", n=n), row, "E", data.level0)


def _add_operations(
    builder: LpBuilder,
    instance: SystemInstance,
    calendar: RepresentativeCalendar,
    year: int,
    scenario: Scenario,
    first: Mapping[str, int],
    weight: float,
    relax_uc: bool,
    discount_operations: bool,
) -> None:
    chain = expand_checkpoints(calendar, instance.storage_check_period)
    _Operations(
        builder, instance, calendar, chain, year, scenario, first, weight, relax_uc, discount_operations
    ).build()


# -- problem variants ---------------------------------------------------------------


def build_monolithic(
    instance: SystemInstance,
    calendar: RepresentativeCalendar,
    scenarios: ScenarioSet,
    relax_uc: bool = False,
    discount_operations: bool = False,
) -> LpProblem:
    """
    The whole two-stage problem in one piece.

    Operating costs are weighted by the scenario probabilities and the
    representative-day weights; investment costs are always discounted.

    :param relax_uc: whether commitment columns are continuous.
    :param discount_operations: whether operating costs are discounted too.
    """
    builder = LpBuilder("monolithic")
    columns = _add_first_stage_columns(builder, instance, calendar, with_costs=True)
    _add_first_stage_rows(builder, instance, calendar, columns)
    for y in instance.years:
        for scenario in scenarios.scenarios:
            _add_operations(
                builder, instance, calendar, y, scenario, columns, scenario.probability, relax_uc, discount_operations
            )
    problem = builder.build()
    logger.debug("monolithic problem: %d columns, %d rows", problem.n, problem.m)
    return problem


def build_master(
    instance: SystemInstance,
    calendar: RepresentativeCalendar,
    scenarios: ScenarioSet,
    cuts: Iterable["Cut"] = (),
    iteration: int = 1,
) -> LpProblem:
    """
    The first stage plus one recourse estimate per scenario.

    In the first iteration every estimate is fixed to zero. Each cut adds the row
    ``theta_w - sum(gradient * x) >= intercept``.
    """
    builder = LpBuilder("master")
    columns = _add_first_stage_columns(builder, instance, calendar, with_costs=True)
    _add_first_stage_rows(builder, instance, calendar, columns)
    upper = 0.0 if iteration <= 1 else np.inf
    thetas = {
        s.id: builder.add_column(format_label(THETA, w=s.id), 0.0, upper, s.probability) for s in scenarios.scenarios
    }
    for cut in cuts:
        if cut.scenario not in thetas:
            raise DimensionError("Cut refers to unknown scenario {}.".format(pprint.pformat(cut.scenario)))
        row = [(thetas[cut.scenario], 1.0)]
        for label, slope in cut.gradient.items():
            if label not in columns:
                raise DimensionError("Cut refers to unknown column {}.".format(pprint.pformat(label)))
            row.append((columns[label], -slope))
        builder.add_row(format_label("cut", w=cut.scenario, nu=cut.iteration), row, "G", cut.intercept)
    return builder.build()


def build_subproblem(
    instance: SystemInstance,
    calendar: RepresentativeCalendar,
    scenarios: ScenarioSet,
    year: int,
    scenario_id: str,
    x_fix: Optional[FixedValues] = None,
    relax_uc: bool = True,
    discount_operations: bool = False,
) -> LpProblem:
    """
    The operations of one (year, scenario) with the investments pinned.

    Copies of the columns of ``x_y`` are free and fixed by rows ``fix_<label>``.
    Without values the copies are pinned to zero; see pin to change them.

    :raise DimensionError: if values are given but some column of x_y is missing.
    """
    builder = LpBuilder("operations_{}_{}".format(year, scenario_id))
    copies = {}  # type: Dict[str, int]
    for spec in first_stage_columns(instance, calendar, year):
        copies[spec.label] = builder.add_column(spec.label, -np.inf, np.inf)
        builder.add_row(FIX_PREFIX + spec.label, [(copies[spec.label], 1.0)], "E", 0.0, fixing=True)
    _add_operations(
        builder, instance, calendar, year, scenarios[scenario_id], copies, 1.0, relax_uc, discount_operations
    )
    problem = builder.build()
    if x_fix is not None:
        problem = pin(problem, x_fix, year)
    return problem


def fixed_columns(problem: LpProblem) -> List[str]:
    """Labels of the columns pinned by fixing rows, in row order."""
    return [problem.row_labels[i][len(FIX_PREFIX):] for i in sorted(problem.fixing_rows)]


def pin(problem: LpProblem, values: FixedValues, year: Optional[int] = None) -> LpProblem:
    """
    Move the fixing rows of a subproblem to new values.

    :param values: values keyed by column label, or a plan (then ``year`` is needed).
    :raise DimensionError: if a pinned column has no value.
    """
    if isinstance(values, InvestmentPlan):
        if year is None:
            raise ValueError("A year is needed to pin a subproblem to a plan.")
        values = values.year_values(year)
    rhs = problem.rhs.copy()
    for i in sorted(problem.fixing_rows):
        label = problem.row_labels[i][len(FIX_PREFIX):]
        if label not in values:
            raise DimensionError("No value for pinned column {}.".format(pprint.pformat(label)))
        rhs[i] = values[label]
    return problem.with_rhs(rhs)


def gradients(problem: LpProblem, duals: np.ndarray) -> Dict[str, float]:
    """Duals of the fixing rows keyed by the pinned column label."""
    return {problem.row_labels[i][len(FIX_PREFIX):]: float(duals[i]) for i in sorted(problem.fixing_rows)}


# -- reading solutions --------------------------------------------------------------


def _symbol(label: str) -> str:
    return label.partition("[")[0]


def cost_breakdown(problem: LpProblem, x: np.ndarray) -> Dict[str, float]:
    """
    The itemized operating costs of a solution.

    Terms follow the objective weights of the problem, so a monolithic problem gives
    probability-weighted totals.
    """
    terms = OrderedDict((name, 0.0) for name in COST_TERMS)
    owner = {symbol: name for name, symbols in COST_TERMS.items() for symbol in symbols}
    for j, label in enumerate(problem.col_labels):
        name = owner.get(_symbol(label))
        if name is not None:
            terms[name] += float(problem.cost[j] * x[j])
    return dict(terms)


def investment_cost(problem: LpProblem, x: np.ndarray) -> float:
    """The discounted investment and decommissioning cost of a solution."""
    return float(
        sum(problem.cost[j] * x[j] for j, label in enumerate(problem.col_labels) if _symbol(label) in FIRST_STAGE_SYMBOLS)
    )


def row_residuals(problem: LpProblem, x: np.ndarray, symbol: str) -> np.ndarray:
    """Activity minus right-hand side of the rows of a symbol."""
    rows = [i for i, label in enumerate(problem.row_labels) if _symbol(label) == symbol]
    if not rows:
        return np.zeros(0)
    return problem.row_activity(x)[rows] - problem.rhs[rows]


def operation_solution(
    problem: LpProblem, x: np.ndarray, objective: float, year: int, scenario: str, relaxed: bool
) -> OperationSolution:
    """Collect the operating values of a subproblem solution."""
    values = {
        label: float(x[j]) for j, label in enumerate(problem.col_labels) if _symbol(label) in SECOND_STAGE_SYMBOLS
    }
    return OperationSolution(year, scenario, float(objective), values, cost_breakdown(problem, x), relaxed)
