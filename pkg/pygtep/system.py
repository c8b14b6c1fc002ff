# -*- coding: utf-8 -*-
"""
The coupled power/gas system: zones, networks, generation fleet, storage and policy.

Instances are immutable and carry canonical units: MW (MW_th for gas), MWh,
money/MWh and money/MW. Files may declare other power and capacity-cost
units under ``meta.units``; values are converted once, at load.
"""
import json
import pprint
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple

from pygtep.core import EdgeType, NodeType, Rendering
from pygtep.exceptions import InstanceReferenceError, ParseError, SchemaError

EXISTING = "existing"
CANDIDATE = "candidate"
GAS = "gas"
NO_FUEL = "none"
HYDRO_KINDS = ("run_of_river", "reservoir", "pumped")

POWER_UNITS = {"MW": 1.0, "GW": 1000.0, "kW": 0.001}
CAPACITY_COST_UNITS = {"per_MW": 1.0, "per_kW": 1000.0}

YearMap = Dict[int, float]


@dataclass(frozen=True)
class Area:
    """A group of power zones sharing policy targets."""

    id: str
    zones: Tuple[str, ...]


@dataclass(frozen=True)
class Link:
    """A power line or a gas pipeline; positive flow goes from from_zone to to_zone."""

    id: str
    from_zone: str
    to_zone: str
    flow_min: float
    flow_max: float
    status: str = EXISTING
    invest_cost: Optional[float] = None

    @property
    def is_candidate(self) -> bool:
        """Whether the link can be built."""
        return self.status == CANDIDATE


TransmissionLine = Link
GasPipeline = Link


@dataclass(frozen=True)
class ThermalCluster:
    """A fleet of identical thermal units; gas-fired clusters draw from gas_zone."""

    id: str
    zone: str
    fuel: str
    p_min: float
    p_max: float
    startup_cost: float
    heat_rate: float
    co2_rate: float
    om_cost: float
    mut: int
    mdt: int
    n0: int
    n_min: YearMap
    n_max: YearMap
    invest_cost: YearMap
    decommission_cost: YearMap
    gas_zone: Optional[str] = None

    @property
    def is_gas_fired(self) -> bool:
        """Whether the cluster burns network gas."""
        return self.fuel == GAS


@dataclass(frozen=True)
class HydroPlant:
    """An equivalent hydro plant."""

    id: str
    zone: str
    kind: str
    programmable: bool
    out_max: float
    in_max: float
    spill_max: float
    epr: float
    eff_in: float
    eff_out: float
    level0: float
    cost: float
    status: str = EXISTING
    invest_cost: Optional[float] = None

    @property
    def is_candidate(self) -> bool:
        """Whether the plant can be built."""
        return self.status == CANDIDATE


@dataclass(frozen=True)
class BatteryTech:
    """A battery technology installed in a zone."""

    id: str
    zone: str
    epr: float
    self_discharge: float
    eff_in: float
    eff_out: float
    cost: float
    cap0: float
    cap_max: float
    invest_cost: YearMap
    initial_level: float = 0.0


@dataclass(frozen=True)
class PtGTech:
    """A power-to-gas technology linking a power zone to a gas zone."""

    id: str
    power_zone: str
    gas_zone: str
    efficiency: float
    cost: float
    cap0: float
    cap_max: float
    invest_cost: float


@dataclass(frozen=True)
class RenewableZoneData:
    """Solar and wind capacity of a power zone."""

    zone: str
    solar0: float
    wind0: float
    solar_min: YearMap
    solar_max: YearMap
    wind_min: YearMap
    wind_max: YearMap
    solar_invest_cost: YearMap
    wind_invest_cost: YearMap


@dataclass(frozen=True)
class GasZoneData:
    """Supply and storage of a gas zone."""

    zone: str
    supply_min: float
    supply_max: float
    inject_max: float
    withdraw_max: float
    storage_max: float
    eff_in: float
    eff_out: float
    level0: float


@dataclass(frozen=True)
class PolicyTargets:
    """Renewable shares and CO2 caps per (area, year); a missing cap is no cap."""

    res_share: Mapping[Tuple[str, int], float] = field(default_factory=dict)
    co2_cap: Mapping[Tuple[str, int], float] = field(default_factory=dict)


@dataclass(frozen=True)
class Penalties:
    """Unit penalties of the slack variables."""

    overgeneration: float
    energy_not_supplied: float
    reserve_not_supplied: float
    gas_curtailment: float


@dataclass(frozen=True)
class SystemInstance(Rendering):
    """The static description of the system, its investment menu and its targets."""

    years: Tuple[int, ...]
    base_year: int
    discount_rate: float
    storage_check_period: int
    power_zones: Tuple[str, ...]
    gas_zones: Tuple[str, ...]
    areas: Tuple[Area, ...]
    lines: Tuple[Link, ...]
    pipelines: Tuple[Link, ...]
    thermal_clusters: Tuple[ThermalCluster, ...]
    hydro_plants: Tuple[HydroPlant, ...]
    batteries: Tuple[BatteryTech, ...]
    ptg: Tuple[PtGTech, ...]
    renewables: Tuple[RenewableZoneData, ...]
    gas_zone_data: Tuple[GasZoneData, ...]
    policy: PolicyTargets
    penalties: Penalties
    name: str = "instance"

    @property
    def candidate_lines(self) -> Tuple[Link, ...]:
        """The lines that can be built."""
        return tuple(line for line in self.lines if line.is_candidate)

    @property
    def candidate_pipelines(self) -> Tuple[Link, ...]:
        """The pipelines that can be built."""
        return tuple(pipe for pipe in self.pipelines if pipe.is_candidate)

    @property
    def candidate_hydro(self) -> Tuple[HydroPlant, ...]:
        """The hydro plants that can be built."""
        return tuple(h for h in self.hydro_plants if h.is_candidate)

    @property
    def programmable_hydro(self) -> Tuple[HydroPlant, ...]:
        """The hydro plants with a reservoir chain."""
        return tuple(h for h in self.hydro_plants if h.programmable)

    def renewable(self, zone: str) -> Optional[RenewableZoneData]:
        """Solar and wind data of a zone, if any."""
        for data in self.renewables:
            if data.zone == zone:
                return data
        return None

    def gas_data(self, zone: str) -> Optional[GasZoneData]:
        """Supply and storage data of a gas zone, if any."""
        for data in self.gas_zone_data:
            if data.zone == zone:
                return data
        return None

    def area_of(self, zone: str) -> Optional[str]:
        """The area containing a zone, if any."""
        for area in self.areas:
            if zone in area.zones:
                return area.id
        return None

    def get_nodes(self) -> Iterable[NodeType]:
        """Power zones as boxes, gas zones as ellipses."""
        for zone in self.power_zones:
            yield "P_" + zone, {"label": zone, "shape": "box"}
        for zone in self.gas_zones:
            yield "G_" + zone, {"label": zone, "shape": "ellipse"}

    def get_edges(self) -> Iterable[EdgeType]:
        """Lines, pipelines and power-to-gas couplings; candidates are dashed."""
        for line in self.lines:
            style = {"style": "dashed"} if line.is_candidate else {}
            yield "P_" + line.from_zone, "P_" + line.to_zone, line.id, style
        for pipe in self.pipelines:
            style = {"style": "dashed"} if pipe.is_candidate else {}
            yield "G_" + pipe.from_zone, "G_" + pipe.to_zone, pipe.id, dict(style, color="blue")
        for tech in self.ptg:
            yield "P_" + tech.power_zone, "G_" + tech.gas_zone, tech.id, {"style": "dotted"}


# -- loading -----------------------------------------------------------------


class DocumentReader:
    """Typed access to a JSON object, with paths in error messages."""

    def __init__(self, data: Any, path: str):
        if not isinstance(data, dict):
            raise SchemaError("{}: expected an object, found {}.".format(path, type(data).__name__))
        self.data = data
        self.path = path

    def has(self, key: str) -> bool:
        return key in self.data and self.data[key] is not None

    def raw(self, key: str) -> Any:
        if key not in self.data:
            raise SchemaError("{}: missing field {}.".format(self.path, pprint.pformat(key)))
        return self.data[key]

    def number(self, key: str, default: Optional[float] = None, scale: float = 1.0) -> float:
        if default is not None and key not in self.data:
            return default
        return _as_number(self.raw(key), "{}.{}".format(self.path, key)) * scale

    def optional_number(self, key: str, scale: float = 1.0) -> Optional[float]:
        return self.number(key, scale=scale) if self.has(key) else None

    def integer(self, key: str, default: Optional[int] = None) -> int:
        if default is not None and key not in self.data:
            return default
        return _as_integer(self.raw(key), "{}.{}".format(self.path, key))

    def string(self, key: str, default: Optional[str] = None) -> str:
        if default is not None and key not in self.data:
            return default
        value = self.raw(key)
        if isinstance(value, bool) or not isinstance(value, (str, int)):
            raise SchemaError("{}.{}: expected a string.".format(self.path, key))
        return str(value)

    def boolean(self, key: str) -> bool:
        value = self.raw(key)
        if not isinstance(value, bool):
            raise SchemaError("{}.{}: expected true or false.".format(self.path, key))
        return value

    def items(self, key: str, required: bool = True) -> List["DocumentReader"]:
        if not required and key not in self.data:
            return []
        value = self.raw(key)
        if not isinstance(value, list):
            raise SchemaError("{}.{}: expected a list.".format(self.path, key))
        return [DocumentReader(item, "{}.{}[{}]".format(self.path, key, i)) for i, item in enumerate(value)]

    def strings(self, key: str) -> Tuple[str, ...]:
        value = self.raw(key)
        if not isinstance(value, list):
            raise SchemaError("{}.{}: expected a list.".format(self.path, key))
        return tuple(str(v) for v in value)

    def integers(self, key: str) -> Tuple[int, ...]:
        value = self.raw(key)
        if not isinstance(value, list):
            raise SchemaError("{}.{}: expected a list.".format(self.path, key))
        return tuple(_as_integer(v, "{}.{}".format(self.path, key)) for v in value)

    def year_map(self, key: str, scale: float = 1.0, required: bool = True) -> YearMap:
        if not required and key not in self.data:
            return {}
        value = self.raw(key)
        path = "{}.{}".format(self.path, key)
        if not isinstance(value, dict):
            raise SchemaError("{}: expected an object keyed by year.".format(path))
        return {
            _as_integer(year, path): _as_number(v, "{}[{}]".format(path, year)) * scale for year, v in value.items()
        }

    def child(self, key: str, required: bool = True) -> "DocumentReader":
        if not required and key not in self.data:
            return DocumentReader({}, "{}.{}".format(self.path, key))
        return DocumentReader(self.raw(key), "{}.{}".format(self.path, key))


def _as_number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError("{}: expected a number, found {}.".format(path, pprint.pformat(value)))
    value = float(value)
    if value != value or value in (float("inf"), float("-inf")):
        raise SchemaError("{}: numbers must be finite.".format(path))
    return value


def _as_integer(value: Any, path: str) -> int:
    if isinstance(value, str):
        try:
            return int(value)
        except ValueError:
            raise SchemaError("{}: expected an integer, found {}.".format(path, pprint.pformat(value)))
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise SchemaError("{}: expected an integer, found {}.".format(path, pprint.pformat(value)))
    return int(value)


def decode_document(data: bytes) -> Any:
    """Decode a JSON document, raising ParseError on malformed input."""
    try:
        text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
        return json.loads(text)
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ParseError("Malformed document: {}".format(e))


def encode_document(document: Any) -> bytes:
    """Encode a JSON document canonically: sorted keys, two-space indent."""
    return (json.dumps(document, sort_keys=True, indent=2) + "\n").encode("utf-8")


def _unit_factors(meta: DocumentReader) -> Tuple[float, float]:
    units = meta.child("units", required=False)
    power = units.string("power", "MW")
    capacity_cost = units.string("capacity_cost", "per_MW")
    if power not in POWER_UNITS:
        raise SchemaError("meta.units.power: unknown unit {}.".format(pprint.pformat(power)))
    if capacity_cost not in CAPACITY_COST_UNITS:
        raise SchemaError("meta.units.capacity_cost: unknown unit {}.".format(pprint.pformat(capacity_cost)))
    return POWER_UNITS[power], CAPACITY_COST_UNITS[capacity_cost]


def _read_link(item: DocumentReader, pu: float) -> Link:
    return Link(
        id=item.string("id"),
        from_zone=item.string("from"),
        to_zone=item.string("to"),
        flow_min=item.number("flow_min", scale=pu),
        flow_max=item.number("flow_max", scale=pu),
        status=item.string("status", EXISTING),
        invest_cost=item.optional_number("invest_cost"),
    )


def _read_cluster(item: DocumentReader, pu: float, cu: float) -> ThermalCluster:
    return ThermalCluster(
        id=item.string("id"),
        zone=item.string("zone"),
        fuel=item.string("fuel"),
        gas_zone=item.string("gas_zone") if item.has("gas_zone") else None,
        p_min=item.number("p_min", scale=pu),
        p_max=item.number("p_max", scale=pu),
        startup_cost=item.number("startup_cost"),
        heat_rate=item.number("heat_rate"),
        co2_rate=item.number("co2_rate"),
        om_cost=item.number("om_cost"),
        mut=item.integer("mut"),
        mdt=item.integer("mdt"),
        n0=item.integer("n0"),
        n_min=item.year_map("n_min"),
        n_max=item.year_map("n_max"),
        invest_cost=item.year_map("invest_cost", scale=cu),
        decommission_cost=item.year_map("decommission_cost", scale=cu),
    )


def _read_hydro(item: DocumentReader, pu: float, cu: float) -> HydroPlant:
    invest = item.optional_number("invest_cost")
    return HydroPlant(
        id=item.string("id"),
        zone=item.string("zone"),
        kind=item.string("kind"),
        programmable=item.boolean("programmable"),
        out_max=item.number("out_max", scale=pu),
        in_max=item.number("in_max", 0.0, scale=pu),
        spill_max=item.number("spill_max", 0.0, scale=pu),
        epr=item.number("epr", 0.0),
        eff_in=item.number("eff_in", 1.0),
        eff_out=item.number("eff_out", 1.0),
        level0=item.number("level0", 0.0, scale=pu),
        cost=item.number("cost", 0.0),
        status=item.string("status", EXISTING),
        invest_cost=invest * cu if invest is not None else None,
    )


def _read_battery(item: DocumentReader, pu: float, cu: float) -> BatteryTech:
    return BatteryTech(
        id=item.string("id"),
        zone=item.string("zone"),
        epr=item.number("epr"),
        self_discharge=item.number("self_discharge", 0.0),
        eff_in=item.number("eff_in", 1.0),
        eff_out=item.number("eff_out", 1.0),
        cost=item.number("cost", 0.0),
        cap0=item.number("cap0", 0.0, scale=pu),
        cap_max=item.number("cap_max", scale=pu),
        invest_cost=item.year_map("invest_cost", scale=cu),
        initial_level=item.number("initial_level", 0.0, scale=pu),
    )


def _read_ptg(item: DocumentReader, pu: float, cu: float) -> PtGTech:
    return PtGTech(
        id=item.string("id"),
        power_zone=item.string("power_zone"),
        gas_zone=item.string("gas_zone"),
        efficiency=item.number("efficiency"),
        cost=item.number("cost", 0.0),
        cap0=item.number("cap0", 0.0, scale=pu),
        cap_max=item.number("cap_max", scale=pu),
        invest_cost=item.number("invest_cost", scale=cu),
    )


def _read_renewable(item: DocumentReader, pu: float, cu: float) -> RenewableZoneData:
    return RenewableZoneData(
        zone=item.string("zone"),
        solar0=item.number("solar0", 0.0, scale=pu),
        wind0=item.number("wind0", 0.0, scale=pu),
        solar_min=item.year_map("solar_min", scale=pu),
        solar_max=item.year_map("solar_max", scale=pu),
        wind_min=item.year_map("wind_min", scale=pu),
        wind_max=item.year_map("wind_max", scale=pu),
        solar_invest_cost=item.year_map("solar_invest_cost", scale=cu),
        wind_invest_cost=item.year_map("wind_invest_cost", scale=cu),
    )


def _read_gas_zone(item: DocumentReader, pu: float) -> GasZoneData:
    return GasZoneData(
        zone=item.string("zone"),
        supply_min=item.number("supply_min", 0.0, scale=pu),
        supply_max=item.number("supply_max", scale=pu),
        inject_max=item.number("inject_max", 0.0, scale=pu),
        withdraw_max=item.number("withdraw_max", 0.0, scale=pu),
        storage_max=item.number("storage_max", 0.0, scale=pu),
        eff_in=item.number("eff_in", 1.0),
        eff_out=item.number("eff_out", 1.0),
        level0=item.number("level0", 0.0, scale=pu),
    )


def _read_policy(policy: DocumentReader) -> PolicyTargets:
    shares = {
        (item.string("area"), item.integer("year")): item.number("share") for item in policy.items("res_share", False)
    }
    caps = {(item.string("area"), item.integer("year")): item.number("cap") for item in policy.items("co2_cap", False)}
    return PolicyTargets(res_share=shares, co2_cap=caps)


def instance_from_document(document: Any) -> SystemInstance:
    """
    Build an instance from a decoded document.

    :raise SchemaError: on missing fields, wrong types or out-of-range metadata.
    :raise InstanceReferenceError: on references to undeclared zones or areas.
    """
    root = DocumentReader(document, "instance")
    meta = root.child("meta")
    pu, cu = _unit_factors(meta)
    base_year = meta.integer("base_year")
    years = meta.integers("years")
    instance = SystemInstance(
        name=meta.string("name", "instance"),
        years=years,
        base_year=base_year,
        discount_rate=meta.number("discount_rate"),
        storage_check_period=meta.integer("storage_check_period_days"),
        power_zones=root.strings("power_zones"),
        gas_zones=root.strings("gas_zones"),
        areas=tuple(Area(item.string("id"), item.strings("zones")) for item in root.items("areas", False)),
        lines=tuple(_read_link(item, pu) for item in root.items("lines", False)),
        pipelines=tuple(_read_link(item, pu) for item in root.items("pipelines", False)),
        thermal_clusters=tuple(_read_cluster(item, pu, cu) for item in root.items("thermal_clusters", False)),
        hydro_plants=tuple(_read_hydro(item, pu, cu) for item in root.items("hydro_plants", False)),
        batteries=tuple(_read_battery(item, pu, cu) for item in root.items("batteries", False)),
        ptg=tuple(_read_ptg(item, pu, cu) for item in root.items("ptg", False)),
        renewables=tuple(_read_renewable(item, pu, cu) for item in root.items("renewables", False)),
        gas_zone_data=tuple(_read_gas_zone(item, pu) for item in root.items("gas_zone_data", False)),
        policy=_read_policy(root.child("policy", required=False)),
        penalties=_read_penalties(root.child("penalties")),
    )
    for message in structural_violations(instance):
        raise SchemaError(message)
    for message in reference_violations(instance):
        raise InstanceReferenceError(message)
    return instance


def _read_penalties(penalties: DocumentReader) -> Penalties:
    return Penalties(
        overgeneration=penalties.number("overgeneration"),
        energy_not_supplied=penalties.number("energy_not_supplied"),
        reserve_not_supplied=penalties.number("reserve_not_supplied"),
        gas_curtailment=penalties.number("gas_curtailment"),
    )


def load_instance(data: bytes) -> SystemInstance:
    """
    Load an instance file.

    :param data: the file content.
    :return: the instance, in canonical units.
    :raise ParseError: if the file is not JSON.
    :raise SchemaError: if a required field is missing or metadata is out of range.
    :raise InstanceReferenceError: if an identifier refers to an undeclared zone.
    """
    return instance_from_document(decode_document(data))


def _year_map_document(values: YearMap) -> Dict[str, float]:
    return {str(year): value for year, value in sorted(values.items())}


def _drop_none(document: Dict[str, Any]) -> Dict[str, Any]:
    return {key: value for key, value in document.items() if value is not None}


def instance_to_document(instance: SystemInstance) -> Dict[str, Any]:
    """Canonical document of an instance (MW, MWh, money/MW)."""

    def link(item: Link) -> Dict[str, Any]:
        return _drop_none(
            {
                "id": item.id,
                "from": item.from_zone,
                "to": item.to_zone,
                "flow_min": item.flow_min,
                "flow_max": item.flow_max,
                "status": item.status,
                "invest_cost": item.invest_cost,
            }
        )

    return {
        "meta": {
            "name": instance.name,
            "years": list(instance.years),
            "base_year": instance.base_year,
            "discount_rate": instance.discount_rate,
            "storage_check_period_days": instance.storage_check_period,
            "units": {"power": "MW", "capacity_cost": "per_MW"},
        },
        "power_zones": list(instance.power_zones),
        "gas_zones": list(instance.gas_zones),
        "areas": [{"id": a.id, "zones": list(a.zones)} for a in instance.areas],
        "lines": [link(line) for line in instance.lines],
        "pipelines": [link(pipe) for pipe in instance.pipelines],
        "thermal_clusters": [
            _drop_none(
                {
                    "id": k.id,
                    "zone": k.zone,
                    "fuel": k.fuel,
                    "gas_zone": k.gas_zone,
                    "p_min": k.p_min,
                    "p_max": k.p_max,
                    "startup_cost": k.startup_cost,
                    "heat_rate": k.heat_rate,
                    "co2_rate": k.co2_rate,
                    "om_cost": k.om_cost,
                    "mut": k.mut,
                    "mdt": k.mdt,
                    "n0": k.n0,
                    "n_min": _year_map_document(k.n_min),
                    "n_max": _year_map_document(k.n_max),
                    "invest_cost": _year_map_document(k.invest_cost),
                    "decommission_cost": _year_map_document(k.decommission_cost),
                }
            )
            for k in instance.thermal_clusters
        ],
        "hydro_plants": [
            _drop_none(
                {
                    "id": h.id,
                    "zone": h.zone,
                    "kind": h.kind,
                    "programmable": h.programmable,
                    "out_max": h.out_max,
                    "in_max": h.in_max,
                    "spill_max": h.spill_max,
                    "epr": h.epr,
                    "eff_in": h.eff_in,
                    "eff_out": h.eff_out,
                    "level0": h.level0,
                    "cost": h.cost,
                    "status": h.status,
                    "invest_cost": h.invest_cost,
                }
            )
            for h in instance.hydro_plants
        ],
        "batteries": [
            {
                "id": b.id,
                "zone": b.zone,
                "epr": b.epr,
                "self_discharge": b.self_discharge,
                "eff_in": b.eff_in,
                "eff_out": b.eff_out,
                "cost": b.cost,
                "cap0": b.cap0,
                "cap_max": b.cap_max,
                "invest_cost": _year_map_document(b.invest_cost),
                "initial_level": b.initial_level,
            }
            for b in instance.batteries
        ],
        "ptg": [
            {
                "id": g.id,
                "power_zone": g.power_zone,
                "gas_zone": g.gas_zone,
                "efficiency": g.efficiency,
                "cost": g.cost,
                "cap0": g.cap0,
                "cap_max": g.cap_max,
                "invest_cost": g.invest_cost,
            }
            for g in instance.ptg
        ],
        "renewables": [
            {
                "zone": r.zone,
                "solar0": r.solar0,
                "wind0": r.wind0,
                "solar_min": _year_map_document(r.solar_min),
                "solar_max": _year_map_document(r.solar_max),
                "wind_min": _year_map_document(r.wind_min),
                "wind_max": _year_map_document(r.wind_max),
                "solar_invest_cost": _year_map_document(r.solar_invest_cost),
                "wind_invest_cost": _year_map_document(r.wind_invest_cost),
            }
            for r in instance.renewables
        ],
        "gas_zone_data": [
            {
                "zone": n.zone,
                "supply_min": n.supply_min,
                "supply_max": n.supply_max,
                "inject_max": n.inject_max,
                "withdraw_max": n.withdraw_max,
                "storage_max": n.storage_max,
                "eff_in": n.eff_in,
                "eff_out": n.eff_out,
                "level0": n.level0,
            }
            for n in instance.gas_zone_data
        ],
        "policy": {
            "res_share": [
                {"area": area, "year": year, "share": share}
                for (area, year), share in sorted(instance.policy.res_share.items())
            ],
            "co2_cap": [
                {"area": area, "year": year, "cap": cap} for (area, year), cap in sorted(instance.policy.co2_cap.items())
            ],
        },
        "penalties": {
            "overgeneration": instance.penalties.overgeneration,
            "energy_not_supplied": instance.penalties.energy_not_supplied,
            "reserve_not_supplied": instance.penalties.reserve_not_supplied,
            "gas_curtailment": instance.penalties.gas_curtailment,
        },
    }


def save_instance(instance: SystemInstance) -> bytes:
    """Serialize an instance in canonical units; load_instance reads it back unchanged."""
    return encode_document(instance_to_document(instance))


# -- structural checks ---------------------------------------------------------


def structural_violations(instance: SystemInstance) -> List[str]:
    """Metadata invariants; load_instance rejects any of these as a schema error."""
    messages = []
    if instance.discount_rate < 0:
        messages.append("discount rate must be nonnegative, found {}".format(instance.discount_rate))
    if not 1 <= instance.storage_check_period <= 365:
        messages.append(
            "storage check period must be between 1 and 365 days, found {}".format(instance.storage_check_period)
        )
    years = list(instance.years)
    if not years:
        messages.append("at least one year is required")
    elif years != list(range(years[0], years[0] + len(years))):
        messages.append("years must be consecutive integers, found {}".format(pprint.pformat(years)))
    elif instance.base_year > years[0]:
        messages.append("base year {} is after the first year {}".format(instance.base_year, years[0]))
    return messages


def reference_violations(instance: SystemInstance) -> List[str]:
    """Identifiers that refer to undeclared zones, areas or plants."""
    messages = []
    power, gas = set(instance.power_zones), set(instance.gas_zones)
    area_ids = {a.id for a in instance.areas}

    def check(kind: str, owner: str, zone: Optional[str], declared: set) -> None:
        if zone is not None and zone not in declared:
            messages.append("{} {} refers to undeclared zone {}".format(kind, owner, pprint.pformat(zone)))

    for area in instance.areas:
        for zone in area.zones:
            check("area", area.id, zone, power)
    for line in instance.lines:
        check("line", line.id, line.from_zone, power)
        check("line", line.id, line.to_zone, power)
    for pipe in instance.pipelines:
        check("pipeline", pipe.id, pipe.from_zone, gas)
        check("pipeline", pipe.id, pipe.to_zone, gas)
    for k in instance.thermal_clusters:
        check("cluster", k.id, k.zone, power)
        check("cluster", k.id, k.gas_zone, gas)
    for h in instance.hydro_plants:
        check("hydro plant", h.id, h.zone, power)
    for b in instance.batteries:
        check("battery", b.id, b.zone, power)
    for g in instance.ptg:
        check("PtG technology", g.id, g.power_zone, power)
        check("PtG technology", g.id, g.gas_zone, gas)
    for r in instance.renewables:
        check("renewable data of", r.zone, r.zone, power)
    for n in instance.gas_zone_data:
        check("gas data of", n.zone, n.zone, gas)
    for (area, _), _ in list(instance.policy.res_share.items()) + list(instance.policy.co2_cap.items()):
        if area not in area_ids:
            messages.append("policy refers to undeclared area {}".format(pprint.pformat(area)))
    return messages


def iter_components(instance: SystemInstance) -> Iterable[Tuple[str, Any]]:
    """Pairs (kind, component) for every identified component."""
    kinds = (
        ("area", instance.areas),
        ("line", instance.lines),
        ("pipeline", instance.pipelines),
        ("cluster", instance.thermal_clusters),
        ("hydro plant", instance.hydro_plants),
        ("battery", instance.batteries),
        ("PtG technology", instance.ptg),
    )  # type: Tuple[Tuple[str, Iterable[Any]], ...]
    for kind, components in kinds:
        for component in components:
            yield kind, component


def by_zone(items: Iterable[Any], zone: str, attribute: str = "zone") -> List[Any]:
    """The items attached to a zone through an attribute."""
    return [item for item in items if getattr(item, attribute) == zone]

