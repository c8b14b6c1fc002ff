# -*- coding: utf-8 -*-
"""
Small instances for tests, examples and the ``generate`` command.

Every builder returns documents (plain dicts in the file formats), so they can be
written to disk as well as loaded.
"""
import os
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from pygtep.calendars import (
    DAYS_PER_YEAR,
    HOURS,
    RepresentativeCalendar,
    ScenarioSet,
    calendar_from_document,
    load_calendar,
    load_scenarios,
    scenarios_from_document,
)
from pygtep.system import SystemInstance, encode_document, instance_from_document, load_instance

Documents = Tuple[Dict[str, Any], Dict[str, Any], Dict[str, Any]]
Inputs = Tuple[SystemInstance, RepresentativeCalendar, ScenarioSet]

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")
INSTANCE_FILE = "instance.json"
CALENDAR_FILE = "calendar.json"
SCENARIOS_FILE = "scenarios.json"


def bundled_paths(name: str = "toy2z") -> Dict[str, str]:
    """Paths of a bundled instance triple, keyed by ``instance``, ``calendar`` and ``scenarios``."""
    return {
        "instance": os.path.join(DATA_DIR, "{}.json".format(name)),
        "calendar": os.path.join(DATA_DIR, "{}_calendar.json".format(name)),
        "scenarios": os.path.join(DATA_DIR, "{}_scenarios.json".format(name)),
    }


def read_inputs(instance_path: str, calendar_path: str, scenarios_path: str) -> Inputs:
    """Load an instance triple from files."""
    with open(instance_path, "rb") as f:
        instance = load_instance(f.read())
    with open(calendar_path, "rb") as f:
        calendar = load_calendar(f.read())
    with open(scenarios_path, "rb") as f:
        scenarios = load_scenarios(f.read())
    return instance, calendar, scenarios


def load_bundled(name: str = "toy2z") -> Inputs:
    """The bundled toy: two power zones, one gas zone, two thermal clusters."""
    paths = bundled_paths(name)
    return read_inputs(paths["instance"], paths["calendar"], paths["scenarios"])


def from_documents(documents: Documents) -> Inputs:
    instance, calendar, scenarios = documents
    return instance_from_document(instance), calendar_from_document(calendar), scenarios_from_document(scenarios)


def write_documents(out_dir: str, documents: Documents) -> Dict[str, str]:
    """Write an instance triple; return the paths keyed like ``bundled_paths``."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "instance": os.path.join(out_dir, INSTANCE_FILE),
        "calendar": os.path.join(out_dir, CALENDAR_FILE),
        "scenarios": os.path.join(out_dir, SCENARIOS_FILE),
    }
    for key, document in zip(("instance", "calendar", "scenarios"), documents):
        with open(paths[key], "wb") as f:
            f.write(encode_document(document))
    return paths


def _year_map(years: Sequence[int], value: float) -> Dict[str, float]:
    return {str(y): value for y in years}


def _constant(value: float, clusters: int = 1) -> List[List[float]]:
    return [[float(value)] * HOURS for _ in range(clusters)]


def tiny_documents(
    demand: float = 100.0,
    years: Sequence[int] = (2030,),
    scenarios: Sequence[Tuple[str, float, float]] = (("BASE", 1.0, 50.0),),
    units: int = 0,
    candidate_units: int = 0,
    solar_max: Optional[float] = None,
    gas_demand: float = 0.0,
) -> Documents:
    """
    One power zone, one gas zone, one representative day.

    :param demand: constant hourly power demand.
    :param scenarios: triples (id, probability, CO2 price); fuel and gas prices are fixed.
    :param units: existing units of a single coal cluster of 50 MW (none if 0 and no candidates).
    :param candidate_units: units of that cluster that may be added.
    :param solar_max: if given, solar capacity in the zone may be built up to this value.
    """
    years = list(years)
    clusters = []
    if units or candidate_units:
        clusters.append(
            {
                "id": "K1",
                "zone": "Z1",
                "fuel": "coal",
                "p_min": 0.0,
                "p_max": 50.0,
                "startup_cost": 0.0,
                "heat_rate": 2.0,
                "co2_rate": 0.5,
                "om_cost": 10.0,
                "mut": 1,
                "mdt": 1,
                "n0": units,
                "n_min": _year_map(years, 0),
                "n_max": _year_map(years, units + candidate_units),
                "invest_cost": _year_map(years, 100000.0),
                "decommission_cost": _year_map(years, 1000.0),
            }
        )
    renewables = []
    if solar_max is not None:
        renewables.append(
            {
                "zone": "Z1",
                "solar0": 0.0,
                "wind0": 0.0,
                "solar_min": _year_map(years, 0.0),
                "solar_max": _year_map(years, solar_max),
                "wind_min": _year_map(years, 0.0),
                "wind_max": _year_map(years, 0.0),
                "solar_invest_cost": _year_map(years, 200000.0),
                "wind_invest_cost": _year_map(years, 0.0),
            }
        )
    instance = {
        "meta": {
            "name": "tiny",
            "base_year": years[0],
            "years": years,
            "discount_rate": 0.0,
            "storage_check_period_days": 365,
        },
        "power_zones": ["Z1"],
        "gas_zones": ["G1"],
        "areas": [{"id": "A1", "zones": ["Z1"]}],
        "thermal_clusters": clusters,
        "renewables": renewables,
        "gas_zone_data": [{"zone": "G1", "supply_max": 10000.0}],
        "penalties": {
            "overgeneration": 0.0,
            "energy_not_supplied": 3000.0,
            "reserve_not_supplied": 3000.0,
            "gas_curtailment": 3000.0,
        },
    }
    solar = [[0.0] * 6 + [0.2, 0.4, 0.6, 0.8, 1.0, 1.0, 1.0, 1.0, 0.8, 0.6, 0.4, 0.2] + [0.0] * 6]
    calendar = {
        "years": [
            {
                "year": y,
                "clusters": [{"id": "d1", "weight": DAYS_PER_YEAR}],
                "day_map": ["d1"] * DAYS_PER_YEAR,
                "profiles": {
                    "demand_power": {"Z1": _constant(demand)},
                    "demand_gas": {"G1": _constant(gas_demand)},
                    "solar": {"Z1": solar},
                },
            }
            for y in years
        ]
    }
    scenario_document = {
        "scenarios": [
            {
                "id": scenario_id,
                "probability": probability,
                "co2": _year_map(years, co2),
                "fuel": {"coal": _year_map(years, 10.0)},
                "gas_cost": {"G1": _year_map(years, 30.0)},
            }
            for scenario_id, probability, co2 in scenarios
        ]
    }
    return instance, calendar, scenario_document


def tiny_toy(**kwargs) -> Inputs:
    """Loaded version of ``tiny_documents``."""
    return from_documents(tiny_documents(**kwargs))


def _shape(rng: np.random.Generator, low: float, high: float) -> np.ndarray:
    """A day-shaped hourly curve between two levels, with some noise."""
    hours = np.arange(HOURS)
    base = low + (high - low) * 0.5 * (1.0 - np.cos(2.0 * np.pi * (hours - 3) / HOURS))
    return np.round(base * rng.uniform(0.95, 1.05, HOURS), 3)


def random_documents(seed: int) -> Documents:
    """
    A seeded random instance triple.

    Two or three power zones on a chain, one or two gas zones, two or three years,
    two representative days and two to four scenarios. Each zone has one thermal
    cluster (gas-fired in the first zone); at most three candidates per asset class.
    """
    rng = np.random.default_rng(seed)
    n_zones = int(rng.integers(2, 4))
    n_gas = int(rng.integers(1, 3))
    n_years = int(rng.integers(2, 4))
    n_scenarios = int(rng.integers(2, 5))
    years = list(range(2030, 2030 + n_years))
    zones = ["Z{}".format(i + 1) for i in range(n_zones)]
    gas_zones = ["G{}".format(i + 1) for i in range(n_gas)]
    peaks = {z: float(np.round(rng.uniform(80.0, 150.0), 1)) for z in zones}

    lines = []
    for i in range(n_zones - 1):
        capacity = float(np.round(rng.uniform(30.0, 80.0), 1))
        lines.append(
            {"id": "L{}".format(i + 1), "from": zones[i], "to": zones[i + 1], "flow_min": -capacity, "flow_max": capacity}
        )
    lines.append(
        {
            "id": "LC1",
            "from": zones[0],
            "to": zones[-1],
            "flow_min": -50.0,
            "flow_max": 50.0,
            "status": "candidate",
            "invest_cost": float(np.round(rng.uniform(1e6, 5e6), 0)),
        }
    )
    pipelines = []
    if n_gas == 2:
        pipelines = [
            {"id": "J1", "from": "G1", "to": "G2", "flow_min": -100.0, "flow_max": 100.0},
            {
                "id": "JC1",
                "from": "G1",
                "to": "G2",
                "flow_min": -100.0,
                "flow_max": 100.0,
                "status": "candidate",
                "invest_cost": float(np.round(rng.uniform(1e6, 4e6), 0)),
            },
        ]

    clusters = []
    for i, z in enumerate(zones):
        gas_fired = i == 0
        size = float(np.round(rng.uniform(30.0, 60.0), 1))
        n0 = int(np.ceil(0.6 * peaks[z] / size))
        cluster = {
            "id": "K{}".format(i + 1),
            "zone": z,
            "fuel": "gas" if gas_fired else "coal",
            "p_min": float(np.round(0.3 * size, 1)),
            "p_max": size,
            "startup_cost": float(np.round(rng.uniform(100.0, 1000.0), 0)),
            "heat_rate": float(np.round(rng.uniform(1.6, 2.2) if gas_fired else rng.uniform(2.5, 3.0), 3)),
            "co2_rate": 0.35 if gas_fired else 0.9,
            "om_cost": float(np.round(rng.uniform(1.0, 5.0), 2)),
            "mut": 1,
            "mdt": 1,
            "n0": n0,
            "n_min": _year_map(years, 0),
            "n_max": _year_map(years, n0 + int(rng.integers(0, 4))),
            "invest_cost": _year_map(years, float(np.round(rng.uniform(3e5, 6e5), 0))),
            "decommission_cost": _year_map(years, 1000.0),
        }
        if gas_fired:
            cluster["gas_zone"] = gas_zones[0]
        clusters.append(cluster)

    hydro = []
    if rng.random() < 0.5:
        hydro.append(
            {
                "id": "H1",
                "zone": zones[-1],
                "kind": "reservoir",
                "programmable": True,
                "out_max": 30.0,
                "in_max": 10.0,
                "spill_max": 500.0,
                "epr": 200.0,
                "eff_in": 0.9,
                "eff_out": 1.1,
                "level0": 2000.0,
                "cost": 0.5,
            }
        )
    batteries = [
        {
            "id": "B1",
            "zone": zones[0],
            "epr": 4.0,
            "self_discharge": 0.001,
            "eff_in": 0.95,
            "eff_out": 1.05,
            "cost": 0.5,
            "cap_max": float(np.round(rng.uniform(10.0, 40.0), 1)),
            "invest_cost": _year_map(years, float(np.round(rng.uniform(1e5, 3e5), 0))),
        }
    ]
    ptg = [
        {
            "id": "P1",
            "power_zone": zones[0],
            "gas_zone": gas_zones[-1],
            "efficiency": 0.7,
            "cost": 1.0,
            "cap_max": 20.0,
            "invest_cost": float(np.round(rng.uniform(4e5, 9e5), 0)),
        }
    ]
    renewables = [
        {
            "zone": z,
            "solar0": float(np.round(0.2 * peaks[z], 1)),
            "wind0": 0.0,
            "solar_min": _year_map(years, float(np.round(0.2 * peaks[z], 1))),
            "solar_max": _year_map(years, float(np.round(2.0 * peaks[z], 1))),
            "wind_min": _year_map(years, 0.0),
            "wind_max": _year_map(years, float(np.round(peaks[z], 1))),
            "solar_invest_cost": _year_map(years, float(np.round(rng.uniform(3e5, 6e5), 0))),
            "wind_invest_cost": _year_map(years, float(np.round(rng.uniform(8e5, 1.2e6), 0))),
        }
        for z in zones
    ]
    gas_zone_data = [
        {
            "zone": n,
            "supply_max": 1000.0 if i == 0 else 200.0,
            "inject_max": 20.0,
            "withdraw_max": 20.0,
            "storage_max": 5000.0,
            "eff_in": 0.98,
            "eff_out": 1.02,
            "level0": 2500.0,
        }
        for i, n in enumerate(gas_zones)
    ]
    instance = {
        "meta": {
            "name": "random-{}".format(seed),
            "base_year": years[0],
            "years": years,
            "discount_rate": 0.05,
            "storage_check_period_days": int(rng.choice([30, 61, 91])),
        },
        "power_zones": zones,
        "gas_zones": gas_zones,
        "areas": [{"id": "A1", "zones": zones}],
        "lines": lines,
        "pipelines": pipelines,
        "thermal_clusters": clusters,
        "hydro_plants": hydro,
        "batteries": batteries,
        "ptg": ptg,
        "renewables": renewables,
        "gas_zone_data": gas_zone_data,
        "policy": {
            "res_share": [{"area": "A1", "year": y, "share": 0.1 + 0.05 * i} for i, y in enumerate(years)],
            "co2_cap": [{"area": "A1", "year": years[-1], "cap": float(np.round(2000.0 * sum(peaks.values()), 0))}],
        },
        "penalties": {
            "overgeneration": 5.0,
            "energy_not_supplied": 3000.0,
            "reserve_not_supplied": 1000.0,
            "gas_curtailment": 3000.0,
        },
    }

    calendar_years = []
    for position, y in enumerate(years):
        day_map = np.where(rng.random(DAYS_PER_YEAR) < 0.6, "d1", "d2")
        day_map[0], day_map[1] = "d1", "d2"
        growth = 1.0 + 0.02 * position
        solar = np.clip(np.sin(np.pi * (np.arange(HOURS) - 6) / 12.0), 0.0, None)
        profiles = {
            "demand_power": {
                z: [(_shape(rng, 0.6 * peaks[z], peaks[z]) * growth * level).tolist() for level in (1.0, 0.85)]
                for z in zones
            },
            "demand_gas": {n: [_shape(rng, 10.0, 30.0).tolist() for _ in range(2)] for n in gas_zones},
            "solar": {z: [np.round(solar * 0.8, 3).tolist(), np.round(solar * 0.4, 3).tolist()] for z in zones},
            "wind": {z: [np.round(rng.uniform(0.1, 0.6, HOURS), 3).tolist() for _ in range(2)] for z in zones},
            "reserve": {z: _constant(round(0.05 * peaks[z], 2), 2) for z in zones},
        }
        if hydro:
            profiles["inflow"] = {"H1": _constant(8.0, 2)}
        calendar_years.append(
            {
                "year": y,
                "clusters": [
                    {"id": c, "weight": int(np.count_nonzero(day_map == c))} for c in ("d1", "d2")
                ],
                "day_map": day_map.tolist(),
                "profiles": profiles,
            }
        )
    calendar = {"years": calendar_years}

    probabilities = np.round(0.8 * rng.dirichlet(np.ones(n_scenarios)) + 0.2 / n_scenarios, 6)
    probabilities[-1] = 1.0 - probabilities[:-1].sum()
    scenario_list = []
    for s in range(n_scenarios):
        level = rng.uniform(0.6, 1.6)
        scenario_list.append(
            {
                "id": "S{}".format(s + 1),
                "probability": float(probabilities[s]),
                "co2": {str(y): float(np.round(50.0 * level * (1.0 + 0.1 * i), 3)) for i, y in enumerate(years)},
                "fuel": {"coal": _year_map(years, float(np.round(10.0 * rng.uniform(0.8, 1.2), 3)))},
                "gas_cost": {
                    n: _year_map(years, float(np.round(35.0 * level * rng.uniform(0.9, 1.1), 3))) for n in gas_zones
                },
            }
        )
    return instance, calendar, {"scenarios": scenario_list}


def random_toy(seed: int) -> Inputs:
    """Loaded version of ``random_documents``."""
    return from_documents(random_documents(seed))
