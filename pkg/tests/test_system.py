# -*- coding: utf-8 -*-
"""Tests for the system model and its file format."""
import copy
import json

import graphviz
import pytest

from pygtep.exceptions import InstanceReferenceError, ParseError, SchemaError
from pygtep.system import instance_from_document, load_instance, save_instance
from pygtep.toys import bundled_paths, random_documents, tiny_documents


def _tiny_instance_document(**kwargs):
    return copy.deepcopy(tiny_documents(**kwargs)[0])


class TestBundledInstance:
    """Test the content of the bundled toy."""

    @classmethod
    def setup_class(cls):
        """Set the test up."""
        with open(bundled_paths()["instance"], "rb") as f:
            cls.instance = load_instance(f.read())

    def test_sets(self):
        """Test the declared sets."""
        assert self.instance.years == (2030, 2031)
        assert self.instance.power_zones == ("NORTH", "SOUTH")
        assert self.instance.gas_zones == ("GAS",)
        assert [line.id for line in self.instance.candidate_lines] == ["NS2"]
        assert self.instance.candidate_pipelines == ()

    def test_clusters(self):
        """Test the thermal clusters."""
        ccgt, coal = self.instance.thermal_clusters
        assert ccgt.is_gas_fired and ccgt.gas_zone == "GAS"
        assert not coal.is_gas_fired and coal.gas_zone is None
        assert coal.heat_rate == 2.937

    def test_lookups(self):
        """Test the zone lookups."""
        assert self.instance.area_of("SOUTH") == "IT"
        assert self.instance.area_of("GAS") is None
        assert self.instance.gas_data("GAS") is not None
        assert self.instance.renewable("NOWHERE") is None
        assert [h.id for h in self.instance.programmable_hydro] == ["RES1"]

    def test_round_trip(self):
        """Test that saving and loading gives the same instance."""
        assert load_instance(save_instance(self.instance)) == self.instance

    def test_saved_document_is_canonical(self):
        """Test that keys are sorted."""
        document = json.loads(save_instance(self.instance).decode("utf-8"))
        assert list(document) == sorted(document)
        assert document["meta"]["units"] == {"power": "MW", "capacity_cost": "per_MW"}

    def test_graphviz(self):
        """Test the network picture."""
        graph = self.instance.to_graphviz()
        assert isinstance(graph, graphviz.Digraph)
        source = graph.source
        assert "P_NORTH" in source and "G_GAS" in source
        assert "dashed" in source
        assert "dotted" in source


class TestRandomInstances:
    """Test that generated instances load and round-trip."""

    @pytest.mark.parametrize("seed", range(5))
    def test_round_trip(self, seed):
        """Test load after save."""
        instance = instance_from_document(random_documents(seed)[0])
        assert load_instance(save_instance(instance)) == instance


class TestUnits:
    """Test the unit declarations."""

    def test_gigawatts(self):
        """Test that power fields are scaled."""
        document = _tiny_instance_document(units=1)
        document["meta"]["units"] = {"power": "GW"}
        cluster = instance_from_document(document).thermal_clusters[0]
        assert cluster.p_max == 50000.0
        assert cluster.invest_cost[2030] == 100000.0

    def test_cost_per_kilowatt(self):
        """Test that capacity costs are scaled."""
        document = _tiny_instance_document(units=1)
        document["meta"]["units"] = {"capacity_cost": "per_kW"}
        cluster = instance_from_document(document).thermal_clusters[0]
        assert cluster.invest_cost[2030] == 1e8
        assert cluster.p_max == 50.0

    def test_unknown_unit(self):
        """Test that unknown units are refused."""
        document = _tiny_instance_document()
        document["meta"]["units"] = {"power": "TW"}
        with pytest.raises(SchemaError, match="unknown unit 'TW'"):
            instance_from_document(document)


class TestLoadingErrors:
    """Test the error classes of the loader."""

    def test_not_json(self):
        """Test a malformed file."""
        with pytest.raises(ParseError, match="Malformed document"):
            load_instance(b"{not json")

    def test_missing_field(self):
        """Test a missing required field."""
        document = _tiny_instance_document()
        del document["penalties"]
        with pytest.raises(SchemaError, match="instance: missing field 'penalties'"):
            instance_from_document(document)

    def test_wrong_type(self):
        """Test a string where a number is expected."""
        document = _tiny_instance_document(units=1)
        document["thermal_clusters"][0]["p_max"] = "fifty"
        with pytest.raises(SchemaError, match=r"thermal_clusters\[0\]\.p_max: expected a number"):
            instance_from_document(document)

    def test_years_not_consecutive(self):
        """Test the year sequence."""
        document = _tiny_instance_document()
        document["meta"]["years"] = [2030, 2032]
        with pytest.raises(SchemaError, match="years must be consecutive"):
            instance_from_document(document)

    def test_storage_period_out_of_range(self):
        """Test the checkpoint period."""
        document = _tiny_instance_document()
        document["meta"]["storage_check_period_days"] = 400
        with pytest.raises(SchemaError, match="between 1 and 365 days"):
            instance_from_document(document)

    def test_negative_discount_rate(self):
        """Test the discount rate."""
        document = _tiny_instance_document()
        document["meta"]["discount_rate"] = -0.01
        with pytest.raises(SchemaError, match="discount rate must be nonnegative"):
            instance_from_document(document)

    def test_undeclared_zone(self):
        """Test a reference to an unknown zone."""
        document = _tiny_instance_document(units=1)
        document["thermal_clusters"][0]["zone"] = "Z9"
        with pytest.raises(InstanceReferenceError, match="cluster K1 refers to undeclared zone 'Z9'"):
            instance_from_document(document)

    def test_undeclared_area(self):
        """Test a policy on an unknown area."""
        document = _tiny_instance_document()
        document["policy"] = {"co2_cap": [{"area": "A9", "year": 2030, "cap": 1.0}]}
        with pytest.raises(InstanceReferenceError, match="undeclared area 'A9'"):
            instance_from_document(document)
