# -*- coding: utf-8 -*-
"""Tests for representative days, checkpoints and scenarios."""
import copy

import numpy as np
import pytest
from hypothesis import given
from hypothesis.strategies import integers

from pygtep.calendars import (
    DAYS_PER_YEAR,
    Scenario,
    ScenarioSet,
    calendar_from_document,
    expand_checkpoints,
    load_calendar,
    load_scenarios,
    mean_value_scenario,
    save_calendar,
    save_scenarios,
)
from pygtep.exceptions import MissingPriceError, ParseError, SchemaError
from pygtep.toys import bundled_paths, random_documents

from .strategies import price_paths


class TestExpandCheckpoints:
    """Test the checkpoint segments."""

    @classmethod
    def setup_class(cls):
        """Set the test up."""
        with open(bundled_paths()["calendar"], "rb") as f:
            cls.calendar = load_calendar(f.read())

    def test_weekly(self):
        """Test weekly checks: 52 segments and a one-day tail."""
        chain = expand_checkpoints(self.calendar, 7)
        assert chain.xi_bar == 52
        assert (chain.segments[0].first_day, chain.segments[0].last_day) == (1, 7)
        assert (chain.segments[-1].first_day, chain.segments[-1].last_day) == (358, 364)
        assert (chain.tail.first_day, chain.tail.last_day) == (365, 365)

    def test_yearly(self):
        """Test a single check at the end of the year."""
        chain = expand_checkpoints(self.calendar, 365)
        assert chain.xi_bar == 1
        assert chain.tail is None

    def test_daily(self):
        """Test daily checks."""
        chain = expand_checkpoints(self.calendar, 1)
        assert chain.xi_bar == DAYS_PER_YEAR
        assert all(s.days == 1 for s in chain.segments)

    @given(integers(min_value=1, max_value=DAYS_PER_YEAR))
    def test_segments_cover_the_year(self, period):
        """Test that segments and tail partition the days."""
        chain = expand_checkpoints(self.calendar, period)
        segments = list(chain.segments) + ([chain.tail] if chain.tail is not None else [])
        assert sum(s.days for s in segments) == DAYS_PER_YEAR
        for before, after in zip(segments, segments[1:]):
            assert after.first_day == before.last_day + 1
        assert chain.xi_bar == DAYS_PER_YEAR // period

    def test_cluster_days(self):
        """Test the day counts of a segment."""
        segment = expand_checkpoints(self.calendar, 30).segments[0]
        assert segment.cluster_days(self.calendar[2030]) == {"d1": 30}
        assert segment.cluster_hours(self.calendar[2030]) == {"d1": 720}

    @pytest.mark.parametrize("period", [0, 366])
    def test_period_out_of_range(self, period):
        """Test the period bounds."""
        with pytest.raises(ValueError, match="Checkpoint period must be between 1 and 365"):
            expand_checkpoints(self.calendar, period)


class TestCalendarFiles:
    """Test reading and writing calendars."""

    @classmethod
    def setup_class(cls):
        """Set the test up."""
        cls.document = random_documents(3)[1]

    def test_round_trip(self):
        """Test that saving and loading gives the same calendar."""
        calendar = calendar_from_document(self.document)
        assert load_calendar(save_calendar(calendar)) == calendar

    def test_missing_profile_is_zero(self):
        """Test the default profile."""
        calendar = calendar_from_document(self.document)
        year = calendar[2030]
        assert np.array_equal(year.profile("inflow", "NOPE"), np.zeros((2, 24)))

    def test_short_day_map(self):
        """Test that the day map covers the year."""
        document = copy.deepcopy(self.document)
        document["years"][0]["day_map"] = ["d1"] * 364
        with pytest.raises(SchemaError, match="expected 365 entries, found 364"):
            calendar_from_document(document)

    def test_unknown_profile(self):
        """Test that profile kinds are checked."""
        document = copy.deepcopy(self.document)
        document["years"][0]["profiles"]["tide"] = {}
        with pytest.raises(SchemaError, match="unknown profile 'tide'"):
            calendar_from_document(document)

    def test_gigawatt_profiles(self):
        """Test that power profiles are scaled and capacity factors are not."""
        document = copy.deepcopy(self.document)
        document["units"] = {"power": "GW"}
        scaled = calendar_from_document(document)[2030]
        plain = calendar_from_document(self.document)[2030]
        zone = sorted(plain.profiles["demand_power"])[0]
        assert np.allclose(scaled.profile("demand_power", zone), 1000.0 * plain.profile("demand_power", zone))
        assert np.array_equal(scaled.profile("solar", zone), plain.profile("solar", zone))

    def test_not_json(self):
        """Test a malformed file."""
        with pytest.raises(ParseError):
            load_calendar(b"[1, 2")


class TestScenarios:
    """Test scenario sets and the mean-value scenario."""

    @classmethod
    def setup_class(cls):
        """Set the test up."""
        with open(bundled_paths()["scenarios"], "rb") as f:
            cls.scenarios = load_scenarios(f.read())

    def test_ids(self):
        """Test the identifiers and lookup."""
        assert self.scenarios.ids == ("LC", "HC")
        assert self.scenarios["HC"].co2_price(2031) == 120.0
        with pytest.raises(KeyError):
            self.scenarios["MID"]

    def test_round_trip(self):
        """Test that saving and loading gives the same scenarios."""
        assert load_scenarios(save_scenarios(self.scenarios)) == self.scenarios

    def test_missing_prices(self):
        """Test the errors of the price getters."""
        scenario = self.scenarios["LC"]
        with pytest.raises(MissingPriceError, match="no CO2 price for year 2040"):
            scenario.co2_price(2040)
        with pytest.raises(MissingPriceError, match="no price of fuel oil"):
            scenario.fuel_price("oil", 2030)
        with pytest.raises(MissingPriceError, match="no gas cost for zone NOWHERE"):
            scenario.gas_price("NOWHERE", 2030)

    def test_mean(self):
        """Test the expected prices."""
        mean = mean_value_scenario(self.scenarios)
        assert mean.ids == ("MEAN",)
        scenario = mean.scenarios[0]
        assert scenario.probability == 1.0
        assert scenario.co2_price(2030) == pytest.approx(60.0)
        assert scenario.fuel_price("coal", 2031) == pytest.approx(11.8)
        assert scenario.gas_price("GAS", 2031) == pytest.approx(41.0)

    def test_mean_of_one(self):
        """Test that a single scenario is its own mean."""
        single = ScenarioSet((self.scenarios["LC"],))
        assert mean_value_scenario(single) is single

    def test_mean_keeps_common_keys(self):
        """Test that prices missing from some scenario are dropped."""
        a = Scenario("A", 0.5, {2030: 10.0, 2031: 20.0}, fuel={"oil": {2030: 1.0}})
        b = Scenario("B", 0.5, {2030: 30.0})
        mean = mean_value_scenario(ScenarioSet((a, b))).scenarios[0]
        assert dict(mean.co2) == {2030: 20.0}
        assert dict(mean.fuel) == {}

    @given(price_paths(), price_paths())
    def test_mean_lies_between(self, first, second):
        """Test that every mean price lies between the scenario prices."""
        scenarios = ScenarioSet((Scenario("A", 0.25, first), Scenario("B", 0.75, second)))
        mean = mean_value_scenario(scenarios).scenarios[0]
        for year, value in mean.co2.items():
            low, high = sorted((first[year], second[year]))
            assert low - 1e-9 <= value <= high + 1e-9

    def test_no_scenarios(self):
        """Test that a scenario file cannot be empty."""
        with pytest.raises(SchemaError, match="at least one scenario"):
            load_scenarios(b'{"scenarios": []}')
