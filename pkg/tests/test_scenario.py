from __future__ import annotations

import copy
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from droneplan.errors import InfeasibleSiteError, ScenarioFormatError
from droneplan.model import PRESETS, CruiseState, cruise_energy_rate
from droneplan.scenario import (
    BatteryEnvelope,
    Location,
    Scenario,
    WindDomain,
    cost_matrix,
    dump_scenario,
    edge_cost,
    load_scenario,
    modified_distances,
    scenario_from_dict,
    scenario_to_dict,
    validate,
    worst_case_cf,
    worst_case_wind,
)

SOLO = PRESETS["3dr-solo"]


def line_scenario(site_x=1000.0, station_x=0.0, b_max=76.96, wind=WindDomain()) -> Scenario:
    return Scenario(
        locations=(
            Location("base", "base", 0.0, 0.0),
            Location("s0", "site", site_x, 0.0),
            Location("c0", "station", station_x, 0.0),
        ),
        battery=BatteryEnvelope(7.696, b_max, 0.95, 1.05),
        coeffs=SOLO,
        charge_seconds_per_wh=70.0,
        wind=wind,
        speed_options=(5.0,),
    )


def minimal_doc() -> dict:
    return {
        "locations": [
            {"id": "base", "kind": "base", "x_m": 0, "y_m": 0},
            {"id": "a", "kind": "site", "x_m": 500, "y_m": 0},
            {"id": "z", "kind": "station", "x_m": 0, "y_m": 200},
        ],
        "battery": {"b_min_wh": 5, "b_max_wh": 70},
        "drone": {"preset": "3dr-solo"},
        "speeds_mps": [5],
    }


def test_edge_cost_1km_solo():
    s = line_scenario()
    e = edge_cost(s, s.locations[0], s.locations[1], 5.0)
    assert e.d == 1000.0
    assert e.tau == 200.0
    assert e.energy == pytest.approx(23.68, abs=0.01)


def test_zero_length_edge_is_free():
    s = line_scenario(station_x=0.0)
    e = edge_cost(s, s.locations[0], s.locations[2], 5.0)
    assert (e.d, e.energy, e.c_f) == (0.0, 0.0, 0.0)
    cm = cost_matrix(s)
    assert cm.c_f[0, 2] == cm.c_f_hi
    assert cm.energy[0, 2] == 0.0


def test_cost_matrix_weights_symmetric_max():
    s = line_scenario(wind=WindDomain.fixed(4.0, 0.0))
    cm = cost_matrix(s)
    assert np.array_equal(cm.weight, cm.weight.T)
    assert cm.weight[0, 1] == max(cm.energy[0, 1], cm.energy[1, 0])
    assert cm.energy[0, 1] > cm.energy[1, 0]  # eastbound leg has the tailwind
    assert not cm.weight.flags.writeable


def _brute_cf(speed, heading, wind: WindDomain, n=721):
    best = -math.inf
    for spd in np.linspace(wind.speed_min, wind.speed_max, 9):
        for t in np.linspace(wind.theta_min, wind.theta_min + wind.span, n):
            w = (spd * math.cos(t), spd * math.sin(t))
            best = max(best, cruise_energy_rate(SOLO, CruiseState(speed, heading, w)))
    return best


@settings(max_examples=60, deadline=None)
@given(
    h=st.floats(0, 2 * math.pi),
    smin=st.floats(0, 6),
    extra=st.floats(0, 6),
    t1=st.floats(-2 * math.pi, 2 * math.pi),
    width=st.floats(0, 2 * math.pi),
)
def test_worst_case_cf_matches_grid_search(h, smin, extra, t1, width):
    wind = WindDomain(smin, smin + extra, t1, t1 + width)
    heading = (math.cos(h), math.sin(h))
    got = worst_case_cf(SOLO, 5.0, heading, wind, 0.0)
    grid = _brute_cf(5.0, heading, wind)
    assert got >= grid - 1e-9
    # the grid can miss the exact optimum by a fraction of a step
    assert got <= grid + 1.332 * (smin + extra) * (2 * math.pi / 720) ** 2


def test_worst_case_wind_on_domain():
    wind = WindDomain.from_degrees(1, 3, 350, 20)  # wraps through east
    wx, wy = worst_case_wind(SOLO, (1.0, 0.0), wind)
    assert (wx, wy) == pytest.approx((3.0, 0.0))
    wx, wy = worst_case_wind(SOLO, (-1.0, 0.0), wind)
    # heading west: the least-aligned wind is the weakest one at an end of the arc
    assert math.hypot(wx, wy) == pytest.approx(1.0)


def test_wind_domain_containment():
    outer = WindDomain.from_degrees(0, 5, -90, 90)
    assert outer.contains(WindDomain.from_degrees(1, 4, -30, 30))
    assert not outer.contains(WindDomain.from_degrees(1, 4, 60, 120))
    assert WindDomain(0, 5, 0, 2 * math.pi).contains(outer)
    with pytest.raises(ScenarioFormatError):
        WindDomain(3, 1, 0, 0)


def test_validate_alpha():
    s = line_scenario(site_x=1000.0)
    U = s.battery.usable_range
    dhat = modified_distances(s).dist
    assert validate(s) == pytest.approx(2 * dhat[1, 2] / U)


def test_validate_rejects_far_site():
    s = line_scenario(site_x=1500.0)
    with pytest.raises(InfeasibleSiteError) as info:
        validate(s)
    assert info.value.site == "s0"
    assert info.value.distance > info.value.limit


def test_validate_without_stations():
    locs = (Location("base", "base", 0, 0), Location("a", "site", 10, 0))
    s = Scenario(locs, BatteryEnvelope(0, math.inf), SOLO, 70.0)
    assert validate(s) == 0.0
    bounded = s.with_battery(BatteryEnvelope(0, 100))
    with pytest.raises(InfeasibleSiteError):
        validate(bounded)


def test_scenario_rules():
    base = Location("b", "base", 0, 0)
    with pytest.raises(ScenarioFormatError):
        Scenario((base, Location("b", "site", 1, 1)), BatteryEnvelope(0, 10), SOLO, 70)
    with pytest.raises(ScenarioFormatError):
        Scenario((Location("a", "site", 1, 1),), BatteryEnvelope(0, 10), SOLO, 70)
    with pytest.raises(ScenarioFormatError):
        Scenario((base,), BatteryEnvelope(0, 10), SOLO, 70, speed_options=(6.0, 5.0))
    with pytest.raises(ScenarioFormatError):
        BatteryEnvelope(0, 10, eta_c=1.2)
    with pytest.raises(ScenarioFormatError):
        Location("x", "depot", 0, 0)


def test_json_defaults_and_round_trip(tmp_path):
    s = scenario_from_dict(minimal_doc())
    assert s.charge_seconds_per_wh == pytest.approx(5400 / 76.96)
    assert s.battery.eta_c == 1.0
    path = tmp_path / "s.json"
    dump_scenario(s, path)
    assert load_scenario(path) == s


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.update(extra=1),
        lambda d: d["locations"][0].update(z_m=0),
        lambda d: d["battery"].pop("b_max_wh"),
        lambda d: d["drone"].update(preset="nope"),
        lambda d: d["drone"].update(coefficients=[1] * 9),
        lambda d: d.update(speeds_mps=[]),
        lambda d: d["locations"][1].update(x_m="far"),
        lambda d: d.update(wind={"speed_min": 0}),
        lambda d: d["battery"].update(b_min_wh=True),
    ],
)
def test_json_is_strict(mutate):
    doc = copy.deepcopy(minimal_doc())
    mutate(doc)
    with pytest.raises(ScenarioFormatError):
        scenario_from_dict(doc)


def test_json_custom_coefficients_need_charge_rate():
    doc = minimal_doc()
    doc["drone"] = {"coefficients": list(SOLO.beta)}
    with pytest.raises(ScenarioFormatError):
        scenario_from_dict(doc)
    doc["charge_seconds_per_wh"] = 60
    assert scenario_from_dict(doc).coeffs == SOLO


def test_load_rejects_invalid_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ScenarioFormatError):
        load_scenario(path)


def test_to_dict_uses_preset_name():
    doc = scenario_to_dict(scenario_from_dict(minimal_doc()))
    assert doc["drone"]["preset"] == "3dr-solo"
    json.dumps(doc)
