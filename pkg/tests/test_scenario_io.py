import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from refdriver.generator import CutinParams, generate
from refdriver.scenario import (FORMAT_VERSION, InvariantViolation, ParseError, dumps_scenario,
                                loads_scenario, read_scenario, scenario_from_dict,
                                scenario_to_dict, validate_scenario, write_scenario)


def random_params(rng, i):
    ego = rng.uniform(15, 35)
    return CutinParams(ego, ego - rng.uniform(1, 12), rng.uniform(2, 40), rng.uniform(0.2, 2.0),
                       lane_change_start=rng.uniform(0, 3), lane_width=rng.uniform(3.0, 3.8),
                       duration=rng.uniform(2, 10), sample_dt=rng.choice([0.05, 0.1, 0.2]),
                       human_brake_decel=rng.uniform(0, 6), seed=i,
                       pov_side=rng.choice(["left", "right"]), scenario_id=f"r{i}")


def test_round_trip_100(tmp_path):
    rng = np.random.default_rng(99)
    for i in range(100):
        s = generate(random_params(rng, i))
        path = tmp_path / f"{i}.json"
        write_scenario(s, path)
        back = read_scenario(path)
        assert back == s
        for a, b in zip(back.pov_traj, s.pov_traj):
            assert a == b


def test_byte_determinism():
    p = CutinParams(25, 17, 15, 0.8, seed=3)
    assert dumps_scenario(generate(p)) == dumps_scenario(generate(p))


def test_file_layout():
    d = json.loads(dumps_scenario(generate(CutinParams(25, 17, 15, 0.8))))
    assert d["format_version"] == FORMAT_VERSION
    for key in ("id", "lane", "ego_geom", "pov_geom", "ego_traj", "pov_traj"):
        assert key in d
    assert set(d["lane"]) == {"lane_width", "pov_side", "ego_lane_center_y", "marking_y"}
    assert set(d["ego_traj"][0]) == {"t", "x", "y", "speed", "accel", "heading"}


def base_dict():
    return scenario_to_dict(generate(CutinParams(25, 17, 15, 0.8)))


def test_decreasing_time_rejected():
    d = base_dict()
    d["ego_traj"][3]["t"], d["ego_traj"][4]["t"] = d["ego_traj"][4]["t"], d["ego_traj"][3]["t"]
    with pytest.raises(InvariantViolation, match="t strictly increasing"):
        scenario_from_dict(d)


def test_unknown_version():
    d = base_dict()
    d["format_version"] = "9.9"
    with pytest.raises(ParseError, match="format_version"):
        scenario_from_dict(d)


@pytest.mark.parametrize("mutate, needle", [
    (lambda d: d.pop("pov_traj"), "pov_traj"),
    (lambda d: d["ego_traj"][2].pop("speed"), "ego_traj"),
    (lambda d: d["ego_geom"].update(length="long"), "ego_geom"),
])
def test_field_diagnostics(mutate, needle):
    d = base_dict()
    mutate(d)
    with pytest.raises(ParseError, match=needle):
        scenario_from_dict(d)


def test_malformed_json_reports_line():
    with pytest.raises(ParseError, match="line"):
        loads_scenario('{"format_version": "1.0",\n "id": }')


@pytest.mark.parametrize("mutate, needle", [
    (lambda d: d["pov_traj"][5].update(speed=-1.0), "speed >= 0"),
    (lambda d: d["ego_traj"].__delitem__(slice(5, 9)), "spacing"),
    (lambda d: [s.update(y=1.0) for s in d["pov_traj"]], "POV initially clear"),
])
def test_invariants(mutate, needle):
    d = base_dict()
    mutate(d)
    with pytest.raises(InvariantViolation, match=needle):
        scenario_from_dict(d)


@given(st.floats(15, 35), st.floats(0.5, 10), st.floats(1, 40), st.floats(0.2, 2.0),
       st.integers(0, 2 ** 31))
@settings(max_examples=40, deadline=None)
def test_round_trip_property(ego, delta, gap, lat, seed):
    s = generate(CutinParams(ego, ego - delta, gap, lat, seed=seed))
    assert loads_scenario(dumps_scenario(s)) == s
    assert validate_scenario(s) is s
