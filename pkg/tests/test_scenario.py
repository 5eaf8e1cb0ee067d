import pytest

from fockfilter.errors import ScenarioError
from fockfilter.scenario import (
    grid_axis_values,
    load_scenario,
    parse_complex,
    scenario_from_dict,
)


def test_parse_complex_accepts_numbers_strings_and_records():
    assert parse_complex(0.5) == 0.5 + 0j
    assert parse_complex(2) == 2.0 + 0j
    assert parse_complex("0.5") == 0.5 + 0j
    assert parse_complex("0.5+0.25i") == 0.5 + 0.25j
    assert parse_complex("1-2j") == 1.0 - 2.0j
    assert parse_complex("-0.3i") == -0.3j
    assert parse_complex({"re": 1.5, "im": -0.5}) == 1.5 - 0.5j
    assert parse_complex({"re": 2.0}) == 2.0 + 0j


def test_parse_complex_rejects_junk():
    for bad in ("abc", "1+2", None, True, [1, 2], {"imag": 1}, "inf", float("nan")):
        with pytest.raises(ScenarioError):
            parse_complex(bad)


def test_scenario_from_dict_validates_fields():
    data = {"circuit": "filter", "parameters": {"alpha": 1.0, "beta": 0.0, "gamma": 0.0}}
    s = scenario_from_dict(data)
    assert s.circuit == "filter"
    assert s.heralds == "feedforward"
    assert s.grid is None

    with pytest.raises(ScenarioError):
        scenario_from_dict({"circuit": "laser", "parameters": {}})
    with pytest.raises(ScenarioError):
        scenario_from_dict({"circuit": "filter"})
    with pytest.raises(ScenarioError):
        scenario_from_dict({"circuit": "ghz", "parameters": {"n": 3}, "heralds": "maybe"})
    with pytest.raises(ScenarioError):
        scenario_from_dict({"circuit": "ghz", "parameters": {"n": 3}, "extra": 1})


def test_scenario_requires_circuit_parameters():
    with pytest.raises(ScenarioError):
        scenario_from_dict({"circuit": "projector", "parameters": {"c0": 1.0}})
    # swept parameters may be absent from the fixed set
    s = scenario_from_dict(
        {
            "circuit": "projector",
            "parameters": {"c1": 0, "c2": 0},
            "grid": {"c0": [0.5], "c3": [0.5]},
        }
    )
    assert s.grid == {"c0": [0.5], "c3": [0.5]}
    # the filter's beta may always be completed
    s2 = scenario_from_dict({"circuit": "filter", "parameters": {"alpha": 0.6, "gamma": 0.8}})
    assert "beta" not in s2.parameters


def test_load_scenario_reports_line_and_column(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "circuit": "filter",\n  oops\n}\n')
    with pytest.raises(ScenarioError) as excinfo:
        load_scenario(path)
    err = excinfo.value
    assert err.line == 3
    assert err.column is not None
    assert "line 3" in str(err)


def test_load_scenario_missing_file():
    with pytest.raises(ScenarioError):
        load_scenario("/no/such/file.json")


def test_grid_axis_values_list_and_range():
    assert grid_axis_values("a", [0.1, 0.2]) == [0.1, 0.2]
    vals = grid_axis_values("a", {"start": 0.0, "stop": 1.0, "count": 5})
    assert len(vals) == 5
    assert abs(vals[0] - 0.0) < 1e-15
    assert abs(vals[-1] - 1.0) < 1e-15
    assert abs(vals[2] - 0.5) < 1e-15
    assert grid_axis_values("a", {"start": 0.3, "stop": 0.9, "count": 1}) == [0.3]


def test_grid_axis_values_rejects_bad_specs():
    for bad in ([], ["x"], {"start": 0.0}, {"start": 0, "stop": 1, "count": 0}, "0..1", [True]):
        with pytest.raises(ScenarioError):
            grid_axis_values("a", bad)
