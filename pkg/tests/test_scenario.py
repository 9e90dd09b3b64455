"""Scenario file parsing: strict validation with field-level diagnostics."""

import cmath
import json

import numpy as np
import pytest

from pixelprobe.protocols import DefectTestConfig
from pixelprobe.scenario import ScenarioError, load_scenario, parse_scenario

GOOD = {
    "array": [0.8, [0.6, 0.2], {"mag": 0.5, "phase": 1.2}, 1],
    "defects": [{"index": 1, "new_value": [0.1, 0.0]}],
    "config": {
        "epsilon": 0.4,
        "delta": 0.1,
        "max_defects": 2,
        "cq": 2.0,
        "id_confirmations": 2,
        "calibration_error": 0.0,
    },
    "rare_search": {"prior_p": 0.3, "pattern": "array"},
}


def test_parse_complex_forms_and_sections():
    scenario = parse_scenario(GOOD)
    values = scenario.array.transparencies
    assert values[0] == 0.8
    assert values[1] == 0.6 + 0.2j
    assert values[2] == pytest.approx(0.5 * cmath.exp(1.2j))
    assert values[3] == 1.0
    assert scenario.defects == ((1, 0.1 + 0.0j),)
    actual = scenario.actual_array()
    assert actual.transparencies[1] == 0.1
    assert actual.transparencies[0] == 0.8

    config = scenario.defect_config()
    assert config == DefectTestConfig(
        epsilon=0.4,
        delta=0.1,
        max_defects=2,
        round_constant_cq=2.0,
        id_confirmations=2,
        calibration_error=0.0,
    )
    defects = scenario.defect_scenario(config)
    assert defects.defect_indices == frozenset({1})


def test_rare_config_uses_array_as_default_pattern():
    # the regime guard exp(-sqrt(n)) <= delta*p/10 needs a larger array
    scenario = parse_scenario(
        {
            "array": [0.8] * 64,
            "config": {"delta": 0.1},
            "rare_search": {"prior_p": 0.3, "pattern": "array"},
        }
    )
    rare = scenario.rare_config()
    assert rare.prior_p == 0.3
    assert np.array_equal(rare.pattern.transparencies, scenario.array.transparencies)

    explicit = parse_scenario(
        {
            "array": [0.8] * 64,
            "config": {"delta": 0.1},
            "rare_search": {"prior_p": 0.3, "pattern": [0.5] * 64},
        }
    )
    assert np.all(explicit.rare_config().pattern.transparencies == 0.5)


def test_config_defaults_apply():
    scenario = parse_scenario(
        {"array": [0.9, 0.9], "config": {"epsilon": 0.5, "delta": 0.2, "max_defects": 1}}
    )
    config = scenario.defect_config()
    assert config.round_constant_cq == 4.0
    assert config.id_confirmations == 1
    assert config.calibration_error == 0.0


def error_field(document):
    with pytest.raises(ScenarioError) as excinfo:
        parse_scenario(document)
    return excinfo.value.field


def test_unknown_keys_rejected_everywhere():
    assert error_field({"array": [1.0], "extra": 1}) == "scenario"
    assert error_field({"array": [1.0], "config": {"epsilonn": 0.1}}) == "config"
    assert (
        error_field({"array": [1.0], "defects": [{"index": 0, "new_value": 0.5, "x": 1}]})
        == "defects[0]"
    )
    assert (
        error_field({"array": [1.0], "rare_search": {"prior_p": 0.5, "wat": 1}})
        == "rare_search"
    )
    assert error_field({"array": [{"mag": 0.5, "phase": 0.0, "deg": 1}]}) == "array[0]"


def test_value_validation_diagnostics():
    assert error_field({"array": []}) == "array"
    assert error_field({"array": [1.4]}) == "array[0]"
    assert error_field({"array": [[1.0]]}) == "array[0]"
    assert error_field({"array": [{"mag": 0.5}]}) == "array[0]"
    assert error_field({"array": ["big"]}) == "array[0]"
    assert error_field({"array": [0.9], "config": {"epsilon": 3.0}}) == "config.epsilon"
    assert error_field({"array": [0.9], "config": {"delta": 0.0}}) == "config.delta"
    assert error_field({"array": [0.9], "config": {"max_defects": -1}}) == "config.max_defects"
    assert error_field({"array": [0.9], "config": {"max_defects": 1.5}}) == "config.max_defects"
    assert error_field({"array": [0.9], "config": {"cq": 0}}) == "config.cq"
    assert (
        error_field({"array": [0.9], "config": {"id_confirmations": 0}})
        == "config.id_confirmations"
    )
    assert (
        error_field({"array": [0.9], "config": {"calibration_error": -1}})
        == "config.calibration_error"
    )
    assert error_field({"array": [0.9], "defects": [{"index": 3, "new_value": 0.1}]}) == "defects[0].index"
    assert (
        error_field(
            {
                "array": [0.9, 0.9],
                "defects": [
                    {"index": 0, "new_value": 0.1},
                    {"index": 0, "new_value": 0.2},
                ],
            }
        )
        == "defects[1].index"
    )
    assert error_field({"array": [0.9], "rare_search": {}}) == "rare_search.prior_p"
    assert (
        error_field({"array": [0.9], "rare_search": {"prior_p": 1.0}})
        == "rare_search.prior_p"
    )
    assert (
        error_field({"array": [0.9], "rare_search": {"prior_p": 0.5, "pattern": [0.9, 0.9]}})
        == "rare_search.pattern"
    )
    assert (
        error_field({"array": [0.9], "rare_search": {"prior_p": 0.5, "pattern": "other"}})
        == "rare_search.pattern"
    )


def test_derived_builders_report_fields():
    scenario = parse_scenario({"array": [0.9, 0.9]})
    with pytest.raises(ScenarioError) as excinfo:
        scenario.defect_config()
    assert excinfo.value.field == "config.epsilon"
    with pytest.raises(ScenarioError) as excinfo:
        scenario.rare_config()
    assert excinfo.value.field == "rare_search"

    near_miss = parse_scenario(
        {
            "array": [0.9, 0.9],
            "defects": [{"index": 0, "new_value": 0.85}],
            "config": {"epsilon": 0.4, "delta": 0.1, "max_defects": 1},
        }
    )
    config = near_miss.defect_config()
    with pytest.raises(ScenarioError) as excinfo:
        near_miss.defect_scenario(config)
    assert excinfo.value.field == "defects[0]"

    too_many = parse_scenario(
        {
            "array": [0.9, 0.9],
            "defects": [
                {"index": 0, "new_value": 0.2},
                {"index": 1, "new_value": 0.2},
            ],
            "config": {"epsilon": 0.4, "delta": 0.1, "max_defects": 1},
        }
    )
    with pytest.raises(ScenarioError) as excinfo:
        too_many.defect_scenario(too_many.defect_config())
    assert excinfo.value.field == "defects"


def test_sweep_template_requires_single_defect():
    scenario = parse_scenario(GOOD)
    template = scenario.sweep_template()
    assert template.fill == 0.8
    assert template.defect == 0.1 + 0.0j
    no_defect = parse_scenario({"array": [0.9]})
    with pytest.raises(ScenarioError):
        no_defect.sweep_template()


def test_load_scenario_diagnostics(tmp_path):
    missing = tmp_path / "nope.json"
    with pytest.raises(ScenarioError) as excinfo:
        load_scenario(missing)
    assert str(missing) in str(excinfo.value)

    broken = tmp_path / "broken.json"
    broken.write_text('{"array": [0.9,]}')
    with pytest.raises(ScenarioError) as excinfo:
        load_scenario(broken)
    assert "line 1" in str(excinfo.value)

    good = tmp_path / "good.json"
    good.write_text(json.dumps(GOOD))
    scenario = load_scenario(good)
    assert scenario.array.n == 4
