"""Config schema, YAML loading, and assembly into game objects."""

import numpy as np
import pytest
import yaml
from pydantic import ValidationError

from auditgame.config import (
    GridRange,
    RunConfig,
    build_instance,
    build_mechanism,
    developer_weights,
    format_validation_error,
    lambda_values,
    load_config,
    ratio_values,
)
from auditgame.errors import ParameterError

from conftest import CONFIG_DIR

MINIMAL = {
    "budgets": {"grid": [0.5, 1.0, 2.0]},
    "auditor": {"penalty_miss": -1.0, "penalty_false_alarm": -1.0},
}


def test_shipped_configs_all_load():
    for name in ("default", "oracle", "lambda-sweep", "ratio-sweep", "general-utility"):
        cfg = load_config(CONFIG_DIR / f"{name}.yaml")
        assert isinstance(cfg, RunConfig)


def test_minimal_config_fills_defaults():
    cfg = RunConfig.model_validate(MINIMAL)
    assert cfg.mechanism.kind == "discretized-laplace"
    assert cfg.auditor.lam == 1.0
    assert cfg.developer.beta == 1.0
    assert cfg.run.mode == "leader-enumeration"


def test_lambda_accepts_both_spellings():
    by_alias = RunConfig.model_validate(
        {**MINIMAL, "auditor": {**MINIMAL["auditor"], "lambda": 0.3}}
    )
    by_name = RunConfig.model_validate(
        {**MINIMAL, "auditor": {**MINIMAL["auditor"], "lam": 0.3}}
    )
    assert by_alias.auditor.lam == by_name.auditor.lam == 0.3


def test_grid_range_expansion_hits_endpoint():
    values = GridRange(start=0.05, stop=5.0, step=0.05).values()
    assert len(values) == 100
    assert values[0] == 0.05
    assert values[-1] == 5.0
    assert values[4] == 0.25


def test_unknown_key_errors_name_the_path():
    with pytest.raises(ValidationError) as exc:
        RunConfig.model_validate({**MINIMAL, "auditor": {**MINIMAL["auditor"], "typo": 1}})
    assert "auditor.typo" in format_validation_error(exc.value)


def test_positive_penalty_errors_name_the_field():
    with pytest.raises(ValidationError) as exc:
        RunConfig.model_validate(
            {**MINIMAL, "auditor": {"penalty_miss": 1.0, "penalty_false_alarm": -1.0}}
        )
    msg = format_validation_error(exc.value)
    assert "auditor.penalty_miss" in msg


def test_utility_section_ordering_enforced():
    bad = {
        **MINIMAL,
        "auditor": {
            **MINIMAL["auditor"],
            "utility": {"good_clear": -1.0, "good_flag": 0.0, "bad_clear": -1.0, "bad_flag": 0.0},
        },
    }
    with pytest.raises(ValidationError) as exc:
        RunConfig.model_validate(bad)
    assert "auditor.utility" in format_validation_error(exc.value)


def test_default_range_spans_eight_scales():
    cfg = RunConfig.model_validate(MINIMAL)
    _mech, space = build_mechanism(cfg)
    assert space.bin_edges[0] == -16.0
    assert space.bin_edges[-1] == 16.0


def test_table_csv_resolves_against_config_dir(tmp_path):
    (tmp_path / "mech.csv").write_text("cold,hot\n0.75,0.25\n0.25,0.75\n")
    data = {
        **MINIMAL,
        "budgets": {"grid": [0.5, 1.0]},
        "mechanism": {"kind": "explicit-table", "table_csv": "mech.csv"},
    }
    cfg = RunConfig.model_validate(data)
    mech, space = build_mechanism(cfg, tmp_path)
    assert space.labels == ("cold", "hot")
    assert np.allclose(mech.table, [[0.75, 0.25], [0.25, 0.75]])

    instance, _space, _mech = build_instance(cfg, tmp_path)
    assert instance.p.shape == (2, 2)


def test_table_and_csv_are_mutually_exclusive():
    data = {
        **MINIMAL,
        "mechanism": {
            "kind": "explicit-table",
            "table": [[0.5, 0.5]],
            "table_csv": "x.csv",
        },
    }
    with pytest.raises(ValidationError, match="exactly one"):
        RunConfig.model_validate(data)


def test_developer_weights_default_to_uniform_deviations():
    cfg = RunConfig.model_validate(MINIMAL)
    instance, _space, _mech = build_instance(cfg)
    weights = developer_weights(cfg, instance.grid)
    assert np.allclose(weights, [0.0, 0.5, 0.5])


def test_developer_weights_length_is_checked():
    cfg = RunConfig.model_validate(
        {**MINIMAL, "developer": {"weights": [0.0, 1.0]}}
    )
    instance, _space, _mech = build_instance(cfg)
    with pytest.raises(ParameterError, match="expected 3 entries"):
        developer_weights(cfg, instance.grid)


def test_sweep_value_extraction_errors():
    cfg = RunConfig.model_validate(MINIMAL)
    with pytest.raises(ParameterError, match="lambda_grid"):
        lambda_values(cfg)
    with pytest.raises(ParameterError, match="run.sweep"):
        ratio_values(cfg)


def test_non_mapping_yaml_is_rejected(tmp_path):
    path = tmp_path / "list.yaml"
    path.write_text(yaml.safe_dump([1, 2, 3]))
    with pytest.raises(ParameterError, match="mapping"):
        load_config(path)
