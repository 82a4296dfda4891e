"""Scenario config parsing, validation, overrides, bundled defaults."""

import pytest

from uavchain.config import (ConfigError, ScenarioConfig, apply_override,
                             config_to_flat_dict, default_scenario_path,
                             known_keys, load_config)


def test_defaults_validate():
    ScenarioConfig().validate()


def test_area_side_from_area():
    cfg = ScenarioConfig()
    cfg.network.area_km2 = 10.0
    assert cfg.area_side_m() == pytest.approx(3162.2776, rel=1e-6)


def test_apply_override_parses_strings():
    cfg = ScenarioConfig()
    apply_override(cfg, "network.uav_count", "40")
    apply_override(cfg, "sim.duration_s", "120.5")
    apply_override(cfg, "ledger.codec", "none")
    assert cfg.network.uav_count == 40
    assert cfg.sim.duration_s == 120.5
    assert cfg.ledger.codec == "none"


def test_apply_override_unknown_key_is_hard_error():
    cfg = ScenarioConfig()
    with pytest.raises(ConfigError):
        apply_override(cfg, "network.uav_cout", "40")
    with pytest.raises(ConfigError):
        apply_override(cfg, "nonsense", "1")


def test_apply_override_type_mismatch():
    cfg = ScenarioConfig()
    with pytest.raises(ConfigError):
        apply_override(cfg, "network.uav_count", "forty")
    with pytest.raises(ConfigError):
        apply_override(cfg, "ledger.codec", 3)


def test_trust_lambda_alias():
    cfg = ScenarioConfig()
    apply_override(cfg, "trust.lambda", "0.9")
    assert cfg.trust.smoothing == 0.9
    assert "trust.lambda" in known_keys()
    assert "trust.smoothing" not in known_keys()
    assert "trust.lambda" in config_to_flat_dict(cfg)


def test_load_config_file(tmp_path):
    path = tmp_path / "case.scenario"
    path.write_text(
        "# comment line\n"
        "\n"
        "network.uav_count = 25   # trailing comment\n"
        "trust.lambda = 0.7\n")
    cfg = load_config(path)
    assert cfg.network.uav_count == 25
    assert cfg.trust.smoothing == 0.7


def test_load_config_rejects_malformed_line(tmp_path):
    path = tmp_path / "bad.scenario"
    path.write_text("just words\n")
    with pytest.raises(ConfigError):
        load_config(path)


def test_load_config_applies_overrides(tmp_path):
    path = tmp_path / "case.scenario"
    path.write_text("network.uav_count = 25\n")
    cfg = load_config(path, overrides={"network.uav_count": 30})
    assert cfg.network.uav_count == 30


@pytest.mark.parametrize("key,value", [
    ("sim.duration_s", -1.0),
    ("network.uav_count", 0),
    ("trust.lambda", 1.0),
    ("trust.weight_valid", 0.9),
    ("consensus.committee_size", 99),
    ("consensus.tau_max_s", 0.0),
    ("ledger.codec", "bzip17"),
    ("ledger.replication", 10),
    ("workload.compromised_fraction", 1.0),
    ("workload.behaviors", "forge-signature,unknown"),
    ("crypto.scheme", "rsa-2048"),
])
def test_validate_rejects_bad_values(key, value):
    cfg = ScenarioConfig()
    apply_override(cfg, key, value)
    with pytest.raises(ConfigError):
        cfg.validate()


def test_bundled_default_scenario_matches_code_defaults():
    path = default_scenario_path()
    assert path.is_file()
    cfg = load_config(path)
    assert config_to_flat_dict(cfg) == config_to_flat_dict(ScenarioConfig())


def test_flat_dict_round_trips_through_overrides():
    cfg = ScenarioConfig()
    cfg.network.uav_count = 33
    flat = config_to_flat_dict(cfg)
    rebuilt = ScenarioConfig()
    for key, value in flat.items():
        apply_override(rebuilt, key, value)
    assert config_to_flat_dict(rebuilt) == flat
