import pytest

from config import config
from config.run_config import (VARIANTS, deep_merge, display_name, get_enabled_variants, load_data_spec,
                               load_run_config, resolve_run_config)
from core.errors import ConfigError
from models.configs import Variant


def test_defaults_validate():
    assert config.validate_config() is True


@pytest.mark.parametrize("name,value", [
    ("MORPHGRAD_THREADS", "0"),
    ("MORPHGRAD_LOG_LEVEL", "CHATTY"),
    ("MORPHGRAD_DEFAULT_SEED", "-3"),
])
def test_invalid_environment_is_reported_not_raised(monkeypatch, name, value):
    monkeypatch.setattr(config, name, value)
    assert config.validate_config() is False


@pytest.mark.parametrize("value,expected", [("3", 3), ("0", 1), ("many", 1)])
def test_thread_count(monkeypatch, value, expected):
    monkeypatch.setattr(config, "MORPHGRAD_THREADS", value)
    assert config.thread_count() == expected


def test_log_level_falls_back_to_info(monkeypatch):
    monkeypatch.setattr(config, "MORPHGRAD_LOG_LEVEL", "LOUD")
    assert config.log_level() == "INFO"


def test_variant_registry():
    assert len(get_enabled_variants()) == 5
    assert [entry["variant"] for entry in VARIANTS.values()] == list(Variant)
    assert display_name(Variant.CHM_SKIP) == "CHM Block + skip"


def test_disabled_variant_is_skipped(monkeypatch):
    monkeypatch.setitem(VARIANTS, "chm", {**VARIANTS["chm"], "enabled": False})
    assert "chm" not in get_enabled_variants()


def test_deep_merge_leaves_base_untouched():
    base = {"network": {"depth": 3, "window": [3, 3, 3]}}
    merged = deep_merge(base, {"network": {"depth": 2}})
    assert merged == {"network": {"depth": 2, "window": [3, 3, 3]}}
    assert base["network"]["depth"] == 3


def test_run_config_overrides():
    network, train = resolve_run_config({"train": {"folds": 3}}, variant="nonlearnable-skip", seed=9)
    assert network.variant is Variant.NON_LEARNABLE_SKIP
    assert train.folds == 3
    assert train.seed == 9 and train.split_seed == 9


def test_unknown_section_is_rejected():
    with pytest.raises(ConfigError):
        resolve_run_config({"optimizer": {}})


def test_unknown_key_is_rejected():
    with pytest.raises(ConfigError):
        resolve_run_config({"network": {"width": 3}})


def test_config_files(tmp_path):
    path = tmp_path / "run.json"
    path.write_text('{"network": {"depth": 2}}')
    network, _ = load_run_config(str(path), variant="chm")
    assert network.depth == 2 and network.variant is Variant.CHM

    spec_path = tmp_path / "spec.json"
    spec_path.write_text('{"num_samples": 2}')
    spec = load_data_spec(str(spec_path))
    assert spec.num_samples == 2 and spec.extent == (32, 32, 32)

    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ConfigError):
        load_run_config(str(broken))
    with pytest.raises(ConfigError):
        load_run_config(str(tmp_path / "absent.json"))
