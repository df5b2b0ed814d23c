"""
Tests du gestionnaire de configuration : fichier, environnement et validation.
"""

import json
import os

import pytest

from src.utils.config_manager import ConfigManager
from src.utils.constants import DEFAULT_K_CAP, DEFAULT_SEED
from src.utils.enums import CountMode, ExperimentKind
from src.utils.errors import ConfigError


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for key in list(os.environ):
        if key.startswith(ConfigManager.ENV_PREFIX):
            monkeypatch.delenv(key)


def write_config(tmp_path, data, name="config.json"):
    path = tmp_path / name
    path.write_text(data if isinstance(data, str) else json.dumps(data), encoding="utf-8")
    return str(path)


def test_defaults_when_file_missing(tmp_path):
    config = ConfigManager(str(tmp_path / "absent.json"))
    assert config.seed == DEFAULT_SEED
    assert config.k_cap == DEFAULT_K_CAP
    assert config.workers == 1
    assert config.log_level == "INFO"
    assert config.campaigns == {}
    assert not config.load_config()


def test_file_values(tmp_path):
    path = write_config(tmp_path, {
        "seed": 42,
        "workers": 3,
        "tail_epsilon": 1e-12,
        "log_level": "debug",
        "campaigns": {
            "heights": {"kind": "heights", "dist": "full-binary", "n": 1001, "r": 2, "mode": ["fringe", "nonfringe"]},
            "chains": {"kind": "poisson", "dist": "plane", "n": [101, 1001], "pattern": "chain:3", "replicates": 50},
        },
    })
    config = ConfigManager(path)
    assert config.seed == 42 and config.workers == 3
    assert config.tail_epsilon == 1e-12
    assert config.log_level == "DEBUG"

    heights = config.get_campaign("heights")
    assert heights.kind is ExperimentKind.HEIGHTS
    assert heights.n_values == [1001]
    assert heights.modes == [CountMode.FRINGE, CountMode.NONFRINGE]
    assert heights.replicates == 100

    chains = config.get_campaign("chains")
    assert chains.pattern == "chain:3" and chains.n_values == [101, 1001]
    with pytest.raises(ConfigError):
        config.get_campaign("absent")


def test_environment_overrides_file(tmp_path, monkeypatch):
    path = write_config(tmp_path, {"seed": 42, "k_cap": 10})
    monkeypatch.setenv("GWFOREST_SEED", "7")
    monkeypatch.setenv("GWFOREST_OUTPUT_DIR", str(tmp_path / "out"))
    config = ConfigManager(path)
    assert config.seed == 7
    assert config.k_cap == 10
    assert config.output_dir == str(tmp_path / "out")
    assert ConfigManager(path, use_env=False).seed == 42


def test_update_ignores_none(tmp_path):
    config = ConfigManager(str(tmp_path / "absent.json"))
    config.update({"seed": None, "workers": 2})
    assert config.seed == DEFAULT_SEED and config.workers == 2


@pytest.mark.parametrize(
    "values",
    [
        {"workers": 0},
        {"workers": 1.5},
        {"workers": "many"},
        {"seed": -1},
        {"max_rejections": 0},
        {"tail_epsilon": 0.5},
        {"tail_epsilon": "tiny"},
        {"k_cap": 0},
        {"k_cap": 10_000},
        {"log_level": "LOUD"},
    ],
)
def test_invalid_values_are_rejected(tmp_path, values):
    config = ConfigManager(str(tmp_path / "absent.json"))
    with pytest.raises(ConfigError):
        config.update(values)


def test_invalid_file_value_is_not_clamped(tmp_path):
    with pytest.raises(ConfigError):
        ConfigManager(write_config(tmp_path, {"workers": 1000}))


@pytest.mark.parametrize("content", ["{ not json", "[1, 2, 3]"])
def test_corrupt_file(tmp_path, content):
    with pytest.raises(ConfigError):
        ConfigManager(write_config(tmp_path, content))


@pytest.mark.parametrize(
    "campaign",
    [
        {"dist": "plane", "n": 11},
        {"kind": "spectral", "dist": "plane", "n": 11},
        {"kind": "poisson", "dist": "plane", "n": 11},
        {"kind": "heights", "dist": "plane", "n": 11},
        {"kind": "heights", "dist": "plane", "n": 11, "r": 2, "mode": "sideways"},
        {"kind": "kn", "n": 11},
        {"kind": "kn", "dist": "plane", "n": [11, 0]},
        {"kind": "kn", "dist": "plane", "n": 11, "replicates": 0},
        "kn",
    ],
)
def test_invalid_campaigns(tmp_path, campaign):
    with pytest.raises(ConfigError):
        ConfigManager(write_config(tmp_path, {"campaigns": {"bad": campaign}}))


def test_save_and_reload(tmp_path):
    path = str(tmp_path / "saved.json")
    config = ConfigManager(path)
    config.update({"seed": 99, "k_cap": 12})
    config.campaigns = ConfigManager(write_config(tmp_path, {
        "campaigns": {"kn": {"kind": "kn", "dist": "d-ary", "d": 3, "n": [100], "replicates": 20}},
    }, name="source.json")).campaigns
    assert config.save_config()

    reloaded = ConfigManager(path)
    assert reloaded.get_config() == config.get_config()
    assert reloaded.get_campaign("kn").to_dict() == config.get_campaign("kn").to_dict()
    assert reloaded.get_campaign("kn").d == 3


def test_repository_config_is_valid():
    config = ConfigManager(os.path.join(os.path.dirname(__file__), "config.json"), use_env=False)
    assert set(config.campaigns) >= {"poisson-chain", "binary-heights", "plane-kn"}
