import logging

import pytest
import yaml

from ovenctl.services.settings import Settings, SettingsError, SettingsFactory

TEST_CONFIG = {
    "version": "1.0",
    "active_profile": "published",
    "profiles": {
        "published": {"dt": 0.001, "preheat_f": 400, "ambient_f": 80},
        "coarse": {"dt": 0.05, "t_final": 50, "format": "json", "feedforward": False, "out_dir": "runs"},
        "broken": {"dt": "fast"},
        "typo": {"timestep": 0.1},
    },
}


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("OVENCTL_CONFIG", "OVENCTL_PROFILE", "OVENCTL_OUT_DIR"):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "ovenctl.yaml"
    with open(path, "w") as f:
        yaml.dump(TEST_CONFIG, f)
    return str(path)


def test_active_profile_loaded(config_file):
    settings = SettingsFactory.load(config_file)
    assert settings.profile == "published"
    assert settings.dt == 0.001
    assert settings.t_final is None
    assert settings.feedforward
    assert settings.delta_t == 320.0


def test_explicit_profile(config_file):
    settings = SettingsFactory.load(config_file, profile="coarse")
    assert settings.dt == 0.05
    assert settings.t_final == 50.0
    assert settings.format == "json"
    assert settings.feedforward is False
    assert settings.out_dir == "runs"


def test_environment_selects_profile_and_out_dir(config_file, monkeypatch):
    monkeypatch.setenv("OVENCTL_CONFIG", config_file)
    monkeypatch.setenv("OVENCTL_PROFILE", "coarse")
    monkeypatch.setenv("OVENCTL_OUT_DIR", "/tmp/oven-out")
    settings = SettingsFactory.load()
    assert settings.profile == "coarse"
    assert settings.out_dir == "/tmp/oven-out"


def test_explicit_profile_beats_environment(config_file, monkeypatch):
    monkeypatch.setenv("OVENCTL_PROFILE", "coarse")
    assert SettingsFactory.load(config_file, profile="published").profile == "published"


def test_unknown_profile(config_file):
    with pytest.raises(SettingsError, match="not defined"):
        SettingsFactory.load(config_file, profile="missing")


@pytest.mark.parametrize("profile", ["broken", "typo"])
def test_invalid_profile_values(config_file, profile):
    with pytest.raises(SettingsError):
        SettingsFactory.load(config_file, profile=profile)


def test_missing_file_uses_builtin_profiles(tmp_path, caplog):
    with caplog.at_level(logging.WARNING, logger="ovenctl.services.settings"):
        settings = SettingsFactory.load(str(tmp_path / "absent.yaml"))
    assert settings == Settings()
    assert "not found" in caplog.text
    assert SettingsFactory.load(str(tmp_path / "absent.yaml"), profile="quick").dt == 0.01


def test_unparseable_file(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("profiles: [unclosed", encoding="utf-8")
    with pytest.raises(SettingsError):
        SettingsFactory.load(str(path))


def test_overrides_ignore_none():
    settings = Settings().with_overrides(dt=0.5, t_final=None, format="json")
    assert settings.dt == 0.5
    assert settings.t_final is None
    assert settings.format == "json"


@pytest.mark.parametrize("overrides", [
    {"dt": -1.0},
    {"format": "xml"},
    {"observer_init": "random"},
    {"preheat_f": 70.0},
    {"dt": 1.0, "t_final": 0.5},
    {"no_such_setting": 1},
])
def test_invalid_overrides(overrides):
    with pytest.raises(SettingsError):
        Settings().with_overrides(**overrides)


def test_delta_t_override():
    assert Settings(delta_t_f=150.0).delta_t == 150.0
