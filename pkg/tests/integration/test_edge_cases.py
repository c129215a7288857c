import io
import json
from pathlib import Path

import pytest
from rich.console import Console

from ovenctl import OvenCtl

SETTINGS = str(Path(__file__).resolve().parents[2] / "config" / "ovenctl.yaml")


def run_cli(*argv):
    out = Console(file=io.StringIO(), width=200, record=True)
    code = OvenCtl(out=out).run(["--settings", SETTINGS, *argv])
    return code, out.export_text()


@pytest.fixture
def custom_food(tmp_path):
    path = tmp_path / "salmon.json"
    path.write_text(json.dumps({
        "name": "salmon",
        "mass_lb": 0.4,
        "cp_btu_per_lb_f": 0.75,
        "char_length_ft": 0.4,
        "surface_area_ft2": 0.3,
        "h_air": 1.1,
        "target_temp_f": 145.0,
        "safe_temp_f": 145.0,
    }), encoding="utf-8")
    return str(path)


def test_unknown_food_is_usage_error():
    code, text = run_cli("simulate", "--food", "turkey")
    assert code == 2
    assert "steak" in text and "chicken" in text and "potato" in text


def test_food_and_config_are_exclusive(custom_food):
    assert run_cli("model", "--food", "steak", "--config", custom_food)[0] == 2


def test_missing_food_is_usage_error():
    assert run_cli("analyze")[0] == 2


@pytest.mark.parametrize("poles", ["-1,-2", "1,-2,-3", "a,b,c"])
def test_bad_pole_lists_are_usage_errors(poles):
    assert run_cli("design", "--food", "steak", "--controller-poles", poles)[0] == 2


def test_unknown_subcommand():
    assert run_cli("bake")[0] == 2


def test_unknown_profile():
    code, text = run_cli("--profile", "nope", "presets")
    assert code == 2
    assert "SettingsError" in text


def test_preheat_below_ambient():
    assert run_cli("model", "--food", "steak", "--preheat", "50")[0] == 2


def test_unobservable_custom_food_exits_3(tmp_path):
    path = tmp_path / "isolated.json"
    path.write_text(json.dumps({
        "name": "isolated",
        "mass_lb": 0.5,
        "cp_btu_per_lb_f": 0.7,
        "char_length_ft": 0.5,
        "surface_area_ft2": 0.0,
        "h_air": 1.0,
        "target_temp_f": 150.0,
        "safe_temp_f": 145.0,
    }), encoding="utf-8")
    code, text = run_cli("design", "--config", str(path), "--controller-poles", "-3,-2,-1",
                         "--observer-poles", "-15,-10,-5")
    assert code == 3
    assert "Uncontrollable" in text or "Unobservable" in text


def test_custom_food_requires_explicit_poles(custom_food):
    assert run_cli("design", "--config", custom_food)[0] == 2


def test_custom_food_simulation(custom_food, tmp_path):
    out = tmp_path / "salmon.csv"
    code, _ = run_cli("simulate", "--config", custom_food, "--controller-poles", "-20,-0.2,-1",
                      "--observer-poles", "-100,-1,-5", "--dt", "0.01", "--out", str(out))
    assert code == 0
    assert out.exists()


def test_out_dir_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("OVENCTL_OUT_DIR", str(tmp_path))
    code, _ = run_cli("simulate", "--food", "steak", "--mode", "open", "--dt", "0.05", "--out", "open.csv")
    assert code == 0
    assert (tmp_path / "open.csv").exists()


def test_presets_lists_reference_rows():
    code, text = run_cli("presets")
    assert code == 0
    assert "reference only" in text
    assert "turkey" in text


def test_htc_is_exploratory():
    code, text = run_cli("htc", "--food", "steak", "--delta-t", "320")
    assert code == 0
    assert "exploratory" in text


def test_model_reports_checks():
    code, text = run_cli("model", "--food", "chicken")
    assert code == 0
    assert "1.158" in text
    assert "FAIL" not in text


def test_negative_pole_lists_as_separate_arguments():
    code, text = run_cli("design", "--food", "steak", "--controller-poles", "-39,-0.1,-1",
                         "--observer-poles", "-200,-150,-100")
    assert code == 0
    assert "Gains" in text


def test_pole_lists_in_equals_form():
    assert run_cli("design", "--food", "chicken", "--controller-poles=-39,-0.1,-1")[0] == 0


def test_observer_init_temperatures_as_separate_argument(tmp_path):
    out = tmp_path / "steak.csv"
    code, _ = run_cli("simulate", "--food", "steak", "--x0-hat", "80,80,80", "--dt", "0.01",
                      "--out", str(out))
    assert code == 0
    assert out.exists()


def test_attach_list_values():
    argv = ["design", "--controller-poles", "-3,-2,-1", "--observer-poles=-9,-8,-7", "--x0-hat"]
    assert OvenCtl.attach_list_values(argv) == [
        "design", "--controller-poles=-3,-2,-1", "--observer-poles=-9,-8,-7", "--x0-hat",
    ]


def test_custom_food_without_h_needs_derive_flag(tmp_path):
    path = tmp_path / "no_h.json"
    path.write_text(json.dumps({
        "name": "roast",
        "mass_lb": 0.5,
        "cp_btu_per_lb_f": 0.7,
        "char_length_ft": 0.5,
        "surface_area_ft2": 0.375,
        "target_temp_f": 150.0,
        "safe_temp_f": 145.0,
    }), encoding="utf-8")
    poles = ("--controller-poles", "-39,-0.1,-1", "--observer-poles", "-200,-150,-100")
    assert run_cli("design", "--config", str(path), *poles)[0] == 2
    assert run_cli("design", "--config", str(path), "--derive-htc", *poles)[0] == 0
