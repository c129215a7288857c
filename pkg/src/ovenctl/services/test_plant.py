import json
from dataclasses import replace

import numpy as np
import pytest

from ovenctl.core.eigen import eigenvalues
from ovenctl.services.plant import (
    DegenerateBody,
    FoodConfigError,
    FoodPreset,
    PRESET_NAMES,
    StateSpace,
    SurfaceBody,
    UnknownPreset,
    build_plant,
    default_oven,
    load_food_config,
    parse_food,
    preset,
    reference_guidelines,
    validate_plant,
    with_derived_htc,
)

POLE_TABLE = {
    "steak": [-9.472, -0.104, -1.341],
    "chicken": [-9.467, -0.104, -1.153],
    "potato": [-9.390, -0.104, -0.951],
}

CUSTOM_FOOD = {
    "name": "salmon",
    "mass_lb": 0.4,
    "cp_btu_per_lb_f": 0.75,
    "char_length_ft": 0.4,
    "surface_area_ft2": 0.3,
    "h_air": 1.1,
    "target_temp_f": 145.0,
    "safe_temp_f": 145.0,
}


def test_preset_names():
    assert PRESET_NAMES == ("steak", "chicken", "potato")


def test_steak_preset_constants():
    oven, food = preset("steak")
    body = food.body
    assert (body.mass, body.cp, body.char_length, body.area, body.h_air) == (0.5, 0.66, 0.5, 0.375, 1.189)
    assert food.target_temp == 135.0
    assert oven.ambient == 80.0 and oven.preheat == 400.0
    assert (oven.wall.mass, oven.wall.cp, oven.wall.area, oven.wall.h_air) == (75.0, 0.22, 15.11, 1.069)
    assert oven.air_mass == 0.283


def test_potato_preset_constants():
    _, food = preset("Potato ")
    body = food.body
    assert (body.mass, body.cp, body.char_length, body.area, body.h_air) == (0.375, 0.82, 0.3, 0.256, 1.141)
    assert food.target_temp == 200.0


def test_unknown_preset():
    with pytest.raises(UnknownPreset) as excinfo:
        preset("bread")
    assert "steak" in str(excinfo.value)


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_build_plant_matches_printed_matrix(name, printed_matrices):
    ss = build_plant(*preset(name))
    np.testing.assert_allclose(ss.a, printed_matrices[name], atol=5e-3)
    np.testing.assert_array_equal(ss.b, [[1.0], [0.0], [0.0]])
    np.testing.assert_array_equal(ss.c, [[0.0, 0.0, 1.0]])
    assert ss.state_labels == ("T_air", "T_wall", "T_food")


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_build_plant_structure(name):
    ss = build_plant(*preset(name))
    aug = np.hstack([ss.a, ss.b])
    assert np.all(np.abs(aug.sum(axis=1)) <= 1e-12 * np.abs(aug).sum(axis=1))
    off = ss.a[~np.eye(3, dtype=bool)]
    assert np.all(off >= 0)
    assert np.all(np.diag(ss.a) < 0)
    assert ss.a[1, 2] == 0.0 and ss.a[2, 1] == 0.0
    assert ss.a[1, 0] == -ss.a[1, 1]
    assert ss.a[2, 0] == -ss.a[2, 2]


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_plant_poles_match_table(name):
    found = sorted(z.real for z in eigenvalues(build_plant(*preset(name)).a).eigenvalues)
    np.testing.assert_allclose(found, sorted(POLE_TABLE[name]), atol=1e-3)


def test_zero_contact_area_decouples_food():
    oven, food = preset("steak")
    isolated = replace(food, body=replace(food.body, area=0.0))
    ss = build_plant(oven, isolated)
    assert ss.a[0, 2] == 0.0
    assert ss.a[2, 0] == 0.0
    assert ss.a[2, 2] == 0.0
    assert validate_plant(ss).passed


def test_degenerate_body_rejected():
    oven, food = preset("steak")
    with pytest.raises(DegenerateBody):
        build_plant(oven, replace(food, body=replace(food.body, mass=0.0)))


def test_surface_body_requires_h_with_contact():
    with pytest.raises(DegenerateBody):
        SurfaceBody(name="x", mass=1.0, cp=1.0, char_length=1.0, area=1.0, h_air=0.0)


def test_oven_preheat_must_exceed_ambient():
    with pytest.raises(Exception):
        default_oven(ambient=400.0, preheat=80.0)


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_validate_plant_passes_for_presets(name):
    report = validate_plant(build_plant(*preset(name)))
    assert report.passed
    assert report.failures == []


def test_validate_plant_detects_tampering(steak_plant):
    a = np.array(steak_plant.a)
    a[0, 0] += 1.0
    report = validate_plant(StateSpace(a=a, b=steak_plant.b, c=steak_plant.c))
    assert not report.passed
    assert [f.name for f in report.failures] == ["row sums of [A | B] are zero"]


def test_state_space_rejects_inconsistent_shapes():
    with pytest.raises(Exception):
        StateSpace(a=np.eye(3), b=np.ones((2, 1)), c=np.ones((1, 3)))


def test_parse_food_with_table_h():
    food = parse_food(CUSTOM_FOOD)
    assert isinstance(food, FoodPreset)
    assert food.body.name == "salmon"
    assert food.body.h_air == 1.1
    assert food.target_temp == 145.0
    assert validate_plant(build_plant(default_oven(), food)).passed


def test_parse_food_requires_h_unless_derived():
    data = {k: v for k, v in CUSTOM_FOOD.items() if k != "h_air"}
    with pytest.raises(FoodConfigError, match="h_air"):
        parse_food(data)
    food = parse_food(data, derive_h=True)
    assert food.body.h_air > 0
    again = parse_food(data, derive_h=True)
    assert again.body.h_air == food.body.h_air


def test_load_food_config_without_h(tmp_path):
    path = tmp_path / "no_h.json"
    path.write_text(json.dumps({k: v for k, v in CUSTOM_FOOD.items() if k != "h_air"}), encoding="utf-8")
    with pytest.raises(FoodConfigError):
        load_food_config(path)
    assert load_food_config(path, derive_h=True).body.h_air > 0


@pytest.mark.parametrize("mutation", [
    {"mass_lb": "heavy"},
    {"name": ""},
    {"target_temp_f": 20.0},
    {"mass_lb": -1.0},
    {"h_air": "fast"},
])
def test_parse_food_rejects_bad_values(mutation):
    with pytest.raises(FoodConfigError):
        parse_food({**CUSTOM_FOOD, **mutation})


def test_parse_food_reports_missing_keys():
    data = dict(CUSTOM_FOOD)
    del data["cp_btu_per_lb_f"]
    with pytest.raises(FoodConfigError, match="cp_btu_per_lb_f"):
        parse_food(data)


def test_load_food_config(tmp_path):
    path = tmp_path / "salmon.json"
    path.write_text(json.dumps(CUSTOM_FOOD), encoding="utf-8")
    assert load_food_config(path).body.mass == 0.4


def test_load_food_config_errors(tmp_path):
    with pytest.raises(FoodConfigError):
        load_food_config(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(FoodConfigError):
        load_food_config(broken)


def test_with_derived_htc_replaces_coefficients():
    oven, food = preset("steak")
    derived_oven, derived_food = with_derived_htc(oven, food, delta_t=320.0)
    assert derived_oven.wall.h_air != oven.wall.h_air
    assert derived_food.body.h_air != food.body.h_air
    assert derived_food.body.mass == food.body.mass
    assert validate_plant(build_plant(derived_oven, derived_food)).passed


def test_reference_guidelines_cover_all_foods():
    rows = reference_guidelines()
    assert {row.food for row in rows} == {"steak", "chicken", "turkey", "seafood", "bread", "potato"}
    assert {row.food for row in rows if row.modelled} == set(PRESET_NAMES)
