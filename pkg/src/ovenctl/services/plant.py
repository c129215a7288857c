"""Three-state lumped thermal model of an oven (air, wall, food) and its presets.

The model input ``u`` enters the air equation with unit coefficient against
``T_air`` (``dT_air/dt = (u - T_air) + ...``), so it carries temperature (F)
semantics: a constant ``u`` equal to the uniform temperature of all bodies is
an equilibrium. Time is in the model's own time units.
"""
import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from ovenctl.core.linalg import as_matrix
from ovenctl.services.heat_transfer import OVEN_AIR, AirProperties, derive_htc

logger = logging.getLogger(__name__)

DEFAULT_AMBIENT_F = 80.0
DEFAULT_PREHEAT_F = 400.0
STATE_LABELS = ("T_air", "T_wall", "T_food")
INPUT_LABEL = "Q_i"
OUTPUT_LABEL = "y"


class PlantError(Exception):
    """Base exception for plant-model errors."""
    pass


class UnknownPreset(PlantError):
    """Raised when a food preset name is not known."""

    def __init__(self, name: str):
        super().__init__(f"Unknown food preset '{name}'. Valid presets: {', '.join(PRESET_NAMES)}")
        self.name = name


class DegenerateBody(PlantError):
    """Raised when a body has non-positive heat capacity."""
    pass


class FoodConfigError(PlantError):
    """Raised when a custom food file is unreadable or violates the schema."""
    pass


@dataclass(frozen=True)
class SurfaceBody:
    """A lumped body exchanging heat with the oven air."""
    name: str
    mass: float         # lb
    cp: float           # Btu/(lb F)
    char_length: float  # ft
    area: float         # ft^2 in contact with air
    h_air: float        # Btu/(ft^2 hr F)

    def __post_init__(self):
        if self.area < 0:
            raise DegenerateBody(f"{self.name}: contact area must be non-negative")
        if self.area > 0 and not self.h_air > 0:
            raise DegenerateBody(f"{self.name}: h_air must be positive when area > 0")

    @property
    def heat_capacity(self) -> float:
        return self.mass * self.cp

    @property
    def conductance(self) -> float:
        """h A, the convective conductance to the air."""
        return self.h_air * self.area


@dataclass(frozen=True)
class FoodPreset:
    body: SurfaceBody
    safe_temp: float
    target_temp: float


@dataclass(frozen=True)
class OvenSpec:
    air: AirProperties
    air_mass: float
    wall: SurfaceBody
    ambient: float = DEFAULT_AMBIENT_F
    preheat: float = DEFAULT_PREHEAT_F

    def __post_init__(self):
        if not self.air_mass > 0:
            raise DegenerateBody("air mass must be positive")
        if not self.preheat > self.ambient:
            raise PlantError(f"preheat ({self.preheat} F) must exceed ambient ({self.ambient} F)")


@dataclass(frozen=True)
class StateSpace:
    """Continuous-time LTI model x' = A x + B u, y = C x."""
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    state_labels: tuple[str, ...] = STATE_LABELS
    input_label: str = INPUT_LABEL
    output_label: str = OUTPUT_LABEL

    def __post_init__(self):
        a = as_matrix(self.a, "A")
        b = as_matrix(self.b, "B")
        c = as_matrix(self.c, "C").reshape(1, -1) if np.ndim(self.c) == 1 else as_matrix(self.c, "C")
        n = a.shape[0]
        if a.shape != (n, n) or b.shape[0] != n or c.shape[1] != n:
            raise PlantError(f"inconsistent dimensions A{a.shape} B{b.shape} C{c.shape}")
        if len(self.state_labels) != n:
            raise PlantError(f"{len(self.state_labels)} state labels for {n} states")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def order(self) -> int:
        return self.a.shape[0]


# Table data: wall and air are shared by every preset.
OVEN_WALL = SurfaceBody(name="wall", mass=75.0, cp=0.22, char_length=2.0, area=15.11, h_air=1.069)
OVEN_AIR_MASS_LB = 0.283

_FOODS: dict[str, FoodPreset] = {
    "steak": FoodPreset(
        body=SurfaceBody(name="steak", mass=0.5, cp=0.66, char_length=0.5, area=0.375, h_air=1.189),
        safe_temp=145.0,
        target_temp=135.0,
    ),
    "chicken": FoodPreset(
        body=SurfaceBody(name="chicken", mass=0.5, cp=0.77, char_length=0.5, area=0.375, h_air=1.189),
        safe_temp=165.0,
        target_temp=165.0,
    ),
    "potato": FoodPreset(
        body=SurfaceBody(name="potato", mass=0.375, cp=0.82, char_length=0.3, area=0.256, h_air=1.141),
        safe_temp=140.0,
        target_temp=200.0,
    ),
}
PRESET_NAMES = tuple(_FOODS)


@dataclass(frozen=True)
class TemperatureGuideline:
    food: str
    safe_temp: float
    recommended: tuple[float, float]
    modelled: bool


_GUIDELINES = (
    TemperatureGuideline("steak", 145.0, (130.0, 135.0), True),
    TemperatureGuideline("chicken", 165.0, (165.0, 175.0), True),
    TemperatureGuideline("turkey", 165.0, (165.0, 175.0), False),
    TemperatureGuideline("seafood", 145.0, (130.0, 140.0), False),
    TemperatureGuideline("bread", 140.0, (180.0, 200.0), False),
    TemperatureGuideline("potato", 140.0, (200.0, 200.0), True),
)


def reference_guidelines() -> tuple[TemperatureGuideline, ...]:
    """Internal-temperature guidelines; only rows with ``modelled`` have plant parameters."""
    return _GUIDELINES


def default_oven(ambient: float = DEFAULT_AMBIENT_F, preheat: float = DEFAULT_PREHEAT_F) -> OvenSpec:
    return OvenSpec(air=OVEN_AIR, air_mass=OVEN_AIR_MASS_LB, wall=OVEN_WALL, ambient=ambient, preheat=preheat)


def preset(name: str) -> tuple[OvenSpec, FoodPreset]:
    """
    Look up a modelled food.

    Raises:
        UnknownPreset: for anything but steak, chicken or potato.
    """
    key = name.strip().lower()
    if key not in _FOODS:
        raise UnknownPreset(name)
    return default_oven(), _FOODS[key]


def with_derived_htc(oven: OvenSpec, food: FoodPreset, delta_t: Optional[float] = None
                     ) -> tuple[OvenSpec, FoodPreset]:
    """
    Replace the tabulated h of wall and food by the natural-convection pipeline.

    Args:
        delta_t: Buoyancy temperature difference; defaults to preheat - ambient.
    """
    delta_t = oven.preheat - oven.ambient if delta_t is None else delta_t
    _, h_wall = derive_htc(oven.air, oven.wall.char_length, delta_t)
    _, h_food = derive_htc(oven.air, food.body.char_length, delta_t)
    logger.info("Derived h: wall %.4g (table %.4g), %s %.4g (table %.4g)",
                h_wall, oven.wall.h_air, food.body.name, h_food, food.body.h_air)
    return (
        replace(oven, wall=replace(oven.wall, h_air=h_wall)),
        replace(food, body=replace(food.body, h_air=h_food)),
    )


def build_plant(oven: OvenSpec, food: FoodPreset) -> StateSpace:
    """
    Assemble A, B, C for the air/wall/food model.

    Raises:
        DegenerateBody: if any mass times heat capacity is not positive.
    """
    air_capacity = oven.air_mass * oven.air.cp
    for name, capacity in (("air", air_capacity), (oven.wall.name, oven.wall.heat_capacity),
                           (food.body.name, food.body.heat_capacity)):
        if not capacity > 0:
            raise DegenerateBody(f"{name}: mass * cp must be positive, got {capacity}")

    wall_to_air = oven.wall.conductance / air_capacity
    food_to_air = food.body.conductance / air_capacity
    air_to_wall = oven.wall.conductance / oven.wall.heat_capacity
    air_to_food = food.body.conductance / food.body.heat_capacity

    a = np.array([
        [-(1.0 + wall_to_air + food_to_air), wall_to_air, food_to_air],
        [air_to_wall, -air_to_wall, 0.0],
        [air_to_food, 0.0, -air_to_food],
    ])
    b = np.array([[1.0], [0.0], [0.0]])
    c = np.array([[0.0, 0.0, 1.0]])
    return StateSpace(a=a, b=b, c=c)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class PlantReport:
    checks: tuple[CheckResult, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]


def validate_plant(ss: StateSpace, tol: float = 1e-9) -> PlantReport:
    """Check the structural invariants of a thermal plant without raising."""
    aug = np.hstack([ss.a, ss.b])
    checks = []

    row_sums = aug.sum(axis=1)
    scale = np.maximum(1.0, np.abs(aug).sum(axis=1))
    worst = float(np.max(np.abs(row_sums) / scale))
    checks.append(CheckResult("row sums of [A | B] are zero", worst <= tol, f"max relative residual {worst:.3e}"))

    off_diag = ss.a[~np.eye(ss.order, dtype=bool)]
    checks.append(CheckResult("off-diagonal A entries non-negative", bool(np.all(off_diag >= 0)),
                              f"min {off_diag.min():.4g}" if off_diag.size else ""))
    checks.append(CheckResult("B entries non-negative", bool(np.all(ss.b >= 0)), ""))
    # Diagonal may be zero only for a body with no contact area.
    checks.append(CheckResult("A diagonal non-positive", bool(np.all(np.diag(ss.a) <= 0)), ""))

    expected_c = np.zeros((1, ss.order))
    expected_c[0, -1] = 1.0
    checks.append(CheckResult("C measures food temperature",
                              ss.c.shape == expected_c.shape and bool(np.all(ss.c == expected_c)), ""))

    report = PlantReport(tuple(checks))
    for failure in report.failures:
        logger.warning("Plant check failed: %s (%s)", failure.name, failure.detail)
    return report


_FOOD_SCHEMA: dict[str, type] = {
    "name": str,
    "mass_lb": float,
    "cp_btu_per_lb_f": float,
    "char_length_ft": float,
    "surface_area_ft2": float,
    "target_temp_f": float,
    "safe_temp_f": float,
}


def parse_food(data: dict[str, Any], oven: Optional[OvenSpec] = None,
               delta_t: Optional[float] = None, derive_h: bool = False) -> FoodPreset:
    """
    Build a FoodPreset from the custom-food JSON schema.

    ``h_air`` is required unless ``derive_h`` is set, in which case a missing
    value is derived from the natural-convection correlations.
    """
    if not isinstance(data, dict):
        raise FoodConfigError("food config must be a JSON object")
    missing = [key for key in _FOOD_SCHEMA if key not in data]
    if missing:
        raise FoodConfigError(f"food config missing keys: {', '.join(missing)}")

    values: dict[str, Any] = {}
    for key, kind in _FOOD_SCHEMA.items():
        raw = data[key]
        if kind is float:
            if isinstance(raw, bool) or not isinstance(raw, (int, float)):
                raise FoodConfigError(f"'{key}' must be a number, got {raw!r}")
            values[key] = float(raw)
        elif not isinstance(raw, str) or not raw.strip():
            raise FoodConfigError(f"'{key}' must be a non-empty string")
        else:
            values[key] = raw.strip()

    oven = oven or default_oven()
    if values["target_temp_f"] < oven.ambient:
        raise FoodConfigError(f"target_temp_f {values['target_temp_f']} is below ambient {oven.ambient}")
    if values["mass_lb"] <= 0 or values["cp_btu_per_lb_f"] <= 0:
        raise FoodConfigError("mass_lb and cp_btu_per_lb_f must be positive")

    h_air = data.get("h_air")
    if h_air is None and not derive_h:
        raise FoodConfigError("'h_air' is required unless heat-transfer coefficients are derived")
    if h_air is None:
        dt = oven.preheat - oven.ambient if delta_t is None else delta_t
        _, h_air = derive_htc(oven.air, values["char_length_ft"], dt)
        logger.info("No h_air for '%s'; derived %.4g from correlations (dT=%.4g)", values["name"], h_air, dt)
    elif isinstance(h_air, bool) or not isinstance(h_air, (int, float)):
        raise FoodConfigError(f"'h_air' must be a number, got {h_air!r}")

    try:
        body = SurfaceBody(
            name=values["name"],
            mass=values["mass_lb"],
            cp=values["cp_btu_per_lb_f"],
            char_length=values["char_length_ft"],
            area=values["surface_area_ft2"],
            h_air=float(h_air),
        )
    except DegenerateBody as e:
        raise FoodConfigError(str(e)) from e
    return FoodPreset(body=body, safe_temp=values["safe_temp_f"], target_temp=values["target_temp_f"])


def load_food_config(path: Union[str, Path], oven: Optional[OvenSpec] = None,
                     delta_t: Optional[float] = None, derive_h: bool = False) -> FoodPreset:
    """Read a custom food from a JSON file."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError as e:
        raise FoodConfigError(f"food config not found: {path}") from e
    except json.JSONDecodeError as e:
        raise FoodConfigError(f"food config {path} is not valid JSON: {e}") from e
    return parse_food(data, oven=oven, delta_t=delta_t, derive_h=derive_h)
