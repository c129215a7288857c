"""Run settings from the YAML profile file and the environment."""
import logging
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Optional

import yaml
from dotenv import load_dotenv

from ovenctl.services.plant import DEFAULT_AMBIENT_F, DEFAULT_PREHEAT_F
from ovenctl.services.simulation import DEFAULT_BAND_F, DEFAULT_DT, OBSERVER_INIT_MODES

# Load environment variables from .env or config.env
load_dotenv()
config_file = os.getenv("CONFIG_FILE", "config/config.env")
if os.path.exists(config_file):
    load_dotenv(config_file)

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = "config/ovenctl.yaml"
DEFAULT_PROFILE = "published"
OUTPUT_FORMATS = ("csv", "json")

BUILTIN_PROFILES: dict[str, dict[str, Any]] = {
    "published": {},
    "quick": {"dt": 0.01},
}


class SettingsError(Exception):
    """Raised when the profile file or an override is invalid."""
    pass


@dataclass(frozen=True)
class Settings:
    """
    Resolved run settings.

    ``t_final`` of ``None`` means "use the food's default horizon".
    """
    profile: str = DEFAULT_PROFILE
    preheat_f: float = DEFAULT_PREHEAT_F
    ambient_f: float = DEFAULT_AMBIENT_F
    dt: float = DEFAULT_DT
    t_final: Optional[float] = None
    settling_band_f: float = DEFAULT_BAND_F
    format: str = "csv"
    feedforward: bool = True
    observer_init: str = "plant"
    delta_t_f: Optional[float] = None
    out_dir: str = "."

    def __post_init__(self):
        if not self.dt > 0:
            raise SettingsError(f"dt must be positive, got {self.dt}")
        if self.t_final is not None and not self.t_final >= self.dt:
            raise SettingsError(f"t_final ({self.t_final}) must be at least dt ({self.dt})")
        if not self.preheat_f > self.ambient_f:
            raise SettingsError(f"preheat ({self.preheat_f}) must exceed ambient ({self.ambient_f})")
        if not self.settling_band_f > 0:
            raise SettingsError("settling_band_f must be positive")
        if self.format not in OUTPUT_FORMATS:
            raise SettingsError(f"format must be one of {OUTPUT_FORMATS}, got '{self.format}'")
        if self.observer_init not in OBSERVER_INIT_MODES:
            raise SettingsError(f"observer_init must be one of {OBSERVER_INIT_MODES}, got '{self.observer_init}'")

    @property
    def delta_t(self) -> float:
        """Buoyancy temperature difference for derived h values."""
        return self.preheat_f - self.ambient_f if self.delta_t_f is None else self.delta_t_f

    def with_overrides(self, **overrides: Any) -> "Settings":
        """Apply command-line values; ``None`` leaves a setting unchanged."""
        changes = {key: value for key, value in overrides.items() if value is not None}
        try:
            return replace(self, **changes)
        except TypeError as e:
            raise SettingsError(str(e)) from e


_FIELD_TYPES = {f.name: f.type for f in fields(Settings)}
_NUMERIC = {"preheat_f", "ambient_f", "dt", "t_final", "settling_band_f", "delta_t_f"}


def _coerce(profile: str, values: dict[str, Any]) -> dict[str, Any]:
    unknown = sorted(set(values) - set(_FIELD_TYPES) - {"profile"})
    if unknown:
        raise SettingsError(f"profile '{profile}' has unknown keys: {', '.join(unknown)}")
    coerced: dict[str, Any] = {}
    for key, value in values.items():
        if key in _NUMERIC:
            if value is None:
                coerced[key] = None
                continue
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise SettingsError(f"profile '{profile}': {key} must be a number, got {value!r}")
            coerced[key] = float(value)
        elif key == "feedforward":
            if not isinstance(value, bool):
                raise SettingsError(f"profile '{profile}': feedforward must be true or false")
            coerced[key] = value
        else:
            coerced[key] = str(value)
    return coerced


class SettingsFactory:
    @classmethod
    def load(cls, config_path: Optional[str] = None, profile: Optional[str] = None) -> Settings:
        """
        Resolve settings: explicit ``profile`` > ``OVENCTL_PROFILE`` > ``active_profile``.

        A missing profile file falls back to the built-in profiles with a warning.
        ``OVENCTL_OUT_DIR`` overrides the profile's ``out_dir``.
        """
        path = Path(config_path or os.getenv("OVENCTL_CONFIG", DEFAULT_CONFIG_PATH))
        if path.exists():
            try:
                with open(path, "r", encoding="utf-8") as f:
                    full_config = yaml.safe_load(f) or {}
            except yaml.YAMLError as e:
                raise SettingsError(f"cannot parse {path}: {e}") from e
            if not isinstance(full_config, dict) or not isinstance(full_config.get("profiles", {}), dict):
                raise SettingsError(f"{path} must map 'profiles' to named profiles")
            profiles = full_config.get("profiles") or {}
            active = full_config.get("active_profile", DEFAULT_PROFILE)
        else:
            logger.warning("Config file %s not found; using built-in profiles", path)
            profiles = BUILTIN_PROFILES
            active = DEFAULT_PROFILE

        name = profile or os.getenv("OVENCTL_PROFILE") or active
        if name not in profiles:
            raise SettingsError(f"Profile '{name}' not defined. Available: {', '.join(profiles) or 'none'}")

        values = _coerce(name, profiles[name] or {})
        values["profile"] = name
        out_dir = os.getenv("OVENCTL_OUT_DIR")
        if out_dir:
            values["out_dir"] = out_dir
        settings = Settings(**values)
        logger.debug("Settings resolved from %s: %s", path, settings)
        return settings
