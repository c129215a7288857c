"""Modelling, design and simulation services for OvenCtl."""

from .design import DesignError, PoleSet, analyze, augment, default_poles, design
from .heat_transfer import HeatTransferError, derive_htc
from .plant import PlantError, StateSpace, build_plant, preset, validate_plant
from .reproduce import ReproReport, reproduce
from .settings import Settings, SettingsError, SettingsFactory
from .simulation import SimConfig, SimulationError, Trajectory, lsim, rk4_sim, step_metrics

__all__ = [
    "DesignError",
    "PoleSet",
    "analyze",
    "augment",
    "default_poles",
    "design",
    "HeatTransferError",
    "derive_htc",
    "PlantError",
    "StateSpace",
    "build_plant",
    "preset",
    "validate_plant",
    "ReproReport",
    "reproduce",
    "Settings",
    "SettingsError",
    "SettingsFactory",
    "SimConfig",
    "SimulationError",
    "Trajectory",
    "lsim",
    "rk4_sim",
    "step_metrics",
]
