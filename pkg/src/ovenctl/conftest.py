import pytest

from ovenctl.services.design import augment, default_poles, design
from ovenctl.services.plant import PRESET_NAMES, build_plant, preset


@pytest.fixture
def steak_plant():
    """Steak plant built from the tabulated oven and food parameters."""
    return build_plant(*preset("steak"))


@pytest.fixture
def all_plants():
    """Every modelled preset, keyed by food name."""
    return {name: build_plant(*preset(name)) for name in PRESET_NAMES}


@pytest.fixture
def steak_loop(steak_plant):
    """Steak plant closed with the tabulated controller and observer poles."""
    gains = design(steak_plant, default_poles("steak"))
    return augment(steak_plant, gains)


@pytest.fixture
def printed_matrices():
    """A matrices as printed (three decimals) for each preset."""
    return {
        "steak": [[-8.587, 7.383, 0.204], [0.979, -0.979, 0.0], [1.351, 0.0, -1.351]],
        "chicken": [[-8.587, 7.383, 0.204], [0.979, -0.979, 0.0], [1.158, 0.0, -1.158]],
        "potato": [[-8.516, 7.383, 0.134], [0.979, -0.979, 0.0], [0.950, 0.0, -0.950]],
    }
