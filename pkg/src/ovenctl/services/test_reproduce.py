import numpy as np
import pytest

from ovenctl.handlers.trajectory_writer import TrajectoryWriter, read_csv
from ovenctl.services.reproduce import (
    FIGURE_FILES,
    matrix_check,
    pole_checks,
    reproduce,
    reproduce_async,
)
from ovenctl.services.settings import Settings

QUICK = Settings(dt=0.01)


@pytest.mark.asyncio
async def test_clean_build_passes_every_check():
    report = await reproduce_async(QUICK)
    assert report.passed, [c.name for c in report.failures]
    assert report.count("matrix") == 3
    assert report.count("pole") == 9
    assert report.count("convergence") == 3
    assert report.count("open-loop") == 3
    assert report.figures == {}


@pytest.mark.asyncio
async def test_perturbed_model_fails_matrix_check():
    perturbation = np.zeros((3, 3))
    perturbation[0, 0] = 0.01
    report = await reproduce_async(QUICK, perturbation=perturbation)
    assert not report.passed
    failed = {c.name for c in report.failures}
    assert {"matrix steak", "matrix chicken", "matrix potato"} <= failed


def test_figures_written(tmp_path):
    report = reproduce(QUICK, writer=TrajectoryWriter(tmp_path))
    assert report.passed
    assert {path.name for path in report.figures.values()} == set(FIGURE_FILES.values())
    labels, data = read_csv(tmp_path / "fig4_potato_closed.csv")
    assert labels[-1] == "u"
    assert labels[3] == "T_food"
    assert abs(data[-1, 3] - 200.0) <= 0.5
    labels, _ = read_csv(tmp_path / "fig1_steak_open.csv")
    assert labels == ["t", "T_air", "T_wall", "T_food", "u"]


def test_matrix_check_reports_error(steak_plant):
    check = matrix_check("steak", steak_plant)
    assert check.passed
    assert check.tolerance == 5e-3
    assert not matrix_check("chicken", steak_plant).passed


def test_pole_checks_against_table():
    checks = pole_checks("potato")
    assert len(checks) == 3
    assert all(c.passed for c in checks)
