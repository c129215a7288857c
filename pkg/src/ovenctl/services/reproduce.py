"""
One-shot reproduction of the published oven models, pole table and responses.

Every check records what was expected, what was computed and the tolerance,
so a failed run says exactly which number drifted.
"""
import asyncio
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Optional

import numpy as np

from ovenctl.core.eigen import eigenvalues
from ovenctl.services.design import ClosedLoop, augment, default_horizon, default_poles, design
from ovenctl.services.plant import PRESET_NAMES, StateSpace, build_plant, preset
from ovenctl.services.settings import Settings
from ovenctl.services.simulation import (
    Trajectory,
    closed_loop_config,
    lsim,
    open_loop_config,
)

if TYPE_CHECKING:
    from ovenctl.handlers.trajectory_writer import TrajectoryWriter

logger = logging.getLogger(__name__)

MATRIX_TOL = 5e-3
POLE_TOL = 1e-3
PLACEMENT_RTOL = 1e-8
UNION_RTOL = 1e-6
CONVERGENCE_TOL_F = 0.5
OPEN_LOOP_FINAL_TOL_F = 1.0
OPEN_LOOP_HORIZON = 100.0

PRINTED_A: dict[str, list[list[float]]] = {
    "steak": [[-8.587, 7.383, 0.204], [0.979, -0.979, 0.0], [1.351, 0.0, -1.351]],
    "chicken": [[-8.587, 7.383, 0.204], [0.979, -0.979, 0.0], [1.158, 0.0, -1.158]],
    "potato": [[-8.516, 7.383, 0.134], [0.979, -0.979, 0.0], [0.950, 0.0, -0.950]],
}
PUBLISHED_POLES: dict[str, tuple[float, float, float]] = {
    "steak": (-9.472, -0.104, -1.341),
    "chicken": (-9.467, -0.104, -1.153),
    "potato": (-9.390, -0.104, -0.951),
}
FIGURE_FILES = {
    "open": "fig1_steak_open.csv",
    "steak": "fig2_steak_closed.csv",
    "chicken": "fig3_chicken_closed.csv",
    "potato": "fig4_potato_closed.csv",
}


@dataclass(frozen=True)
class ReproCheck:
    name: str
    expected: str
    computed: str
    tolerance: float
    passed: bool


@dataclass
class ReproReport:
    checks: list[ReproCheck] = field(default_factory=list)
    figures: dict[str, Path] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[ReproCheck]:
        return [c for c in self.checks if not c.passed]

    def count(self, prefix: str) -> int:
        return sum(1 for c in self.checks if c.name.startswith(prefix))


def _relative_pole_error(found, requested) -> float:
    remaining = [complex(z) for z in requested]
    worst = 0.0
    for z in found:
        idx = min(range(len(remaining)), key=lambda i: abs(remaining[i] - z))
        worst = max(worst, abs(remaining.pop(idx) - z))
    return worst / max(abs(z) for z in requested)


def _plant(name: str, perturbation: Optional[np.ndarray]) -> StateSpace:
    ss = build_plant(*preset(name))
    if perturbation is None:
        return ss
    logger.warning("Injecting A perturbation into %s plant", name)
    return StateSpace(a=ss.a + perturbation, b=ss.b, c=ss.c)


def matrix_check(name: str, ss: StateSpace) -> ReproCheck:
    error = float(np.max(np.abs(ss.a - np.array(PRINTED_A[name]))))
    io_exact = np.array_equal(ss.b.ravel(), [1.0, 0.0, 0.0]) and np.array_equal(ss.c.ravel(), [0.0, 0.0, 1.0])
    return ReproCheck(
        name=f"matrix {name}",
        expected="printed A, b=[1,0,0], c=[0,0,1]",
        computed=f"max|dA|={error:.2e}" + ("" if io_exact else ", b/c differ"),
        tolerance=MATRIX_TOL,
        passed=error <= MATRIX_TOL and io_exact,
    )


def pole_checks(name: str) -> list[ReproCheck]:
    found = sorted(z.real for z in eigenvalues(PRINTED_A[name]).eigenvalues)
    expected = sorted(PUBLISHED_POLES[name])
    return [
        ReproCheck(
            name=f"pole {name} #{i}",
            expected=f"{want:.3f}",
            computed=f"{got:.4f}",
            tolerance=POLE_TOL,
            passed=abs(got - want) <= POLE_TOL,
        )
        for i, (got, want) in enumerate(zip(found, expected), start=1)
    ]


def design_checks(name: str, ss: StateSpace, settings: Settings
                  ) -> tuple[list[ReproCheck], Trajectory, ClosedLoop]:
    """Placement accuracy and closed-loop convergence for one food."""
    _, food = preset(name)
    poles = default_poles(name)
    gains = design(ss, poles, use_feedforward=settings.feedforward)
    ctrl_err = _relative_pole_error(eigenvalues(ss.a - ss.b @ gains.k).eigenvalues, poles.controller)
    obs_err = _relative_pole_error(eigenvalues(ss.a - gains.l @ ss.c).eigenvalues, poles.observer)
    loop = augment(ss, gains)
    union = list(poles.controller) + list(poles.observer)
    union_err = _relative_pole_error(eigenvalues(loop.a_fb).eigenvalues, union)

    cfg = closed_loop_config(loop, food.target_temp, settings.preheat_f, settings.ambient_f,
                             observer_init=settings.observer_init, dt=settings.dt,
                             t_final=default_horizon(name))
    traj = lsim(loop, cfg)
    final = float(traj.output[-1])
    peak = float(np.max(traj.output))
    checks = [
        ReproCheck(f"placement {name}", "eig(A-BK), eig(A-LC) = requested",
                   f"rel err {max(ctrl_err, obs_err):.1e}", PLACEMENT_RTOL,
                   max(ctrl_err, obs_err) <= PLACEMENT_RTOL),
        ReproCheck(f"separation {name}", "eig(A_fb) = controller + observer poles",
                   f"rel err {union_err:.1e}", UNION_RTOL, union_err <= UNION_RTOL),
        ReproCheck(f"convergence {name}", f"final {food.target_temp:g}, peak <= {food.target_temp:g}",
                   f"final {final:.4f}, peak {peak:.4f}", CONVERGENCE_TOL_F,
                   abs(final - food.target_temp) <= CONVERGENCE_TOL_F
                   and peak <= food.target_temp + CONVERGENCE_TOL_F),
    ]
    return checks, traj, loop


def open_loop_checks(ss: StateSpace, settings: Settings) -> tuple[list[ReproCheck], Trajectory]:
    cfg = open_loop_config(settings.preheat_f, settings.ambient_f, dt=settings.dt, t_final=OPEN_LOOP_HORIZON)
    traj = lsim(ss, cfg)
    food = traj.output
    drop = float(np.min(np.diff(food)))
    target = preset("steak")[1].target_temp
    checks = [
        ReproCheck("open-loop steak monotone", "T_food nondecreasing", f"min step {drop:.2e}", 1e-9,
                   drop >= -1e-9),
        ReproCheck("open-loop steak final", f"{settings.preheat_f:g} at t={OPEN_LOOP_HORIZON:g}",
                   f"{food[-1]:.4f}", OPEN_LOOP_FINAL_TOL_F,
                   abs(food[-1] - settings.preheat_f) <= OPEN_LOOP_FINAL_TOL_F),
        ReproCheck("open-loop steak overshoots target", f"crosses {target:g}", f"max {np.max(food):.2f}", 0.0,
                   bool(np.max(food) > target)),
    ]
    return checks, traj


async def reproduce_async(settings: Optional[Settings] = None, perturbation: Optional[np.ndarray] = None,
                          writer: Optional["TrajectoryWriter"] = None) -> ReproReport:
    """
    Run every check, fanning the per-food work out to worker threads.

    Args:
        perturbation: Added to each built A matrix before checking; used to
            confirm that a wrong model is caught.
        writer: A ``TrajectoryWriter``; when given, figure CSVs are written.
    """
    settings = settings or Settings()
    plants = {name: _plant(name, perturbation) for name in PRESET_NAMES}

    design_runs = [asyncio.to_thread(design_checks, name, plants[name], settings) for name in PRESET_NAMES]
    open_run = asyncio.to_thread(open_loop_checks, plants["steak"], settings)
    results = await asyncio.gather(open_run, *design_runs)
    (open_checks, open_traj), design_results = results[0], results[1:]

    report = ReproReport()
    for name in PRESET_NAMES:
        report.checks.append(matrix_check(name, plants[name]))
    for name in PRESET_NAMES:
        report.checks.extend(pole_checks(name))
    for checks, _, _ in design_results:
        report.checks.extend(checks)
    report.checks.extend(open_checks)

    if writer is not None:
        report.figures["open"] = writer.write_csv(FIGURE_FILES["open"], open_traj)
        for name, (_, traj, loop) in zip(PRESET_NAMES, design_results):
            report.figures[name] = writer.write_csv(FIGURE_FILES[name], traj, loop)

    status = "passed" if report.passed else f"failed ({len(report.failures)} checks)"
    logger.info("Reproduction %s: %d checks", status, len(report.checks))
    return report


def reproduce(settings: Optional[Settings] = None, perturbation: Optional[np.ndarray] = None,
              writer: Optional["TrajectoryWriter"] = None) -> ReproReport:
    return asyncio.run(reproduce_async(settings, perturbation=perturbation, writer=writer))
