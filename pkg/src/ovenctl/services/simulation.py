"""
Continuous-time LTI simulation.

``lsim`` propagates the exact zero-order-hold discretization; ``rk4_sim`` is an
independent fixed-step Runge-Kutta integrator kept for cross-checking it.
"""
import asyncio
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from ovenctl.core.linalg import NumericalError, as_matrix, expm
from ovenctl.services.design import ClosedLoop
from ovenctl.services.plant import StateSpace

logger = logging.getLogger(__name__)

DEFAULT_DT = 1e-3
DEFAULT_T_FINAL = 100.0
DEFAULT_BAND_F = 1.0
METHODS = ("exact", "rk4")
OBSERVER_INIT_MODES = ("plant", "ambient")
STEP_MULTIPLE_TOL = 1e-6

System = Union[StateSpace, ClosedLoop]


class SimulationError(Exception):
    """Raised for an invalid simulation configuration."""
    pass


@dataclass(frozen=True)
class SimConfig:
    """
    One simulation run.

    ``u_ref`` is either a constant input or a tabulated sequence with one value
    per time sample (held constant over each step).
    """
    x0: tuple[float, ...]
    u_ref: Union[float, tuple[float, ...]]
    dt: float = DEFAULT_DT
    t_final: float = DEFAULT_T_FINAL
    method: str = "exact"

    def __post_init__(self):
        object.__setattr__(self, "x0", tuple(float(v) for v in self.x0))
        if not np.isscalar(self.u_ref):
            object.__setattr__(self, "u_ref", tuple(float(v) for v in self.u_ref))
        if not self.dt > 0:
            raise SimulationError(f"dt must be positive, got {self.dt}")
        if not self.t_final >= self.dt:
            raise SimulationError(f"t_final ({self.t_final}) must be at least dt ({self.dt})")
        ratio = self.t_final / self.dt
        if abs(ratio - round(ratio)) > STEP_MULTIPLE_TOL:
            raise SimulationError(f"t_final ({self.t_final}) must be a whole multiple of dt ({self.dt})")
        if self.method not in METHODS:
            raise SimulationError(f"unknown method '{self.method}', expected one of {METHODS}")

    @property
    def steps(self) -> int:
        return int(round(self.t_final / self.dt))

    def input_sequence(self) -> np.ndarray:
        n_samples = self.steps + 1
        if np.isscalar(self.u_ref):
            return np.full(n_samples, float(self.u_ref))
        if len(self.u_ref) != n_samples:
            raise SimulationError(f"tabulated input has {len(self.u_ref)} samples, expected {n_samples}")
        return np.asarray(self.u_ref, dtype=float)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray   # samples x order
    output: np.ndarray
    input: np.ndarray
    labels: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.times)

    def column(self, label: str) -> np.ndarray:
        return self.states[:, self.labels.index(label)]


@dataclass(frozen=True)
class StepMetrics:
    final_value: float
    target: float
    peak: float
    peak_time: float
    overshoot: float
    undershoot: float
    settling_time: Optional[float]
    band: float
    in_band: bool

    @property
    def settled(self) -> bool:
        return self.settling_time is not None


def system_matrices(sys: System) -> tuple[np.ndarray, np.ndarray, np.ndarray, tuple[str, ...]]:
    if isinstance(sys, ClosedLoop):
        return sys.a_fb, sys.b_fb, sys.c_fb, sys.state_labels
    return sys.a, sys.b, sys.c, sys.state_labels


def discretize(a, b, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """
    Exact zero-order-hold pair from ``expm([[A, B], [0, 0]] dt)``.

    Returns:
        ``(a_d, b_d)``, the top-left and top-right blocks.
    """
    if not dt > 0:
        raise SimulationError(f"dt must be positive, got {dt}")
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    n, m = a.shape[0], b.shape[1]
    block = np.zeros((n + m, n + m))
    block[:n, :n] = a
    block[:n, n:] = b
    phi = expm(block * dt)
    return phi[:n, :n].copy(), phi[:n, n:].copy()


def _prepare(sys: System, cfg: SimConfig):
    a, b, c, labels = system_matrices(sys)
    x0 = np.asarray(cfg.x0, dtype=float)
    if x0.shape != (a.shape[0],):
        raise SimulationError(f"x0 has {x0.size} entries for an order-{a.shape[0]} system")
    if b.shape[1] != 1:
        raise SimulationError("only single-input systems can be simulated")
    u = cfg.input_sequence()
    times = np.arange(cfg.steps + 1) * cfg.dt
    return a, b, c, labels, x0, u, times


def _finish(states: np.ndarray, c: np.ndarray, u: np.ndarray, times: np.ndarray,
            labels: tuple[str, ...]) -> Trajectory:
    return Trajectory(times=times, states=states, output=states @ c.ravel(), input=u, labels=labels)


def lsim(sys: System, cfg: SimConfig) -> Trajectory:
    """Simulate ``sys`` with ``x[k+1] = a_d x[k] + b_d u[k]``."""
    if cfg.method == "rk4":
        return rk4_sim(sys, cfg)
    a, b, c, labels, x0, u, times = _prepare(sys, cfg)
    a_d, b_d = discretize(a, b, cfg.dt)
    b_d = b_d.ravel()

    states = np.empty((len(times), a.shape[0]))
    states[0] = x0
    for k in range(cfg.steps):
        states[k + 1] = a_d @ states[k] + b_d * u[k]
    if not np.all(np.isfinite(states)):
        raise NumericalError("simulation diverged to non-finite values")
    logger.debug("lsim: %d steps of dt=%g, final y=%.6g", cfg.steps, cfg.dt, states[-1] @ c.ravel())
    return _finish(states, c, u, times, labels)


def rk4_step(a: np.ndarray, b: np.ndarray, x: np.ndarray, u: float, dt: float) -> np.ndarray:
    """One classical Runge-Kutta step of ``x' = A x + B u`` with ``u`` held."""
    drive = b * u

    def f(state):
        return a @ state + drive

    k1 = f(x)
    k2 = f(x + 0.5 * dt * k1)
    k3 = f(x + 0.5 * dt * k2)
    k4 = f(x + dt * k3)
    return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_sim(sys: System, cfg: SimConfig) -> Trajectory:
    """Fixed-step RK4 at the same ``dt`` as ``lsim``, input held per step."""
    a, b, c, labels, x0, u, times = _prepare(sys, cfg)
    b = b.ravel()
    states = np.empty((len(times), a.shape[0]))
    states[0] = x0
    for k in range(cfg.steps):
        states[k + 1] = rk4_step(a, b, states[k], u[k], cfg.dt)
    return _finish(states, c, u, times, labels)


async def lsim_async(sys: System, cfg: SimConfig) -> Trajectory:
    return await asyncio.to_thread(lsim, sys, cfg)


async def lsim_many_async(runs: Sequence[tuple[System, SimConfig]]) -> list[Trajectory]:
    """Run independent simulations concurrently, preserving order."""
    return list(await asyncio.gather(*(lsim_async(sys, cfg) for sys, cfg in runs)))


def step_metrics(traj: Trajectory, target: float, band: float = DEFAULT_BAND_F) -> StepMetrics:
    """
    Overshoot, undershoot and settling of the output against ``target``.

    Settling time is the first sample after which ``|y - target| <= band`` holds
    through the end of the horizon; ``None`` when the last sample is outside.
    """
    if len(traj) == 0:
        raise SimulationError("cannot compute metrics of an empty trajectory")
    if not band > 0:
        raise SimulationError(f"settling band must be positive, got {band}")
    y = traj.output
    peak_idx = int(np.argmax(y))
    peak = float(y[peak_idx])

    outside = np.nonzero(np.abs(y - target) > band)[0]
    if outside.size == 0:
        settling_time: Optional[float] = float(traj.times[0])
    elif outside[-1] == len(y) - 1:
        settling_time = None
    else:
        settling_time = float(traj.times[outside[-1] + 1])

    return StepMetrics(
        final_value=float(y[-1]),
        target=float(target),
        peak=peak,
        peak_time=float(traj.times[peak_idx]),
        overshoot=max(0.0, peak - target),
        undershoot=max(0.0, float(y[0] - np.min(y))),
        settling_time=settling_time,
        band=band,
        in_band=bool(abs(y[-1] - target) <= band),
    )


def open_loop_config(preheat: float, ambient: float, dt: float = DEFAULT_DT,
                     t_final: float = DEFAULT_T_FINAL, method: str = "exact") -> SimConfig:
    """Preheated air and wall, food at ambient, input held at the preheat temperature."""
    return SimConfig(x0=(preheat, preheat, ambient), u_ref=preheat, dt=dt, t_final=t_final, method=method)


def initial_estimate(preheat: float, ambient: float,
                     observer_init: Union[str, Sequence[float]] = "plant") -> tuple[float, ...]:
    """Observer starting estimate: the plant state, all-ambient, or explicit values."""
    if isinstance(observer_init, str):
        if observer_init == "plant":
            return (preheat, preheat, ambient)
        if observer_init == "ambient":
            return (ambient, ambient, ambient)
        raise SimulationError(f"unknown observer_init '{observer_init}', expected one of {OBSERVER_INIT_MODES}")
    values = tuple(float(v) for v in observer_init)
    if len(values) != 3:
        raise SimulationError(f"observer estimate needs 3 values, got {len(values)}")
    return values


def closed_loop_config(loop: ClosedLoop, target: float, preheat: float, ambient: float,
                       observer_init: Union[str, Sequence[float]] = "plant", dt: float = DEFAULT_DT,
                       t_final: float = DEFAULT_T_FINAL, method: str = "exact") -> SimConfig:
    """
    Closed-loop run in (x, e) coordinates with ``u = N r``.

    The plant starts at (preheat, preheat, ambient); the estimation error is the
    plant state minus the observer's initial estimate.
    """
    x0 = np.array([preheat, preheat, ambient], dtype=float)
    e0 = x0 - np.array(initial_estimate(preheat, ambient, observer_init))
    return SimConfig(
        x0=tuple(np.concatenate([x0, e0])),
        u_ref=loop.gains.n_ff * target,
        dt=dt,
        t_final=t_final,
        method=method,
    )
