"""Observer-based state-feedback design by pole placement."""
import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from ovenctl.core.eigen import eigenvalues
from ovenctl.core.linalg import (
    NumericalError,
    Spectrum,
    _pair_conjugates,
    as_matrix,
    controllability_matrix,
    observability_matrix,
    poly_from_roots,
    rank,
    solve,
)
from ovenctl.services.plant import StateSpace, UnknownPreset

logger = logging.getLogger(__name__)

OBSERVER_SPEED_RATIO = 5.0
ILL_CONDITIONED_RESIDUAL = 1e-6
DC_GAIN_TOL = 1e-12


class DesignError(Exception):
    """Base exception for controller/observer design errors."""
    pass


class Uncontrollable(DesignError):
    """Raised when the controllability matrix is rank deficient."""
    pass


class Unobservable(DesignError):
    """Raised when the observability matrix is rank deficient."""
    pass


class IllConditioned(DesignError):
    """Raised when the controllability solve leaves a large residual."""
    pass


class SingularDcGain(DesignError):
    """Raised when the closed loop has zero DC gain, so no feedforward exists."""
    pass


class DimensionMismatch(DesignError):
    """Raised when plant and gain shapes disagree."""
    pass


class InvalidPoleSet(DesignError):
    """Raised when requested poles are unstable or not closed under conjugation."""
    pass


def _as_poles(values: Iterable[complex]) -> tuple[complex, ...]:
    return tuple(complex(v) for v in values)


@dataclass(frozen=True)
class PoleSet:
    controller: tuple[complex, ...]
    observer: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "controller", _as_poles(self.controller))
        object.__setattr__(self, "observer", _as_poles(self.observer))
        for label, poles in (("controller", self.controller), ("observer", self.observer)):
            if not poles:
                raise InvalidPoleSet(f"{label} pole set is empty")
            unstable = [p for p in poles if not p.real < 0]
            if unstable:
                raise InvalidPoleSet(f"{label} poles must have negative real parts: {unstable}")
            try:
                _pair_conjugates(poles)
            except NumericalError as e:
                raise InvalidPoleSet(f"{label} poles: {e}") from e

    def scaled(self, factor: float) -> "PoleSet":
        """Both pole sets moved radially by ``factor`` (> 0)."""
        if not factor > 0:
            raise InvalidPoleSet(f"pole scale factor must be positive, got {factor}")
        return PoleSet(tuple(factor * p for p in self.controller), tuple(factor * p for p in self.observer))

    def guideline_warnings(self) -> list[str]:
        """
        Soft design rules: each observer pole (ordered by |Re|) should be at least
        five times faster than the matching controller pole, and no pole should repeat.
        """
        warnings = []
        ctrl = sorted(abs(p.real) for p in self.controller)
        obs = sorted(abs(p.real) for p in self.observer)
        for c, o in zip(ctrl, obs):
            if o < OBSERVER_SPEED_RATIO * c * (1.0 - 1e-9):
                warnings.append(f"observer pole |Re|={o:.4g} is less than {OBSERVER_SPEED_RATIO:g}x "
                                f"controller pole |Re|={c:.4g}")
        everything = list(self.controller) + list(self.observer)
        for i, p in enumerate(everything):
            if any(abs(p - q) <= 1e-12 * max(1.0, abs(p)) for q in everything[i + 1:]):
                warnings.append(f"pole {p} is requested more than once")
        return warnings


_TABLE_POLES: dict[str, PoleSet] = {
    "steak": PoleSet((-39.0, -0.1, -1.0), (-195.0, -0.5, -5.0)),
    "chicken": PoleSet((-27.0, -0.1, -1.0), (-135.0, -0.5, -5.0)),
    "potato": PoleSet((-38.5, -0.05, -0.97), (-192.5, -0.25, -4.85)),
}
_DEFAULT_HORIZON = {"steak": 100.0, "chicken": 100.0, "potato": 200.0}


def default_poles(food: str) -> PoleSet:
    """Tabulated controller and observer poles for a preset food."""
    key = food.strip().lower()
    if key not in _TABLE_POLES:
        raise UnknownPreset(food)
    return _TABLE_POLES[key]


def default_horizon(food: str) -> float:
    """Simulation horizon long enough for the slowest tabulated pole to settle."""
    key = food.strip().lower()
    if key not in _DEFAULT_HORIZON:
        raise UnknownPreset(food)
    return _DEFAULT_HORIZON[key]


@dataclass(frozen=True)
class GainSet:
    k: np.ndarray
    l: np.ndarray
    n_ff: float = 1.0


@dataclass(frozen=True)
class ClosedLoop:
    """Plant plus observer in (state, estimation error) coordinates."""
    a_fb: np.ndarray
    b_fb: np.ndarray
    c_fb: np.ndarray
    state_labels: tuple[str, ...]
    gains: GainSet
    plant: StateSpace

    @property
    def order(self) -> int:
        return self.a_fb.shape[0]

    def plant_input(self, states: np.ndarray, reference_input: np.ndarray) -> np.ndarray:
        """Drive applied to the plant: ``N r - K x_hat`` with ``x_hat = x - e``."""
        n = self.plant.order
        x_hat = states[:, :n] - states[:, n:]
        return reference_input - x_hat @ self.gains.k.ravel()


def place(a, b, poles: Sequence[complex]) -> np.ndarray:
    """
    Single-input pole placement by Ackermann's formula.

    ``K = [0 ... 0 1] Ctrb^-1 p(A)`` where ``p`` is the monic polynomial with
    the requested roots.

    Returns:
        1 x n gain with eig(A - B K) equal to ``poles``.
    """
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    n = a.shape[0]
    if a.shape != (n, n):
        raise DimensionMismatch(f"A must be square, got {a.shape}")
    if b.shape != (n, 1):
        raise DimensionMismatch(f"only single-input placement is supported; B has shape {b.shape}")
    if len(poles) != n:
        raise DimensionMismatch(f"{len(poles)} poles requested for an order-{n} system")

    ctrb = controllability_matrix(a, b)
    ctrb_rank = rank(ctrb)
    if ctrb_rank < n:
        raise Uncontrollable(f"controllability matrix has rank {ctrb_rank} < {n}")

    e_n = np.zeros(n)
    e_n[-1] = 1.0
    try:
        row = solve(ctrb.T, e_n)
    except NumericalError as e:
        raise IllConditioned(f"controllability matrix solve failed: {e}") from e
    residual = float(np.max(np.abs(ctrb.T @ row - e_n)))
    if residual > ILL_CONDITIONED_RESIDUAL:
        raise IllConditioned(f"controllability solve residual {residual:.3e} exceeds {ILL_CONDITIONED_RESIDUAL}")

    try:
        desired = poly_from_roots(poles)
    except NumericalError as e:
        raise InvalidPoleSet(str(e)) from e
    k = (row @ desired.evaluate_matrix(a)).reshape(1, n)
    logger.debug("place: poles=%s K=%s", list(poles), k.ravel().tolist())
    return k


def observer_gain(a, c, poles: Sequence[complex]) -> np.ndarray:
    """
    Full-order observer injection gain by duality: ``L = place(A^T, C^T, poles)^T``.

    Returns:
        n x 1 gain with eig(A - L C) equal to ``poles``.
    """
    a = as_matrix(a, "A")
    c = np.atleast_2d(np.asarray(c, dtype=float))
    try:
        return place(a.T, c.T, poles).T
    except Uncontrollable as e:
        raise Unobservable(str(e).replace("controllability", "observability")) from e


def feedforward(a, b, c, k) -> float:
    """
    Reference gain ``N = -1 / (C (A - B K)^-1 B)`` giving unit closed-loop DC gain.
    """
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    c = np.atleast_2d(np.asarray(c, dtype=float))
    k = np.atleast_2d(np.asarray(k, dtype=float))
    a_cl = a - b @ k
    try:
        dc = float((c @ solve(a_cl, b))[0, 0])
    except NumericalError as e:
        raise SingularDcGain(f"A - BK is singular: {e}") from e
    if abs(dc) <= DC_GAIN_TOL:
        raise SingularDcGain("closed-loop DC gain C (A-BK)^-1 B is zero")
    return -1.0 / dc


def design(ss: StateSpace, poles: PoleSet, use_feedforward: bool = True) -> GainSet:
    """Controller gain, observer gain and (optionally) feedforward for one plant."""
    for warning in poles.guideline_warnings():
        logger.warning("Pole guideline: %s", warning)
    k = place(ss.a, ss.b, poles.controller)
    l = observer_gain(ss.a, ss.c, poles.observer)
    n_ff = feedforward(ss.a, ss.b, ss.c, k) if use_feedforward else 1.0
    return GainSet(k=k, l=l, n_ff=n_ff)


def augment(ss: StateSpace, gains: GainSet) -> ClosedLoop:
    """
    Closed loop in (x, e) coordinates::

        A_fb = [[A - B K, B K], [0, A - L C]],  B_fb = [B; 0],  C_fb = [C, 0]
    """
    n = ss.order
    k = np.atleast_2d(np.asarray(gains.k, dtype=float))
    l = np.asarray(gains.l, dtype=float).reshape(-1, 1) if np.ndim(gains.l) == 1 else np.asarray(gains.l)
    if k.shape != (1, n) or l.shape != (n, 1):
        raise DimensionMismatch(f"gains K{k.shape} L{l.shape} do not fit an order-{n} plant")

    bk = ss.b @ k
    a_fb = np.block([
        [ss.a - bk, bk],
        [np.zeros((n, n)), ss.a - l @ ss.c],
    ])
    b_fb = np.vstack([ss.b, np.zeros_like(ss.b)])
    c_fb = np.hstack([ss.c, np.zeros_like(ss.c)])
    labels = tuple(ss.state_labels) + tuple(f"e_{label}" for label in ss.state_labels)
    return ClosedLoop(
        a_fb=as_matrix(a_fb, "A_fb"),
        b_fb=as_matrix(b_fb, "B_fb"),
        c_fb=as_matrix(c_fb, "C_fb"),
        state_labels=labels,
        gains=GainSet(k=k, l=l, n_ff=gains.n_ff),
        plant=ss,
    )


@dataclass(frozen=True)
class StabilityReport:
    spectrum: Spectrum
    asymptotically_stable: bool
    controllability_rank: int
    observability_rank: int
    order: int

    @property
    def controllable(self) -> bool:
        return self.controllability_rank == self.order

    @property
    def observable(self) -> bool:
        return self.observability_rank == self.order


def analyze(ss: StateSpace) -> StabilityReport:
    """Open-loop poles, stability verdict and controllability/observability ranks."""
    spectrum = eigenvalues(ss.a)
    return StabilityReport(
        spectrum=spectrum,
        asymptotically_stable=spectrum.is_hurwitz(),
        controllability_rank=rank(controllability_matrix(ss.a, ss.b)),
        observability_rank=rank(observability_matrix(ss.a, ss.c)),
        order=ss.order,
    )


def closed_loop_spectrum(loop: ClosedLoop) -> Spectrum:
    return eigenvalues(loop.a_fb)


def parse_pole_override(values: Optional[Sequence[complex]], fallback: tuple[complex, ...]) -> tuple[complex, ...]:
    """Use ``values`` when given, otherwise the tabulated poles."""
    return _as_poles(values) if values else fallback
