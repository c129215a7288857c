"""Natural-convection heat transfer between oven air and an isothermal flat surface."""
import logging
from dataclasses import dataclass

logger = logging.getLogger(__name__)

GRAVITY_FT_S2 = 32.174
GRASHOF_TRANSITION = 1e9


class HeatTransferError(Exception):
    """Base exception for heat-transfer estimation errors."""
    pass


class InvalidGeometry(HeatTransferError):
    """Raised when a characteristic length is not strictly positive."""
    pass


class CorrelationDomain(HeatTransferError):
    """Raised when a correlation is evaluated outside the range where it is real-valued."""
    pass


@dataclass(frozen=True)
class AirProperties:
    """Air properties in the units the oven model is calibrated with."""
    cp: float    # Btu/(lb F)
    rho: float   # lb/ft^3
    k: float     # Btu/(ft s F)
    beta: float  # 1/F
    mu: float    # lbf s/ft^2
    g: float = GRAVITY_FT_S2

    def __post_init__(self):
        for field_name in ("cp", "rho", "k", "beta", "mu", "g"):
            if not getattr(self, field_name) > 0:
                raise ValueError(f"AirProperties.{field_name} must be positive")


# Oven air at the modelling temperature, taken verbatim.
OVEN_AIR = AirProperties(cp=7.731, rho=2.284e-3, k=4.233e-6, beta=1.87e-3, mu=3.852e-7)


@dataclass(frozen=True)
class DimensionlessGroup:
    gr: float
    pr: float
    nu: float


@dataclass(frozen=True)
class ConvectionExchange:
    """One convective exchange h A (T_i - T_j)."""
    h: float
    area: float
    t_i: float
    t_j: float

    @property
    def q_rate(self) -> float:
        return conv_heat_rate(self.h, self.area, self.t_i, self.t_j)


def _check_length(d: float):
    if not d > 0:
        raise InvalidGeometry(f"characteristic length must be positive, got {d}")


def grashof(props: AirProperties, d: float, delta_t: float) -> float:
    """Grashof number D^3 rho^2 g dT beta / mu^2."""
    _check_length(d)
    if delta_t < 0:
        raise ValueError(f"temperature difference must be non-negative, got {delta_t}")
    return d ** 3 * props.rho ** 2 * props.g * delta_t * props.beta / props.mu ** 2


def prandtl(props: AirProperties) -> float:
    """Prandtl number mu cp / k."""
    return props.mu * props.cp / props.k


def nusselt(gr: float, pr: float) -> float:
    """
    Average Nusselt number for natural convection from a flat surface.

    Gr above 1e9 uses ``0.138 Gr^0.36 (Pr^0.175 - 0.55)^0.25``; Gr up to and
    including 1e9 uses ``0.683 Gr^0.25 Pr^0.25 (Pr / (0.861 + Pr))^0.25``.
    The two branches are not continuous at the transition.
    """
    if gr < 0:
        raise ValueError(f"Grashof number must be non-negative, got {gr}")
    if not pr > 0:
        raise ValueError(f"Prandtl number must be positive, got {pr}")

    if gr > GRASHOF_TRANSITION:
        base = pr ** 0.175 - 0.55
        if base <= 0:
            raise CorrelationDomain(
                f"Pr={pr:.4g} gives Pr^0.175 - 0.55 = {base:.4g} <= 0 in the turbulent correlation"
            )
        return 0.138 * gr ** 0.36 * base ** 0.25

    return 0.683 * gr ** 0.25 * pr ** 0.25 * (pr / (0.861 + pr)) ** 0.25


def htc(nu: float, k: float, d: float) -> float:
    """Heat transfer coefficient Nu k / D."""
    _check_length(d)
    return nu * k / d


def conv_heat_rate(h: float, area: float, t_i: float, t_j: float) -> float:
    """Heat rate h A (T_i - T_j); positive when heat flows from i to j."""
    return h * area * (t_i - t_j)


def derive_htc(props: AirProperties, d: float, delta_t: float) -> tuple[DimensionlessGroup, float]:
    """
    Run the full Gr -> Pr -> Nu -> h pipeline for one surface.

    Returns:
        The dimensionless groups and the resulting coefficient.
    """
    gr = grashof(props, d, delta_t)
    pr = prandtl(props)
    nu = nusselt(gr, pr)
    h = htc(nu, props.k, d)
    logger.debug("derive_htc: D=%.3g dT=%.3g Gr=%.4g Pr=%.4g Nu=%.4g h=%.4g", d, delta_t, gr, pr, nu, h)
    return DimensionlessGroup(gr=gr, pr=pr, nu=nu), h
