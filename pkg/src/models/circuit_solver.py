"""
Punto de operación de la red serie: fuente -> interruptor -> R_C -> RRAM -> R_S.
"""
import logging
from dataclasses import dataclass, replace
from typing import NamedTuple

from scipy import optimize

from src.models.device_model import DeviceParams, Load, total_current
from src.utils.errors import DeviceDomainError, SolverError

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class SeriesNetwork:
    """
    Resistencias lineales de una rama.

    r_s: resistencia de detección; su caída V_A = I·R_S dispara los eventos
    r_c_active: valor de R_C cuando el MSB del Registro 1 vale 0
    r_c_is_short: R_C en cortocircuito (MSB = 1)
    switch_closed: estado de S1/S2
    """

    r_s: float = 50.0
    r_c_active: float = 0.0
    r_c_is_short: bool = True
    switch_closed: bool = True

    def __post_init__(self):
        if not self.r_s > 0:
            raise ValueError("r_s debe ser positiva")
        if not self.r_c_active >= 0:
            raise ValueError("r_c_active no puede ser negativa")

    @property
    def r_total(self) -> float:
        return self.r_s + (0.0 if self.r_c_is_short else self.r_c_active)

    def with_state(self, r_c_is_short: bool = None, switch_closed: bool = None) -> "SeriesNetwork":
        changes = {}
        if r_c_is_short is not None:
            changes["r_c_is_short"] = bool(r_c_is_short)
        if switch_closed is not None:
            changes["switch_closed"] = bool(switch_closed)
        return replace(self, **changes) if changes else self


class OperatingPoint(NamedTuple):
    v_device: float
    current: float
    v_a: float


_OPEN = OperatingPoint(0.0, 0.0, 0.0)


def solve_operating_point(v_in: float, t: float, net: SeriesNetwork, p: DeviceParams) -> OperatingPoint:
    """
    Reparte la tensión aplicada entre el dispositivo y las resistencias serie.

    Resuelve v_in = i·R_total + v_device con i = total_current(v_device, t)
    por bisección con corchete (brentq); el residuo es monótono en v_device.

    Args:
        v_in: magnitud de la tensión aplicada [V]
        t: temperatura del dispositivo [K]
        net: red serie
        p: parámetros del dispositivo

    Returns:
        OperatingPoint(v_device, current, v_a)
    """
    if not v_in >= 0:
        raise DeviceDomainError(f"v_in debe ser una magnitud no negativa (recibido {v_in})")
    if not net.switch_closed or v_in == 0:
        return _OPEN
    r_total = net.r_total

    def residual(v_dev: float) -> float:
        return v_in - float(total_current(v_dev, t, p)) * r_total - v_dev

    try:
        v_dev = optimize.brentq(residual, 0.0, v_in, xtol=1e-15, maxiter=200)
    except (RuntimeError, ValueError) as e:
        raise SolverError(f"Sin convergencia del punto de operación (v_in={v_in} V, T={t} K): {e}") from e

    res = abs(residual(v_dev))
    if res > RESIDUAL_TOL * max(1.0, v_in):
        raise SolverError(f"Residuo {res:.3e} V fuera de tolerancia (v_in={v_in} V, T={t} K)")
    current = float(total_current(v_dev, t, p))
    return OperatingPoint(v_dev, current, current * net.r_s)


def network_load(v_in: float, net: SeriesNetwork, p: DeviceParams) -> Load:
    """Adaptador temperatura -> (v_device, corriente) para una rama serie."""
    v_in = abs(float(v_in))

    def load(t: float):
        op = solve_operating_point(v_in, t, net, p)
        return op.v_device, op.current

    return load
