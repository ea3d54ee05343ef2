"""
Análisis de escalado: constante de tiempo RC frente a la electrotérmica, y estimación de área en F².
"""
import logging
from dataclasses import asdict, dataclass
from typing import Dict, Optional

import numpy as np
import pandas as pd
from scipy import constants

from src.models.device_model import DeviceParams, runaway_threshold, steady_state_temperature
from src.models.integrator import IntegratorSettings

logger = logging.getLogger(__name__)

eps0 = constants.epsilon_0

# Área por transistor [F²]
F2_PER_TRANSISTOR = 100

# Coste en transistores por componente (convención de informe)
TRANSISTOR_COSTS: Dict[str, int] = {
    "flip_flop": 18,
    "or_gate": 6,
    "switch": 1,
    "resistor": 3,
    "comparator": 0,
}

# Periferia de la neurona: registro de 6 bits (Registro 1 + Registro 2), OR, S1/S2, R_C y detectores
NEURON_COMPONENTS: Dict[str, int] = {
    "flip_flop": 6,
    "or_gate": 1,
    "switch": 2,
    "resistor": 1,
    "comparator": 2,
}


@dataclass(frozen=True)
class ScalingInputs:
    """Magnitudes de las dos constantes de tiempo (SI)."""

    eps_r: float = 3.9
    d: float = 2e-9            # m
    v: float = 1.0             # V
    j_d: float = 1e8           # A/m² (10 mA / 100 μm²)
    c_v: float = 5e5           # J/(K·m³)
    delta_t: float = 100.0     # K
    length: float = 65e-9      # m

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"ScalingInputs.{name} debe ser finito y positivo (recibido {value})")

    @classmethod
    def from_device(cls, p: DeviceParams, delta_t: Optional[float] = None,
                    settings: Optional[IntegratorSettings] = None, **overrides) -> "ScalingInputs":
        """
        Entradas derivadas del dispositivo: c_v = C_th/(A·L), j_d = I_compliance/A.

        Si `delta_t` es None se usa el salto de temperatura en el inicio del embalamiento.
        """
        if delta_t is None:
            delta_t = runaway_onset_delta_t(p, settings)
        values = dict(c_v=volumetric_heat_capacity(p), j_d=p.i_compliance / p.area,
                      length=p.length, delta_t=delta_t)
        values.update(overrides)
        return cls(**values)


def capacitance(eps_r: float, d: float, area: float) -> float:
    """Capacidad de placas paralelas ε0·ε_r·A/d [F]."""
    return eps0 * eps_r * area / d


def volumetric_heat_capacity(p: DeviceParams) -> float:
    return p.c_th / (p.area * p.length)


def tau_rc(inp: ScalingInputs) -> float:
    """τ_RC = ε0·ε_r·V/(d·J_D); el área se cancela."""
    return eps0 * inp.eps_r * inp.v / (inp.d * inp.j_d)


def tau_th(inp: ScalingInputs) -> float:
    """τ_th = c_v·L·ΔT/(V·J_D); el área se cancela, el espesor no."""
    return inp.c_v * inp.length * inp.delta_t / (inp.v * inp.j_d)


def tau_rc_for_area(inp: ScalingInputs, area: float) -> float:
    """Forma con área explícita: C·V/I."""
    return capacitance(inp.eps_r, inp.d, area) * inp.v / (inp.j_d * area)


def tau_th_for_area(inp: ScalingInputs, area: float) -> float:
    """Forma con área explícita: C_th·ΔT/(I·V) con C_th = c_v·A·L."""
    return inp.c_v * area * inp.length * inp.delta_t / (inp.j_d * area * inp.v)


def timescale_ratio(inp: ScalingInputs) -> float:
    """τ_th/τ_RC = c_v·L·ΔT·d/(ε0·ε_r·V²)."""
    return inp.c_v * inp.length * inp.delta_t * inp.d / (eps0 * inp.eps_r * inp.v ** 2)


def runaway_onset_delta_t(p: DeviceParams, settings: Optional[IntegratorSettings] = None,
                          margin: float = 1e-4) -> float:
    """Elevación de temperatura estacionaria justo por debajo del umbral de embalamiento [K]."""
    v_run = runaway_threshold(p, settings)
    if v_run is None:
        raise ValueError("El dispositivo no presenta embalamiento térmico en el rango explorado")
    t_ss = steady_state_temperature(v_run * (1 - margin), p, settings)
    logger.debug(f"Embalamiento a {v_run:.4f} V, T estacionaria previa {t_ss:.1f} K")
    return float(t_ss - p.t_amb)


def estimate_area(transistor_count: int) -> int:
    """Área estimada en F² (100 F² por transistor)."""
    if transistor_count < 0:
        raise ValueError("El número de transistores no puede ser negativo")
    return int(transistor_count) * F2_PER_TRANSISTOR


def transistor_budget(components: Optional[Dict[str, int]] = None,
                      costs: Optional[Dict[str, int]] = None) -> pd.DataFrame:
    """Desglose de transistores por componente; la última fila es el total."""
    components = components or NEURON_COMPONENTS
    costs = costs or TRANSISTOR_COSTS
    rows = [{'component': name, 'count': count, 'transistors_each': costs[name],
             'transistors': count * costs[name]} for name, count in components.items()]
    frame = pd.DataFrame(rows)
    total = {'component': 'total', 'count': int(frame['count'].sum()), 'transistors_each': np.nan,
             'transistors': int(frame['transistors'].sum())}
    return pd.concat([frame, pd.DataFrame([total])], ignore_index=True)


def comparison_table(inp: ScalingInputs, area: float = 100e-12) -> pd.DataFrame:
    """Fila "This Work" de la tabla comparativa junto a las constantes de tiempo calculadas."""
    count = int(transistor_budget()['transistors'].iloc[-1])
    row = {
        'work': 'This Work',
        'device': 'PMO RRAM',
        'neuron_model': 'LIF (electrotérmico)',
        'spiking_patterns': 'RS, IB, CH',
        'transistor_count': count,
        'area_f2': estimate_area(count),
        'capacitance_f': capacitance(inp.eps_r, inp.d, area),
        'tau_rc_s': tau_rc(inp),
        'tau_th_s': tau_th(inp),
        'tau_ratio': timescale_ratio(inp),
    }
    return pd.DataFrame([row])
