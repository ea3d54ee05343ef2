"""
Modelo electrotérmico analítico de la RRAM de PrMnO3 (PMO).

Corriente óhmica + SCLC en función de tensión y temperatura, balance térmico
concentrado (R_th, C_th) y el lazo autoconsistente corriente-temperatura.
Todas las magnitudes internas están en SI; la tensión se trata en magnitud.

Las funciones de corriente admiten arrays de numpy (broadcasting normal).
"""
import logging
from dataclasses import asdict, dataclass, replace
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from scipy import constants, integrate, optimize

from src.models.integrator import AdaptiveStepper, IntegratorSettings
from src.utils.errors import DeviceDomainError, IntegrationError, SolverError

logger = logging.getLogger(__name__)

# Constantes universales (no configurables)
q = constants.elementary_charge
kB = constants.Boltzmann
eps0 = constants.epsilon_0

# Tolerancia relativa al comparar contra un umbral de corriente / V_A
DETECTION_RTOL = 1e-9

# Techo del barrido de temperatura [K]
T_SCAN_MAX = 3000.0

# Clave de configuración -> (campo SI, factor de conversión)
TABLE_UNIT_KEYS: Dict[str, Tuple[str, float]] = {
    "mu_cm2_per_vs": ("mu", 1e-4),
    "phi_b_ev": ("phi_b", 1.0),
    "eps_pmo": ("eps_pmo", 1.0),
    "n_v_per_cm3": ("n_v", 1e6),
    "e_trap_ev": ("e_trap", 1.0),
    "n_t_per_cm3": ("n_t", 1e6),
    "length_nm": ("length", 1e-9),
    "area_um2": ("area", 1e-12),
    "t_amb_k": ("t_amb", 1.0),
    "r_th_k_per_w": ("r_th", 1.0),
    "c_th_pj_per_k": ("c_th", 1e-12),
    "i_compliance_ma": ("i_compliance", 1e-3),
}


@dataclass(frozen=True)
class DeviceParams:
    """Constantes físicas y térmicas del apilamiento PMO (SI)."""

    mu: float = 17.5e-4            # m²/(V·s)
    phi_b: float = 0.3151          # eV
    eps_pmo: float = 30.0
    n_v: float = 8.16e25           # m⁻³
    e_trap: float = 0.06           # eV
    n_t: float = 3.15e27           # m⁻³
    length: float = 65e-9          # m
    area: float = 100e-12          # m² (10 μm × 10 μm)
    t_amb: float = 300.0           # K
    r_th: float = 3e4              # K/W
    c_th: float = 3.25e-12         # J/K
    i_compliance: float = 10e-3    # A

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not (np.isfinite(value) and value > 0):
                raise DeviceDomainError(f"DeviceParams.{name} debe ser finito y positivo (recibido {value})")

    @property
    def tau_th(self) -> float:
        """Constante de tiempo térmica R_th·C_th [s]."""
        return self.r_th * self.c_th

    @classmethod
    def from_table_units(cls, **values: float) -> "DeviceParams":
        """
        Construye parámetros a partir de unidades de tabla (cm²/Vs, cm⁻³, nm, μm², pJ/K, mA).

        Args:
            **values: claves de TABLE_UNIT_KEYS; las ausentes toman el valor por defecto

        Returns:
            DeviceParams en SI
        """
        converted = {}
        for key, value in values.items():
            if key not in TABLE_UNIT_KEYS:
                raise KeyError(f"Clave de dispositivo desconocida: {key}")
            name, factor = TABLE_UNIT_KEYS[key]
            converted[name] = float(value) * factor
        return cls(**converted)

    def to_table_units(self) -> Dict[str, float]:
        """Inverso de from_table_units."""
        return {key: getattr(self, name) / factor for key, (name, factor) in TABLE_UNIT_KEYS.items()}

    def with_values(self, **changes: float) -> "DeviceParams":
        return replace(self, **changes)


NOMINAL_PARAMS = DeviceParams()

# Con los valores SI de la tabla los tiempos de disparo caen en 20-90 ns
# entre 2.4 V y 1.5 V; el tiempo de disparo escala exactamente con C_th.
CALIBRATED_C_TH = 24e-12


def calibrated_thermal_params(base: DeviceParams = NOMINAL_PARAMS) -> DeviceParams:
    """Preset con C_th ajustada a la década 100 ns - 1 μs de tiempos de disparo."""
    return replace(base, c_th=CALIBRATED_C_TH)


# Dispositivo de integración ajustado a los anclajes 537 kHz (1.6 V) y 754 kHz (1.8 V)
# con R_S = 50 Ω y un periodo refractario de 700 ns.
INTEGRATION_R_TH = 16e3
INTEGRATION_C_TH = 32e-12

# Dispositivo refractario rápido (τ = 19.5 ns): llega frío a cada reconexión
REFRACTORY_C_TH = 0.65e-12


def integration_params(base: DeviceParams = NOMINAL_PARAMS) -> DeviceParams:
    """Preset térmico del dispositivo del bloque de integración (ciclo límite estable)."""
    return replace(base, r_th=INTEGRATION_R_TH, c_th=INTEGRATION_C_TH)


def refractory_params(base: DeviceParams = NOMINAL_PARAMS) -> DeviceParams:
    """Preset térmico del dispositivo del bloque refractario."""
    return replace(base, c_th=REFRACTORY_C_TH)


@dataclass(frozen=True)
class DeviceState:
    """Temperatura efectiva, última corriente resuelta y tiempo de simulación."""

    temperature: float
    current: float = 0.0
    time: float = 0.0


def _check_inputs(v, t):
    v_arr = np.asarray(v, dtype=float)
    t_arr = np.asarray(t, dtype=float)
    if not (np.all(np.isfinite(v_arr)) and np.all(np.isfinite(t_arr))):
        raise DeviceDomainError("Tensión o temperatura no finita")
    if np.any(v_arr < 0):
        raise DeviceDomainError("El modelo opera sobre la magnitud de la tensión (v >= 0)")
    if np.any(t_arr <= 0):
        raise DeviceDomainError("La temperatura debe ser positiva")


def _thermal_factor(t, p: DeviceParams):
    return (np.asarray(t, dtype=float) / p.t_amb) ** 1.5


def ohmic_current(v, t, p: DeviceParams):
    """
    Corriente óhmica activada térmicamente.

    I = q·A·μ·N_v·(T/T_amb)^{3/2}·exp(−qΦ_B/kT)·(V/L)
    """
    _check_inputs(v, t)
    return (q * p.area * p.mu * p.n_v * _thermal_factor(t, p)
            * np.exp(-q * p.phi_b / (kB * np.asarray(t, dtype=float))) * (np.asarray(v, dtype=float) / p.length))


def sclc_current(v, t, p: DeviceParams):
    """
    Corriente limitada por carga espacial con trampas.

    I = A·μ·ε0·ε_PMO·(N_v/N_T)·(T/T_amb)^{3/2}·exp(−qE_trap/kT)·(V²/L³)
    """
    _check_inputs(v, t)
    v = np.asarray(v, dtype=float)
    return (p.area * p.mu * eps0 * p.eps_pmo * (p.n_v / p.n_t) * _thermal_factor(t, p)
            * np.exp(-q * p.e_trap / (kB * np.asarray(t, dtype=float))) * (v ** 2 / p.length ** 3))


def total_current(v, t, p: DeviceParams, clamp: bool = True):
    """
    Suma óhmica + SCLC, recortada a la corriente de compliance.

    Args:
        v: magnitud de tensión [V]
        t: temperatura [K]
        p: parámetros del dispositivo
        clamp: si False devuelve la suma sin recortar

    Returns:
        Corriente [A]
    """
    current = ohmic_current(v, t, p) + sclc_current(v, t, p)
    if clamp:
        return np.minimum(current, p.i_compliance)
    return current


def temperature_derivative(t, power, p: DeviceParams):
    """dT/dt = (P − (T − T_amb)/R_th) / C_th."""
    t = np.asarray(t, dtype=float)
    power = np.asarray(power, dtype=float)
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(power))):
        raise DeviceDomainError("Temperatura o potencia no finita")
    return (power - (t - p.t_amb) / p.r_th) / p.c_th


# Una "carga" devuelve (tensión en el dispositivo, corriente) para una temperatura.
Load = Callable[[float], Tuple[float, float]]


def bare_load(v: float, p: DeviceParams) -> Load:
    """Dispositivo aislado a tensión constante."""
    v = abs(float(v))

    def load(t: float) -> Tuple[float, float]:
        return v, float(total_current(v, t, p))

    return load


def _net_heating(load: Load, t: float, p: DeviceParams) -> float:
    v_dev, current = load(t)
    return v_dev * current - (t - p.t_amb) / p.r_th


def threshold_temperature(load: Load, threshold: float, t_lo: float,
                             t_hi: float = T_SCAN_MAX) -> Optional[float]:
    """Temperatura a la que la corriente de la carga alcanza `threshold` (None si nunca)."""
    f_lo = load(t_lo)[1] - threshold
    if f_lo >= 0:
        return t_lo
    if load(t_hi)[1] - threshold < 0:
        return None
    try:
        return optimize.brentq(lambda t: load(t)[1] - threshold, t_lo, t_hi, xtol=1e-9)
    except (RuntimeError, ValueError) as e:
        raise SolverError(f"No converge la búsqueda de temperatura de umbral: {e}") from e


def first_stable_point(load: Load, p: DeviceParams, t_lo: float, t_hi: float,
                       resolution: float = 0.5) -> Optional[float]:
    """
    Primer punto fijo estable de dT/dt = 0 a partir de `t_lo` (barrido + brentq).

    Si el calentamiento neto en `t_lo` no es positivo, la temperatura no sube
    y se devuelve `t_lo`.

    Returns:
        Temperatura del punto fijo, o None si no hay ninguno hasta `t_hi`
    """
    g_prev = _net_heating(load, t_lo, p)
    if g_prev <= 0:
        return t_lo
    grid = np.arange(t_lo + resolution, t_hi, resolution).tolist() + [t_hi]
    t_prev = t_lo
    for t in grid:
        g = _net_heating(load, t, p)
        if g <= 0:
            if g == 0:
                return t
            try:
                return optimize.brentq(lambda x: _net_heating(load, x, p), t_prev, t, xtol=1e-9)
            except (RuntimeError, ValueError) as e:
                raise SolverError(f"No converge la búsqueda de punto fijo: {e}") from e
        t_prev = t
    return None


def steady_state_temperature(v: float, p: DeviceParams,
                             settings: Optional[IntegratorSettings] = None) -> Optional[float]:
    """
    Menor punto fijo estable de I(v,T)·v = (T − T_amb)/R_th por debajo del régimen de compliance.

    Args:
        v: magnitud de tensión [V]
        p: parámetros del dispositivo
        settings: resolución del barrido

    Returns:
        Temperatura estacionaria [K], o None si hay embalamiento térmico
    """
    settings = settings or IntegratorSettings()
    _check_inputs(v, p.t_amb)
    if v == 0:
        return p.t_amb
    load = bare_load(v, p)
    t_clamp = threshold_temperature(lambda t: (v, float(total_current(v, t, p, clamp=False))),
                                       p.i_compliance, p.t_amb)
    if t_clamp is None:
        t_clamp = T_SCAN_MAX
    elif t_clamp <= p.t_amb:
        return None
    return first_stable_point(load, p, p.t_amb, t_clamp, settings.scan_resolution)


def runaway_threshold(p: DeviceParams, settings: Optional[IntegratorSettings] = None,
                      v_max: float = 5.0, tol: float = 1e-6) -> Optional[float]:
    """
    Tensión mínima sin punto fijo estable (umbral de embalamiento).

    Returns:
        Umbral [V], o None si hasta `v_max` siempre existe un estado estacionario
    """
    settings = settings or IntegratorSettings()
    if steady_state_temperature(v_max, p, settings) is not None:
        return None
    lo, hi = 0.0, v_max
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if steady_state_temperature(mid, p, settings) is None:
            hi = mid
        else:
            lo = mid
    logger.debug(f"Umbral de embalamiento: {hi:.6f} V")
    return hi


@dataclass
class ThermalRun:
    """Resultado de integrar un dispositivo a tensión constante."""

    state: DeviceState
    times: np.ndarray
    temperatures: np.ndarray
    currents: np.ndarray
    energy_in: float = 0.0      # ∫ I·V dt [J]
    energy_loss: float = 0.0    # ∫ (T − T_amb)/R_th dt [J]
    accepted_steps: int = 0
    rejected_steps: int = 0


def _thermal_rhs(load: Load, p: DeviceParams):
    def rhs(_t: float, y: np.ndarray) -> np.ndarray:
        v_dev, current = load(y[0])
        power = v_dev * current
        loss = (y[0] - p.t_amb) / p.r_th
        return np.array([(power - loss) / p.c_th, power, loss])

    return rhs


def run_constant_voltage(state: DeviceState, v: float, duration: float, p: DeviceParams,
                         settings: Optional[IntegratorSettings] = None) -> ThermalRun:
    """
    Integra la ec. térmica con I = total_current(v, T) durante `duration`.

    Args:
        state: estado inicial
        v: magnitud de tensión [V]
        duration: intervalo a integrar [s]
        p: parámetros del dispositivo
        settings: integrador

    Returns:
        ThermalRun con la trayectoria y el balance energético
    """
    settings = settings or IntegratorSettings()
    _check_inputs(v, state.temperature)
    if not duration > 0:
        raise DeviceDomainError("La duración debe ser positiva")
    load = bare_load(v, p)
    stepper = AdaptiveStepper(_thermal_rhs(load, p), settings, capped=[0])
    t_end = state.time + duration
    t, y, h = state.time, np.array([state.temperature, 0.0, 0.0]), settings.initial_step
    times, temps, currents = [t], [y[0]], [load(y[0])[1]]
    while t_end - t > 1e-9 * settings.min_step:
        t, y, _, h = stepper.advance(t, y, h, t_end - t)
        times.append(t)
        temps.append(y[0])
        currents.append(load(y[0])[1])
    final = DeviceState(temperature=float(y[0]), current=float(currents[-1]), time=t_end)
    return ThermalRun(state=final, times=np.array(times), temperatures=np.array(temps),
                      currents=np.array(currents), energy_in=float(y[1]), energy_loss=float(y[2]),
                      accepted_steps=stepper.accepted, rejected_steps=stepper.rejected)


def step_state(state: DeviceState, v: float, dt_max: float, p: DeviceParams,
               settings: Optional[IntegratorSettings] = None) -> DeviceState:
    """Avanza el estado `dt_max` segundos bajo tensión constante."""
    return run_constant_voltage(state, v, dt_max, p, settings).state


def time_to_current(load: Load, p: DeviceParams, t0: float, i_stop: float,
                    settings: Optional[IntegratorSettings] = None) -> Optional[float]:
    """
    Tiempo hasta que la corriente de la carga alcanza `i_stop` partiendo de T = t0.

    Primero se comprueba la estructura de puntos fijos: si la temperatura
    converge a un estado estable antes de alcanzar el umbral, no hay disparo.

    Returns:
        Tiempo [s] o None si no dispara
    """
    settings = settings or IntegratorSettings()
    threshold = i_stop * (1 - DETECTION_RTOL)
    t_stop = threshold_temperature(load, threshold, t0)
    if t_stop is None:
        return None
    if t_stop <= t0:
        return 0.0
    if first_stable_point(load, p, t0, t_stop, settings.scan_resolution) is not None:
        return None

    stepper = AdaptiveStepper(_thermal_rhs(load, p), settings, capped=[0])

    def crossed(_t: float, y: np.ndarray) -> bool:
        return load(y[0])[1] >= threshold

    t, y, h = 0.0, np.array([t0, 0.0, 0.0]), settings.initial_step
    while t < settings.max_time:
        t_new, y_new, h_used, h = stepper.advance(t, y, h, settings.max_time - t)
        if crossed(t_new, y_new):
            dh, _ = stepper.locate(t, y, h_used, crossed)
            return t + dh
        t, y = t_new, y_new
    raise IntegrationError(f"No se alcanzó la corriente {i_stop:.3e} A en {settings.max_time:.1e} s")


def time_to_current_quadrature(load: Load, p: DeviceParams, t0: float, i_stop: float,
                               settings: Optional[IntegratorSettings] = None) -> Optional[float]:
    """
    Igual que time_to_current pero por cuadratura: t = C_th ∫ dT / g(T).

    Exacto para la EDO autónoma de una variable; se usa en calibración.
    """
    settings = settings or IntegratorSettings()
    threshold = i_stop * (1 - DETECTION_RTOL)
    t_stop = threshold_temperature(load, threshold, t0)
    if t_stop is None:
        return None
    if t_stop <= t0:
        return 0.0
    if first_stable_point(load, p, t0, t_stop, settings.scan_resolution) is not None:
        return None
    value, _ = integrate.quad(lambda t: 1.0 / _net_heating(load, t, p), t0, t_stop,
                              limit=200, epsrel=1e-10, epsabs=0.0)
    return p.c_th * value


def spike_time(v: float, p: DeviceParams, t0: Optional[float] = None,
               settings: Optional[IntegratorSettings] = None,
               method: str = "integrate") -> Optional[float]:
    """
    Tiempo hasta alcanzar la corriente de compliance bajo tensión constante.

    Args:
        v: magnitud de tensión [V]
        p: parámetros del dispositivo
        t0: temperatura inicial (por defecto T_amb)
        settings: integrador
        method: 'integrate' (paso adaptativo) o 'quadrature'

    Returns:
        Tiempo de disparo [s], o None si se alcanza un estado estable (sub-umbral)
    """
    t0 = p.t_amb if t0 is None else float(t0)
    _check_inputs(v, t0)
    if t0 < p.t_amb:
        raise DeviceDomainError("La temperatura inicial no puede ser menor que T_amb")
    load = bare_load(v, p)
    if method == "integrate":
        return time_to_current(load, p, t0, p.i_compliance, settings)
    if method == "quadrature":
        return time_to_current_quadrature(load, p, t0, p.i_compliance, settings)
    raise ValueError(f"Método desconocido: {method}")
