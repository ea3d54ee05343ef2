"""
Neurona electrotérmica asíncrona: bloque de integración, bloque refractario y bloque de conmutación.

Cada bloque es una rama (interruptor + R_C + RRAM + R_S). El Registro 2
decide qué rama está conectada; el Registro 1 fija R_C de la rama de
integración. Todas las transiciones las dispara el cruce de V_A por el
umbral de detección: no hay reloj global.
"""
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np
import pandas as pd
from scipy import optimize

from src.models.circuit_solver import SeriesNetwork, network_load, solve_operating_point
from src.models.device_model import (
    DETECTION_RTOL,
    DeviceParams,
    integration_params,
    refractory_params,
    threshold_temperature,
    time_to_current,
    time_to_current_quadrature,
    total_current,
)
from src.models.integrator import AdaptiveStepper, IntegratorSettings
from src.neuron.registers import TOGGLE_INIT, ShiftRegister, pattern_registers
from src.stimuli.waveforms import Waveform
from src.utils.errors import LimitCycleCollapseError, NeverFiresError, StimulusDomainError

logger = logging.getLogger(__name__)

INTEGRATION = "integration"
REFRACTORY = "refractory"
DEVICE = "device"

# Columnas del CSV de traza (contrato de salida)
TRACE_COLUMNS = ["time_s", "v_in_v", "v_device_v", "current_a", "temperature_k", "v_a_v", "block", "spike"]
EXTRA_COLUMNS = ["temperature_integration_k", "temperature_refractory_k", "s1_closed", "s2_closed", "register1"]
EVENT_COLUMNS = ["time_s", "source", "register1_bits"]

# Tensión refractaria del preset calibrado: periodo refractario de 700 ns
CALIBRATED_V_REFRACTORY = -1.0163

# Una fase refractaria más corta que esta fracción de la primera indica colapso del ciclo
COLLAPSE_FRACTION = 1e-2


@dataclass(frozen=True)
class NeuronConfig:
    """Parametrización completa del circuito de la neurona."""

    device_params_input: DeviceParams = field(default_factory=integration_params)
    device_params_refractory: DeviceParams = field(default_factory=refractory_params)
    network_input: SeriesNetwork = field(default_factory=lambda: SeriesNetwork(r_s=50.0, r_c_active=100.0))
    network_refractory: SeriesNetwork = field(default_factory=lambda: SeriesNetwork(r_s=50.0))
    v_refractory: float = CALIBRATED_V_REFRACTORY
    register1_init: ShiftRegister = field(default_factory=lambda: pattern_registers("RS"))
    register2_init: ShiftRegister = TOGGLE_INIT
    v_th_detect: float = 0.5
    detector_latency: float = 0.0
    settings: IntegratorSettings = field(default_factory=IntegratorSettings)

    def __post_init__(self):
        if not self.v_th_detect > 0:
            raise ValueError("v_th_detect debe ser positivo")
        if not self.detector_latency >= 0:
            raise ValueError("detector_latency no puede ser negativa")
        if not np.isfinite(self.v_refractory):
            raise ValueError("v_refractory debe ser finita")
        if self.register1_init.width != 4:
            raise ValueError("El Registro 1 debe tener 4 bits")
        r2 = self.register2_init
        if r2.width != 2 or r2.msb == r2.lsb or not r2.wrap:
            raise ValueError("El Registro 2 debe ser de 2 bits, circular y con bits distintos ('01' o '10')")
        for name, net, p in (("network_input", self.network_input, self.device_params_input),
                             ("network_refractory", self.network_refractory, self.device_params_refractory)):
            if self.v_th_detect / net.r_s > p.i_compliance:
                raise ValueError(f"{name}: v_th_detect / r_s supera la corriente de compliance; "
                                 f"el detector nunca dispararía")

    def with_pattern(self, name: str) -> "NeuronConfig":
        return replace(self, register1_init=pattern_registers(name))

    def with_values(self, **changes) -> "NeuronConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class SpikeEvent:
    time: float
    source: str
    register1: str


def integration_active(register2: ShiftRegister) -> bool:
    """S1 cerrado si el MSB del Registro 2 es 0; S2 cerrado si el LSB es 0."""
    return register2.msb == 0


@dataclass
class Trace:
    """Registros por subpaso aceptado más la lista ordenada de eventos."""

    frame: pd.DataFrame
    events: List[SpikeEvent]
    t_end: float
    accepted_steps: int = 0
    rejected_steps: int = 0

    def spike_times(self, source: str = INTEGRATION) -> np.ndarray:
        return np.array([e.time for e in self.events if e.source == source])

    def isis(self, source: str = INTEGRATION) -> np.ndarray:
        return np.diff(self.spike_times(source))

    def frequency(self, source: str = INTEGRATION) -> float:
        times = self.spike_times(source)
        if len(times) < 2:
            return 0.0
        return (len(times) - 1) / (times[-1] - times[0])

    def quiescent_gaps(self) -> np.ndarray:
        """Duración de cada desconexión del bloque de integración (disparo de integración -> disparo refractario)."""
        gaps = []
        for prev, nxt in zip(self.events[:-1], self.events[1:]):
            if prev.source == INTEGRATION and nxt.source == REFRACTORY:
                gaps.append(nxt.time - prev.time)
        return np.array(gaps)

    def register1_msb_sequence(self) -> List[int]:
        """MSB del Registro 1 vigente en cada disparo de integración."""
        return [int(e.register1[0]) for e in self.events if e.source == INTEGRATION]

    def events_frame(self) -> pd.DataFrame:
        return pd.DataFrame([(e.time, e.source, e.register1) for e in self.events], columns=EVENT_COLUMNS)

    def decimate(self, sample_interval: Optional[float]) -> pd.DataFrame:
        """
        Submuestreo a un intervalo fijo; las filas de disparo y la última fila se conservan siempre.

        Args:
            sample_interval: intervalo [s]; None devuelve todos los subpasos

        Returns:
            DataFrame decimado
        """
        if sample_interval is None:
            return self.frame
        if not sample_interval > 0:
            raise ValueError("sample_interval debe ser positivo")
        bins = np.floor(self.frame["time_s"].to_numpy() / sample_interval)
        keep = np.ones(len(bins), dtype=bool)
        keep[1:] = bins[1:] != bins[:-1]
        keep |= self.frame["spike"].to_numpy() == 1
        if len(keep):
            keep[-1] = True
        return self.frame.loc[keep].reset_index(drop=True)

    def to_csv(self, path: Union[str, Path], sample_interval: Optional[float] = None) -> Path:
        """Escribe el CSV de traza con las columnas del contrato."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.decimate(sample_interval)[TRACE_COLUMNS].to_csv(path, index=False, float_format="%.17g")
        return path


def read_trace_csv(path: Union[str, Path]) -> pd.DataFrame:
    """Lee un CSV de traza conservando los flotantes exactamente."""
    frame = pd.read_csv(path, float_precision="round_trip")
    missing = [c for c in TRACE_COLUMNS if c not in frame.columns]
    if missing:
        raise ValueError(f"Faltan columnas en la traza {path}: {missing}")
    return frame


def _cooling_rate(temperature: float, p: DeviceParams) -> float:
    return -(temperature - p.t_amb) / (p.r_th * p.c_th)


def _heating_rate(op, temperature: float, p: DeviceParams) -> float:
    return (op.v_device * op.current - (temperature - p.t_amb) / p.r_th) / p.c_th


def check_phase(first_phases: Dict[str, float], source: str, phase: float, time: float,
                resolution: float) -> None:
    """
    Detecta el colapso del ciclo: una rama dispara al reconectarse o la fase refractaria
    se reduce por debajo de COLLAPSE_FRACTION de la primera.

    Raises:
        LimitCycleCollapseError: el dispositivo llega caliente a la reconexión
    """
    first = first_phases.setdefault(source, phase)
    if phase <= resolution:
        raise LimitCycleCollapseError(
            f"La rama {source} dispara al reconectarse en t={time:.6e} s: el ciclo colapsa "
            f"(revisar v_refractory, R_S y C_th del dispositivo refractario)")
    if source == REFRACTORY and phase < COLLAPSE_FRACTION * first:
        raise LimitCycleCollapseError(
            f"Fase refractaria de {phase:.3e} s frente a {first:.3e} s de la primera en t={time:.6e} s: "
            f"el ciclo colapsa (el dispositivo refractario no se enfría entre disparos)")


class _NeuronState:
    """Estado mutable del bucle de eventos (registros y bloque activo)."""

    def __init__(self, config: NeuronConfig):
        self.config = config
        self.register1 = config.register1_init
        self.register2 = config.register2_init

    @property
    def block(self) -> str:
        return INTEGRATION if integration_active(self.register2) else REFRACTORY

    @property
    def index(self) -> int:
        return 0 if self.block == INTEGRATION else 1

    def network(self) -> SeriesNetwork:
        c = self.config
        if self.block == INTEGRATION:
            return c.network_input.with_state(r_c_is_short=self.register1.msb == 1, switch_closed=True)
        return c.network_refractory.with_state(switch_closed=True)

    def params(self) -> DeviceParams:
        c = self.config
        return c.device_params_input if self.block == INTEGRATION else c.device_params_refractory

    def apply_spike(self, source: str):
        self.register2 = self.register2.shifted()
        if source == INTEGRATION:
            self.register1 = self.register1.shifted()


def simulate(config: NeuronConfig, stimulus: Waveform, t_end: float) -> Trace:
    """
    Evolución por eventos de la neurona completa.

    En cada subpaso se resuelve el punto de operación de la rama activa; la
    rama desconectada se enfría con v = 0. Cuando V_A cruza el umbral se
    localiza el cruce por bisección, se registra el SpikeEvent, se desplaza
    el Registro 2 y (para disparos de integración) el Registro 1.

    Args:
        config: NeuronConfig
        stimulus: forma de onda de entrada (tensión con signo)
        t_end: duración simulada [s]

    Returns:
        Trace con un registro por subpaso aceptado

    Raises:
        LimitCycleCollapseError: una rama dispara al reconectarse o la fase refractaria degenera
    """
    if not t_end > 0:
        raise ValueError("t_end debe ser positivo")
    if t_end > stimulus.duration * (1 + 1e-12):
        raise StimulusDomainError(f"Estímulo definido hasta {stimulus.duration:.6e} s, se pidió t_end={t_end:.6e} s")

    c = config
    s = c.settings
    p_int, p_ref = c.device_params_input, c.device_params_refractory
    v_ref = abs(float(c.v_refractory))
    threshold = c.v_th_detect * (1 - DETECTION_RTOL)
    state = _NeuronState(c)

    t = 0.0
    y = np.array([p_int.t_amb, p_ref.t_amb])
    h = s.initial_step
    pending: Optional[float] = None
    pending_source: Optional[str] = None
    events: List[SpikeEvent] = []
    rows: List[list] = []
    accepted = rejected = 0
    connected_at = 0.0
    first_phases: Dict[str, float] = {}

    def drive(evaluate, time: float) -> float:
        return abs(evaluate(time)) if state.block == INTEGRATION else v_ref

    def operating_point(evaluate, time: float, temps: np.ndarray):
        return solve_operating_point(drive(evaluate, time), temps[state.index], state.network(), state.params())

    def record(time: float, temps: np.ndarray, spike: int):
        evaluate = stimulus.evaluator(min(time, stimulus.duration))
        op = operating_point(evaluate, time, temps)
        v_in = float(stimulus(min(time, stimulus.duration)))
        row = [time, v_in, op.v_device, op.current, temps[state.index], op.v_a, state.block, spike,
               temps[0], temps[1], state.block == INTEGRATION, state.block == REFRACTORY, str(state.register1)]
        if rows and time <= rows[-1][0]:
            # un disparo simultáneo de la otra rama conserva su propia fila
            if not spike:
                return
            if rows[-1][6] == state.block:
                rows[-1][7] = 1
                return
        rows.append(row)

    def fire(time: float, temps: np.ndarray):
        nonlocal pending, pending_source, connected_at
        source = state.block
        check_phase(first_phases, source, time - connected_at, time, s.event_resolution)
        events.append(SpikeEvent(time, source, str(state.register1)))
        record(time, temps, 1)
        logger.debug(f"Disparo {source} en t={time:.6e} s (R1={state.register1}, R2={state.register2})")
        if c.detector_latency > 0:
            pending, pending_source = time + c.detector_latency, source
        else:
            state.apply_spike(source)
            connected_at = time

    record(t, y, 0)
    end_eps = 1e-9 * s.min_step
    while t_end - t > end_eps:
        if pending is not None and t >= pending - end_eps:
            state.apply_spike(pending_source)
            connected_at = t
            pending = pending_source = None
        evaluate = stimulus.evaluator(t)
        if pending is None and operating_point(evaluate, t, y).v_a >= threshold:
            fire(t, y)
            continue

        t_stop = min(stimulus.next_breakpoint(t), t_end)
        if pending is not None:
            t_stop = min(t_stop, pending)
        limit = t_stop - t
        net, p, idx = state.network(), state.params(), state.index
        other = 1 - idx
        p_other = p_ref if idx == 0 else p_int

        def rhs(time: float, temps: np.ndarray) -> np.ndarray:
            op = solve_operating_point(drive(evaluate, time), temps[idx], net, p)
            d = np.empty(2)
            d[idx] = _heating_rate(op, temps[idx], p)
            d[other] = _cooling_rate(temps[other], p_other)
            return d

        def crossed(time: float, temps: np.ndarray) -> bool:
            return solve_operating_point(drive(evaluate, time), temps[idx], net, p).v_a >= threshold

        stepper = AdaptiveStepper(rhs, s, capped=[0, 1])
        t_new, y_new, h_used, h = stepper.advance(t, y, min(h, stimulus.max_step_hint), limit)
        if h_used >= limit:
            t_new = t_stop
        if pending is None and crossed(t_new, y_new):
            dh, y_cross = stepper.locate(t, y, h_used, crossed)
            t, y = (t_stop if dh >= limit else t + dh), y_cross
            fire(t, y)
        else:
            t, y = t_new, y_new
            record(t, y, 0)
        accepted += stepper.accepted
        rejected += stepper.rejected

    frame = pd.DataFrame(rows, columns=TRACE_COLUMNS + EXTRA_COLUMNS)
    logger.info(f"✓ Simulación completa: {len(events)} eventos, {accepted} subpasos aceptados, "
                f"{rejected} rechazados")
    return Trace(frame=frame, events=events, t_end=t_end, accepted_steps=accepted, rejected_steps=rejected)


def refractory_period(config: NeuronConfig, t0: Optional[float] = None, method: str = "integrate") -> float:
    """
    Predicción analítica del hueco de reposo: tiempo de disparo de la rama refractaria.

    Args:
        config: NeuronConfig
        t0: temperatura inicial del dispositivo refractario (por defecto T_amb)
        method: 'integrate' o 'quadrature'

    Returns:
        Periodo refractario [s]

    Raises:
        NeverFiresError: la rama refractaria es sub-umbral a v_refractory
    """
    p = config.device_params_refractory
    net = config.network_refractory.with_state(switch_closed=True)
    load = network_load(abs(config.v_refractory), net, p)
    t0 = p.t_amb if t0 is None else float(t0)
    i_stop = config.v_th_detect / net.r_s
    if method == "integrate":
        period = time_to_current(load, p, t0, i_stop, config.settings)
    elif method == "quadrature":
        period = time_to_current_quadrature(load, p, t0, i_stop, config.settings)
    else:
        raise ValueError(f"Método desconocido: {method}")
    if period is None:
        raise NeverFiresError(f"La rama refractaria no dispara a v_refractory={config.v_refractory} V: "
                              f"el bloque de integración quedaría desconectado para siempre")
    return period


def solve_refractory_voltage(config: NeuronConfig, target_period: float, v_max: float = 5.0,
                             xtol: float = 1e-6) -> float:
    """
    Invierte refractory_period: |v_refractory| que produce `target_period`.

    Returns:
        v_refractory con el signo de config.v_refractory
    """
    if not target_period > 0:
        raise ValueError("El periodo objetivo debe ser positivo")
    sign = -1.0 if config.v_refractory < 0 else 1.0

    def excess(v: float) -> float:
        try:
            period = refractory_period(replace(config, v_refractory=v), method="quadrature")
        except NeverFiresError:
            return 50.0
        return float(np.log(max(period, 1e-30) / target_period))

    if excess(v_max) > 0:
        raise NeverFiresError(f"Periodo {target_period:.3e} s inalcanzable con |v_refractory| <= {v_max} V")
    v_lo = 1e-3
    if excess(v_lo) < 0:
        raise ValueError(f"Periodo {target_period:.3e} s demasiado largo para la rama refractaria")
    v = optimize.brentq(excess, v_lo, v_max, xtol=xtol)
    logger.info(f"✓ v_refractory={sign * v:.6f} V para un periodo refractario de {target_period * 1e9:.1f} ns")
    return sign * v


def simulate_bare_device(p: DeviceParams, stimulus: Waveform, t_end: float,
                         settings: Optional[IntegratorSettings] = None,
                         network: Optional[SeriesNetwork] = None) -> Trace:
    """
    Modo de réplica experimental: un solo dispositivo sin registros ni conmutación.

    Un disparo es la llegada a la corriente de compliance; el detector se
    rearma cuando la corriente baja de la mitad del umbral (los huecos de 0 V
    de reset).

    Args:
        p: parámetros del dispositivo
        stimulus: forma de onda aplicada
        t_end: duración [s]
        settings: integrador
        network: red serie opcional (por defecto ninguna resistencia)

    Returns:
        Trace con bloque 'device'
    """
    settings = settings or IntegratorSettings()
    if not t_end > 0:
        raise ValueError("t_end debe ser positivo")
    if t_end > stimulus.duration * (1 + 1e-12):
        raise StimulusDomainError(f"Estímulo definido hasta {stimulus.duration:.6e} s, se pidió t_end={t_end:.6e} s")
    threshold = p.i_compliance * (1 - DETECTION_RTOL)

    def operating(v: float, temperature: float):
        if network is None:
            current = float(total_current(v, temperature, p))
            return v, current
        op = solve_operating_point(v, temperature, network, p)
        return op.v_device, op.current

    t, y, h = 0.0, np.array([p.t_amb]), settings.initial_step
    armed = True
    events: List[SpikeEvent] = []
    rows: List[list] = []
    accepted = rejected = 0

    def record(time: float, temperature: float, spike: int):
        v_in = float(stimulus(min(time, stimulus.duration)))
        v_dev, current = operating(abs(v_in), temperature)
        v_a = current * network.r_s if network is not None else 0.0
        if rows and time <= rows[-1][0]:
            if spike:
                rows[-1][7] = 1
            return
        rows.append([time, v_in, v_dev, current, temperature, v_a, DEVICE, spike,
                     temperature, np.nan, True, False, ""])

    record(t, y[0], 0)
    end_eps = 1e-9 * settings.min_step
    while t_end - t > end_eps:
        evaluate = stimulus.evaluator(t)
        t_stop = min(stimulus.next_breakpoint(t), t_end)
        limit = t_stop - t

        def rhs(time: float, temps: np.ndarray) -> np.ndarray:
            v_dev, current = operating(abs(evaluate(time)), temps[0])
            return np.array([(v_dev * current - (temps[0] - p.t_amb) / p.r_th) / p.c_th])

        def crossed(time: float, temps: np.ndarray) -> bool:
            return operating(abs(evaluate(time)), temps[0])[1] >= threshold

        stepper = AdaptiveStepper(rhs, settings, capped=[0])
        t_new, y_new, h_used, h = stepper.advance(t, y, min(h, stimulus.max_step_hint), limit)
        if h_used >= limit:
            t_new = t_stop
        if armed and crossed(t_new, y_new):
            dh, y_cross = stepper.locate(t, y, h_used, crossed)
            t_cross = t_stop if dh >= limit else t + dh
            events.append(SpikeEvent(t_cross, DEVICE, ""))
            record(t_cross, y_cross[0], 1)
            armed = False
        elif not armed and operating(abs(evaluate(t_new)), y_new[0])[1] < 0.5 * threshold:
            armed = True
        t, y = t_new, y_new
        record(t, y[0], 0)
        accepted += stepper.accepted
        rejected += stepper.rejected

    frame = pd.DataFrame(rows, columns=TRACE_COLUMNS + EXTRA_COLUMNS)
    logger.info(f"✓ Réplica experimental: {len(events)} disparos en {t_end * 1e6:.2f} μs")
    return Trace(frame=frame, events=events, t_end=t_end, accepted_steps=accepted, rejected_steps=rejected)


def predicted_spike_times(config: NeuronConfig, v_in: float, n_spikes: int) -> np.ndarray:
    """
    Disparos de integración bajo estímulo constante por el mapa de ciclo (detector ideal).

    Alterna fases de calentamiento de cada rama por cuadratura; mientras
    una rama calienta la otra se enfría exponencialmente con τ = R_th·C_th.

    Args:
        config: NeuronConfig
        v_in: tensión de entrada (con signo)
        n_spikes: número de disparos de integración a predecir

    Returns:
        Instantes de disparo [s]

    Raises:
        NeverFiresError: alguna de las ramas no llega al umbral
        LimitCycleCollapseError: las fases de calentamiento degeneran (dispositivo caliente al reconectarse)
    """
    c = config
    p_int, p_ref = c.device_params_input, c.device_params_refractory
    net_ref = c.network_refractory.with_state(switch_closed=True)
    load_ref = network_load(abs(c.v_refractory), net_ref, p_ref)
    i_ref = c.v_th_detect / net_ref.r_s
    t_int, t_ref, now = p_int.t_amb, p_ref.t_amb, 0.0
    register1 = c.register1_init
    spikes = []
    first_phases: Dict[str, float] = {}
    for _ in range(int(n_spikes)):
        net_int = c.network_input.with_state(r_c_is_short=register1.msb == 1, switch_closed=True)
        load_int = network_load(abs(v_in), net_int, p_int)
        i_int = c.v_th_detect / net_int.r_s
        dt_int = time_to_current_quadrature(load_int, p_int, t_int, i_int, c.settings)
        if dt_int is None:
            raise NeverFiresError(f"El bloque de integración no dispara a v_in={v_in} V")
        check_phase(first_phases, INTEGRATION, dt_int, now + dt_int, c.settings.event_resolution)
        t_int = threshold_temperature(load_int, i_int * (1 - DETECTION_RTOL), t_int)
        t_ref = p_ref.t_amb + (t_ref - p_ref.t_amb) * np.exp(-dt_int / p_ref.tau_th)
        now += dt_int
        spikes.append(now)
        register1 = register1.shifted()

        dt_ref = time_to_current_quadrature(load_ref, p_ref, t_ref, i_ref, c.settings)
        if dt_ref is None:
            raise NeverFiresError(f"La rama refractaria no dispara a v_refractory={c.v_refractory} V")
        check_phase(first_phases, REFRACTORY, dt_ref, now + dt_ref, c.settings.event_resolution)
        t_ref = threshold_temperature(load_ref, i_ref * (1 - DETECTION_RTOL), t_ref)
        t_int = p_int.t_amb + (t_int - p_int.t_amb) * np.exp(-dt_ref / p_int.tau_th)
        now += dt_ref
    return np.array(spikes)


def limit_cycle_frequency(config: NeuronConfig, v_in: float, n_spikes: int = 24, window: int = 8) -> float:
    """Frecuencia de disparo del ciclo límite (últimos `window` ISIs del mapa de ciclo)."""
    spikes = predicted_spike_times(config, v_in, max(n_spikes, window + 1))
    return window / (spikes[-1] - spikes[-1 - window])
