"""
Calibración de parámetros libres contra tiempos de disparo observados.

Objetivo en espacio logarítmico (los tiempos abarcan décadas), descenso
simplex (Nelder-Mead) sin derivadas con varios arranques cuasi-aleatorios
dentro de la caja de cotas.
"""
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import optimize
from scipy.stats import qmc

from src.models.device_model import DeviceParams, spike_time
from src.models.integrator import IntegratorSettings
from src.neuron.neuron_core import NeuronConfig, limit_cycle_frequency
from src.utils.errors import CalibrationInfeasibleError, ConfigError, SimulationError

logger = logging.getLogger(__name__)

OBSERVATION_COLUMNS = ["v_volts", "t_spike_seconds", "weight"]

DEFAULT_FREE = ("r_th", "c_th")
EXTENDED_FREE = ("r_th", "c_th", "i_compliance", "phi_b", "e_trap")

DEFAULT_BOUNDS: Dict[str, Tuple[float, float]] = {
    "r_th": (1e3, 1e6),
    "c_th": (1e-13, 1e-9),
    "i_compliance": (1e-4, 1e-1),
    "phi_b": (0.1, 0.6),
    "e_trap": (0.01, 0.2),
}

ANCHOR_FREE = ("r_th", "c_th", "v_refractory", "r_s")
ANCHOR_BOUNDS: Dict[str, Tuple[float, float]] = {
    "r_th": (1e3, 1e6),
    "c_th": (1e-13, 1e-9),
    "v_refractory": (0.5, 5.0),
    "r_s": (50.0, 500.0),
}

# Penalización por observación sin disparo (en unidades de ln²)
INFEASIBLE_PENALTY = 1e3


@dataclass(frozen=True)
class SpikeTimeObservation:
    v: float
    t_spike: float
    weight: float = 1.0

    def __post_init__(self):
        if not self.v > 0:
            raise ValueError(f"La tensión observada debe ser positiva (recibido {self.v})")
        if not self.t_spike > 0:
            raise ValueError(f"t_spike debe ser positivo (recibido {self.t_spike})")
        if not self.weight >= 0:
            raise ValueError(f"weight no puede ser negativo (recibido {self.weight})")


@dataclass
class FitResult:
    """Resultado de un ajuste multi-arranque."""

    params: object
    values: Dict[str, float]
    residuals: np.ndarray
    iterations: int
    evaluations: int = 0
    history: np.ndarray = field(default_factory=lambda: np.zeros(0))
    starts: List[Dict] = field(default_factory=list)

    @property
    def rms_log_error(self) -> float:
        if len(self.residuals) == 0:
            return 0.0
        return float(np.sqrt(np.mean(self.residuals ** 2)))

    @property
    def mean_relative_error(self) -> float:
        """Error medio |t_modelo / t_obs − 1|."""
        if len(self.residuals) == 0:
            return 0.0
        return float(np.mean(np.abs(np.expm1(self.residuals))))

    def to_dict(self) -> Dict:
        return {
            'values': self.values,
            'residuals': self.residuals.tolist(),
            'rms_log_error': self.rms_log_error,
            'mean_relative_error': self.mean_relative_error,
            'iterations': self.iterations,
            'evaluations': self.evaluations,
            'starts': self.starts,
        }


def load_observations(path: Union[str, Path]) -> List[SpikeTimeObservation]:
    """
    Carga observaciones (v_volts, t_spike_seconds, weight) desde CSV con cabecera.

    Raises:
        ConfigError: cabecera ausente o valores no válidos
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"No existe el archivo de observaciones: {path}")
    frame = pd.read_csv(path)
    missing = [c for c in OBSERVATION_COLUMNS if c not in frame.columns]
    if missing:
        raise ConfigError(f"Cabecera de observaciones incompleta en {path}: faltan {missing}", field=missing[0], line=1)
    observations = []
    for i, row in frame.iterrows():
        try:
            observations.append(SpikeTimeObservation(float(row["v_volts"]), float(row["t_spike_seconds"]),
                                                     float(row["weight"])))
        except ValueError as e:
            raise ConfigError(str(e), line=int(i) + 2) from e
    logger.info(f"✓ {len(observations)} observaciones cargadas de {path.name}")
    return observations


def synthetic_observations(p: DeviceParams, voltages: Sequence[float],
                           settings: Optional[IntegratorSettings] = None,
                           method: str = "quadrature") -> List[SpikeTimeObservation]:
    """Observaciones generadas con parámetros conocidos (verificación de identificabilidad)."""
    observations = []
    for v in voltages:
        t = spike_time(v, p, settings=settings, method=method)
        if t is None:
            raise ValueError(f"{v} V es sub-umbral para los parámetros dados")
        observations.append(SpikeTimeObservation(float(v), float(t)))
    return observations


def _log_box(names: Sequence[str], bounds: Dict[str, Tuple[float, float]]) -> np.ndarray:
    box = []
    for name in names:
        lo, hi = bounds[name]
        if not (0 < lo < hi):
            raise ValueError(f"Cotas no válidas para {name}: {bounds[name]}")
        box.append((np.log(lo), np.log(hi)))
    return np.array(box)


def _starting_points(x_init: np.ndarray, box: np.ndarray, n_starts: int) -> List[np.ndarray]:
    """Punto inicial más puntos de Halton (sin el origen de la secuencia) escalados a la caja."""
    starts = [np.clip(x_init, box[:, 0], box[:, 1])]
    if n_starts > 1:
        sampler = qmc.Halton(d=len(box), scramble=False)
        unit = sampler.random(n_starts)[1:]
        starts.extend(qmc.scale(unit, box[:, 0], box[:, 1]))
    return starts


def _multistart(objective: Callable[[np.ndarray], float], x_init: np.ndarray, box: np.ndarray,
                n_starts: int, xatol: float, maxiter: int) -> Tuple[np.ndarray, float, int, int, np.ndarray, List[Dict]]:
    best_x, best_f = None, np.inf
    iterations = evaluations = 0
    history: List[float] = []
    summaries = []
    for k, x0 in enumerate(_starting_points(x_init, box, n_starts)):
        start_history: List[float] = []
        res = optimize.minimize(
            objective, x0=x0, method="Nelder-Mead", bounds=[tuple(b) for b in box],
            callback=lambda xk: start_history.append(objective(xk)),
            options=dict(xatol=xatol, fatol=1e-12, maxiter=maxiter),
        )
        iterations += int(res.nit)
        evaluations += int(res.nfev)
        history.extend(start_history)
        summaries.append({'start': k, 'x0': np.exp(x0).tolist(), 'objective': float(res.fun),
                          'iterations': int(res.nit), 'success': bool(res.success)})
        logger.debug(f"Arranque {k}: objetivo={res.fun:.6e} tras {res.nit} iteraciones")
        if res.fun < best_f:
            best_x, best_f = np.asarray(res.x), float(res.fun)
    running_best = np.minimum.accumulate(np.array(history)) if history else np.zeros(0)
    return best_x, best_f, iterations, evaluations, running_best, summaries


def fit(observations: Sequence[SpikeTimeObservation], free: Sequence[str] = DEFAULT_FREE,
        bounds: Optional[Dict[str, Tuple[float, float]]] = None, init: Optional[DeviceParams] = None,
        n_starts: int = 5, xatol: float = 1e-4, maxiter: int = 400,
        settings: Optional[IntegratorSettings] = None, method: str = "quadrature") -> FitResult:
    """
    Ajusta los parámetros libres del dispositivo a pares (tensión, tiempo de disparo).

    Minimiza Σ w·(ln t_modelo − ln t_obs)² con Nelder-Mead acotado en ln(parámetro).

    Args:
        observations: observaciones
        free: subconjunto de campos de DeviceParams a ajustar
        bounds: cotas por parámetro (por defecto DEFAULT_BOUNDS)
        init: parámetros iniciales (por defecto los de la tabla)
        n_starts: número de arranques (inicial + Halton)
        xatol: diámetro final del simplex en ln(parámetro) (relativo)
        maxiter: iteraciones máximas por arranque
        settings: integrador
        method: cálculo del tiempo de disparo ('quadrature' o 'integrate')

    Returns:
        FitResult con DeviceParams ajustados

    Raises:
        CalibrationInfeasibleError: el mejor punto deja alguna observación sin disparo
    """
    init = init or DeviceParams()
    free = list(free)
    bounds = {**DEFAULT_BOUNDS, **(bounds or {})}
    observations = list(observations)
    if len(observations) < len(free):
        raise ValueError(f"Se necesitan al menos {len(free)} observaciones para {len(free)} parámetros libres")
    unknown = [name for name in free if name not in bounds or not hasattr(init, name)]
    if unknown:
        raise ValueError(f"Parámetros libres desconocidos: {unknown}")
    weights = np.array([o.weight for o in observations])
    log_obs = np.log([o.t_spike for o in observations])

    def model_params(x: np.ndarray) -> DeviceParams:
        return replace(init, **{name: float(np.exp(v)) for name, v in zip(free, x)})

    def residuals(p: DeviceParams) -> Tuple[np.ndarray, List[int]]:
        res, infeasible = np.zeros(len(observations)), []
        for i, o in enumerate(observations):
            try:
                t = spike_time(o.v, p, settings=settings, method=method)
            except SimulationError:
                t = None
            if t is None or t <= 0:
                infeasible.append(i)
                res[i] = np.nan
            else:
                res[i] = np.log(t) - log_obs[i]
        return res, infeasible

    def objective(x: np.ndarray) -> float:
        res, infeasible = residuals(model_params(x))
        penalty = INFEASIBLE_PENALTY * sum(weights[i] + 1.0 for i in infeasible)
        return float(np.nansum(weights * res ** 2) + penalty)

    logger.info("=" * 60)
    logger.info(f"CALIBRACIÓN: {len(observations)} observaciones, libres={free or 'ninguno'}")
    logger.info("=" * 60)

    if not free:
        res, infeasible = residuals(init)
        _raise_if_infeasible(infeasible, observations)
        return FitResult(params=init, values={}, residuals=res, iterations=0, evaluations=len(observations))

    box = _log_box(free, bounds)
    x_init = np.log([getattr(init, name) for name in free])
    best_x, best_f, iterations, evaluations, history, summaries = _multistart(
        objective, x_init, box, n_starts, xatol, maxiter)
    best = model_params(best_x)
    res, infeasible = residuals(best)
    _raise_if_infeasible(infeasible, observations)
    values = {name: float(getattr(best, name)) for name in free}
    result = FitResult(params=best, values=values, residuals=res, iterations=iterations,
                       evaluations=evaluations, history=history, starts=summaries)
    logger.info(f"✓ Ajuste completado: RMS log-error={result.rms_log_error:.4e}, "
                f"error medio={result.mean_relative_error * 100:.2f}%")
    return result


def _raise_if_infeasible(infeasible: List[int], observations: Sequence[SpikeTimeObservation]):
    if infeasible:
        o = observations[infeasible[0]]
        raise CalibrationInfeasibleError(
            f"Ningún arranque produce disparo para la observación #{infeasible[0]} "
            f"(v={o.v} V, t_spike={o.t_spike:.3e} s)"
        )


def apply_anchor_values(config: NeuronConfig, values: Dict[str, float]) -> NeuronConfig:
    """
    Aplica r_th / c_th (dispositivo de integración), |v_refractory| y r_s (ambas ramas) a una configuración.

    El dispositivo refractario conserva su preset: su periodo lo fija v_refractory.
    """
    device = {k: values[k] for k in ("r_th", "c_th") if k in values}
    changes = {}
    if device:
        changes["device_params_input"] = replace(config.device_params_input, **device)
    if "v_refractory" in values:
        sign = -1.0 if config.v_refractory < 0 else 1.0
        changes["v_refractory"] = sign * values["v_refractory"]
    if "r_s" in values:
        changes["network_input"] = replace(config.network_input, r_s=values["r_s"])
        changes["network_refractory"] = replace(config.network_refractory, r_s=values["r_s"])
    return replace(config, **changes)


def fit_frequency_anchors(config: NeuronConfig, anchors: Sequence[Tuple[float, float]],
                          free: Sequence[str] = ANCHOR_FREE,
                          bounds: Optional[Dict[str, Tuple[float, float]]] = None,
                          n_starts: int = 5, xatol: float = 1e-4, maxiter: int = 400) -> FitResult:
    """
    Ajusta la configuración de la neurona a frecuencias de disparo regulares conocidas.

    Args:
        config: configuración inicial
        anchors: lista de (v_in, frecuencia [Hz])
        free: subconjunto de {r_th, c_th, v_refractory, r_s}

    Returns:
        FitResult cuyo `params` es la NeuronConfig ajustada
    """
    free = list(free)
    bounds = {**ANCHOR_BOUNDS, **(bounds or {})}
    anchors = [(float(v), float(f)) for v, f in anchors]
    if any(f <= 0 for _, f in anchors):
        raise ValueError("Las frecuencias de anclaje deben ser positivas")
    log_obs = np.log([f for _, f in anchors])

    def current_values(cfg: NeuronConfig) -> Dict[str, float]:
        return {
            "r_th": cfg.device_params_input.r_th,
            "c_th": cfg.device_params_input.c_th,
            "v_refractory": abs(cfg.v_refractory),
            "r_s": cfg.network_input.r_s,
        }

    def residuals(cfg: NeuronConfig) -> Tuple[np.ndarray, List[int]]:
        res, infeasible = np.zeros(len(anchors)), []
        for i, (v, _) in enumerate(anchors):
            try:
                res[i] = np.log(limit_cycle_frequency(cfg, v)) - log_obs[i]
            except (SimulationError, ValueError):
                infeasible.append(i)
                res[i] = np.nan
        return res, infeasible

    def candidate(x: np.ndarray) -> NeuronConfig:
        return apply_anchor_values(config, {name: float(np.exp(v)) for name, v in zip(free, x)})

    def objective(x: np.ndarray) -> float:
        try:
            cfg = candidate(x)
        except ValueError:
            return INFEASIBLE_PENALTY * (len(anchors) + 1)
        res, infeasible = residuals(cfg)
        return float(np.nansum(res ** 2) + INFEASIBLE_PENALTY * len(infeasible))

    logger.info(f"Ajuste de anclajes de frecuencia: {anchors}, libres={free}")
    if not free:
        res, infeasible = residuals(config)
        if infeasible:
            raise CalibrationInfeasibleError(f"Sin disparo regular en el anclaje v={anchors[infeasible[0]][0]} V")
        return FitResult(params=config, values={}, residuals=res, iterations=0)

    start = current_values(config)
    box = _log_box(free, bounds)
    x_init = np.log([start[name] for name in free])
    best_x, _, iterations, evaluations, history, summaries = _multistart(
        objective, x_init, box, n_starts, xatol, maxiter)
    best = candidate(best_x)
    res, infeasible = residuals(best)
    if infeasible:
        raise CalibrationInfeasibleError(f"Sin disparo regular en el anclaje v={anchors[infeasible[0]][0]} V")
    values = {name: current_values(best)[name] for name in free}
    result = FitResult(params=best, values=values, residuals=res, iterations=iterations,
                       evaluations=evaluations, history=history, starts=summaries)
    logger.info(f"✓ Anclajes ajustados: {values} (RMS log-error={result.rms_log_error:.3e})")
    return result
