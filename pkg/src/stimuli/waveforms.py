"""
Generación de estímulos: niveles constantes, trenes de pulsos y suma de dos sinusoides.

Un Waveform es una secuencia de segmentos evaluable en cualquier instante de
su dominio [0, duración]. La tensión es con signo (el dispositivo se polariza
en negativo); el modelo físico usa la magnitud.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from config import RESET_GAP_S
from src.utils.errors import StimulusDomainError

logger = logging.getLogger(__name__)

# Amplitudes de los programas de réplica experimental
CH_FAST_V, CH_SLOW_V = -2.4, -1.7
IB_FAST_V, IB_SLOW_V = -2.4, -1.9


@dataclass(frozen=True)
class ConstantSegment:
    v: float
    duration: float

    def evaluate(self, local_t):
        return np.full_like(np.asarray(local_t, dtype=float), self.v)

    @property
    def max_step_hint(self) -> float:
        return math.inf


@dataclass(frozen=True)
class SinusoidSumSegment:
    """dc + amplitude · Σ sin(2π f_k t), con t relativo al inicio de la forma de onda."""

    dc: float
    amplitude: float
    frequencies: Tuple[float, ...]
    duration: float
    offset: float = 0.0

    def evaluate(self, local_t):
        s = np.asarray(local_t, dtype=float) + self.offset
        total = np.full_like(s, self.dc)
        for f in self.frequencies:
            total = total + self.amplitude * np.sin(2 * np.pi * f * s)
        return total

    @property
    def max_step_hint(self) -> float:
        return 1.0 / (40.0 * max(self.frequencies))


class Waveform:
    """Estímulo por tramos con tensión con signo [V]."""

    def __init__(self, segments: Sequence = ()):
        self.segments = list(segments)
        for seg in self.segments:
            if not seg.duration > 0:
                raise ValueError("Cada segmento debe tener duración positiva")
        durations = [seg.duration for seg in self.segments]
        self._starts = np.concatenate([[0.0], np.cumsum(durations)])

    @property
    def duration(self) -> float:
        return float(self._starts[-1])

    @property
    def breakpoints(self) -> List[float]:
        """Fronteras internas entre segmentos."""
        return self._starts[1:-1].tolist()

    @property
    def max_step_hint(self) -> float:
        return min((seg.max_step_hint for seg in self.segments), default=math.inf)

    def _check_domain(self, t):
        t_arr = np.asarray(t, dtype=float)
        tol = 1e-12 * max(self.duration, 1e-12)
        if np.any(~np.isfinite(t_arr)) or np.any(t_arr < 0) or np.any(t_arr > self.duration + tol):
            raise StimulusDomainError(f"Estímulo no definido en t={t} (dominio [0, {self.duration:.6e}] s)")
        return t_arr

    def _segment_index(self, t_arr):
        idx = np.searchsorted(self._starts, t_arr, side="right") - 1
        return np.clip(idx, 0, len(self.segments) - 1)

    def __call__(self, t):
        """Valor del estímulo en t (escalar o array)."""
        t_arr = self._check_domain(t)
        if not self.segments:
            return np.zeros_like(t_arr) if t_arr.ndim else 0.0
        idx = self._segment_index(t_arr)
        if t_arr.ndim == 0:
            i = int(idx)
            return float(self.segments[i].evaluate(t_arr - self._starts[i]))
        out = np.empty_like(t_arr)
        for i in np.unique(idx):
            mask = idx == i
            out[mask] = self.segments[i].evaluate(t_arr[mask] - self._starts[i])
        return out

    def evaluator(self, t_start: float) -> Callable[[float], float]:
        """
        Evaluador fijo al segmento que contiene `t_start`.

        Dentro de un subpaso que termina en una frontera, todas las etapas
        deben ver el mismo tramo.
        """
        self._check_domain(t_start)
        if not self.segments:
            return lambda t: 0.0
        i = int(self._segment_index(np.asarray(t_start)))
        seg, start = self.segments[i], self._starts[i]
        return lambda t: float(seg.evaluate(t - start))

    def next_breakpoint(self, t: float) -> float:
        """Primera frontera estrictamente posterior a t (o la duración total)."""
        i = np.searchsorted(self._starts, t, side="right")
        if i >= len(self._starts):
            return self.duration
        return float(self._starts[i])

    def sample(self, times) -> np.ndarray:
        return np.asarray(self(np.asarray(times, dtype=float)), dtype=float)

    def to_frame(self, sample_interval: float) -> pd.DataFrame:
        """Muestreo uniforme para exportar a CSV (columnas time_s, v_in_v)."""
        if not sample_interval > 0:
            raise ValueError("sample_interval debe ser positivo")
        n = int(math.floor(self.duration / sample_interval + 1e-9)) + 1
        times = np.arange(n) * sample_interval
        return pd.DataFrame({"time_s": times, "v_in_v": self.sample(times)})


def constant(v: float, t_end: float) -> Waveform:
    """Nivel constante v en [0, t_end]."""
    if not t_end > 0:
        raise ValueError("t_end debe ser positivo")
    return Waveform([ConstantSegment(float(v), float(t_end))])


def sinusoid_sum(f1: float, f2: float, amplitude: float, dc: float, t_end: float) -> Waveform:
    """
    Superposición de dos sinusoides sobre un nivel DC.

    w(s) = dc + amplitude·sin(2πf1·s) + amplitude·sin(2πf2·s)
    """
    if not (f1 > 0 and f2 > 0):
        raise ValueError("Las frecuencias deben ser positivas")
    if not t_end > 0:
        raise ValueError("t_end debe ser positivo")
    return Waveform([SinusoidSumSegment(float(dc), float(amplitude), (float(f1), float(f2)), float(t_end))])


def pulse_program(levels: Sequence[Tuple[float, float, int]], gap: float = RESET_GAP_S,
                  cycles: int = 1) -> Waveform:
    """
    Tren de pulsos con huecos de 0 V entre pulsos (reset).

    Args:
        levels: lista de (tensión, ancho, repeticiones)
        gap: ancho del hueco a 0 V entre pulsos consecutivos
        cycles: repeticiones del programa completo

    Returns:
        Waveform concatenado; un programa vacío da la forma de onda nula
    """
    if gap < 0:
        raise ValueError("gap no puede ser negativo")
    pulses = []
    for _ in range(int(cycles)):
        for v, width, repeat in levels:
            if not width > 0:
                raise ValueError("El ancho de pulso debe ser positivo")
            pulses.extend([(float(v), float(width))] * int(repeat))
    segments = []
    for k, (v, width) in enumerate(pulses):
        if k > 0 and gap > 0:
            segments.append(ConstantSegment(0.0, gap))
        segments.append(ConstantSegment(v, width))
    return Waveform(segments)


def chattering_program(width: float, gap: float = RESET_GAP_S, cycles: int = 3,
                       slow_width: Optional[float] = None) -> Waveform:
    """
    Tres pulsos rápidos y uno lento alternados.

    Con slow_width = width + (retardo de disparo lento − rápido) el pulso
    siguiente conserva la cadencia y solo el ISI que termina en el disparo
    lento se alarga.
    """
    slow_width = width if slow_width is None else slow_width
    return pulse_program([(CH_FAST_V, width, 3), (CH_SLOW_V, slow_width, 1)], gap=gap, cycles=cycles)


def bursting_program(width: float, gap: float = RESET_GAP_S, n_slow: int = 5,
                     slow_width: Optional[float] = None) -> Waveform:
    """Tres pulsos rápidos seguidos de pulsos lentos consecutivos."""
    slow_width = width if slow_width is None else slow_width
    return pulse_program([(IB_FAST_V, width, 3), (IB_SLOW_V, slow_width, n_slow)], gap=gap)


def beat_period(f1: float, f2: float) -> float:
    """Periodo común de las dos sinusoides, 1/mcd(f1, f2) (frecuencias enteras en Hz)."""
    return 1.0 / math.gcd(int(round(f1)), int(round(f2)))


def carrier_regions(f1: float, f2: float, amplitude: float, dc: float,
                    samples_per_region: int = 2000) -> pd.DataFrame:
    """
    Divide un periodo de batido en periodos de la portadora (f1+f2)/2.

    Cada región se etiqueta por la magnitud pico de la señal: los dos tercios
    superiores/medios/inferiores del ranking son high / moderate / low.

    Returns:
        DataFrame con columnas start_s, end_s, peak_v, label
    """
    period = beat_period(f1, f2)
    carrier = 0.5 * (f1 + f2)
    n_regions = int(round(period * carrier))
    wave = sinusoid_sum(f1, f2, amplitude, dc, period)
    edges = np.linspace(0.0, period, n_regions + 1)
    peaks = []
    for start, end in zip(edges[:-1], edges[1:]):
        peaks.append(float(np.max(np.abs(wave.sample(np.linspace(start, end, samples_per_region))))))
    order = np.argsort(np.argsort(-np.asarray(peaks)))
    third = n_regions / 3.0
    labels = ["high" if r < third else "moderate" if r < 2 * third else "low" for r in order]
    return pd.DataFrame({"start_s": edges[:-1], "end_s": edges[1:], "peak_v": peaks, "label": labels})


def waveform_from_dict(spec: Dict, t_end: float = None) -> Waveform:
    """
    Construye un estímulo a partir de la sección 'stimulus' de un escenario (claves con unidades).

    Args:
        spec: diccionario ya validado ('type' más los parámetros de ese tipo)
        t_end: duración para los estímulos continuos (constant, sinusoid)

    Returns:
        Waveform
    """
    kind = spec.get("type", "constant")
    gap = spec.get("gap_s", RESET_GAP_S)
    if kind == "constant":
        return constant(spec["v_input_v"], t_end)
    if kind == "sinusoid":
        return sinusoid_sum(spec["f1_hz"], spec["f2_hz"], spec["amplitude_v"], spec["dc_v"], t_end)
    if kind == "pulses":
        levels = [(lv["v_v"], lv["width_s"], lv.get("repeat", 1)) for lv in spec.get("levels", [])]
        return pulse_program(levels, gap=gap, cycles=spec.get("cycles", 1))
    if kind == "chattering":
        return chattering_program(spec["width_s"], gap=gap, cycles=spec.get("cycles", 3),
                                  slow_width=spec.get("slow_width_s"))
    if kind == "bursting":
        return bursting_program(spec["width_s"], gap=gap, n_slow=spec.get("n_slow", 5),
                                slow_width=spec.get("slow_width_s"))
    raise ValueError(f"Tipo de estímulo desconocido: {kind}")
