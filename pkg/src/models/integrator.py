"""
Integrador Runge-Kutta-Fehlberg 4(5) con paso adaptativo.

Además del control de error local, cada subpaso respeta un tope sobre el
cambio de temperatura (ΔT_step), que acota el error en la fase de
realimentación térmica donde dT/dt crece sin límite.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Sequence, Tuple

import numpy as np

from src.utils.errors import IntegrationError

logger = logging.getLogger(__name__)


# Tabla de Butcher de Fehlberg
_C = np.array([0.0, 1 / 4, 3 / 8, 12 / 13, 1.0, 1 / 2])
_A = (
    (),
    (1 / 4,),
    (3 / 32, 9 / 32),
    (1932 / 2197, -7200 / 2197, 7296 / 2197),
    (439 / 216, -8.0, 3680 / 513, -845 / 4104),
    (-8 / 27, 2.0, -3544 / 2565, 1859 / 4104, -11 / 40),
)
# solución de 4º orden (la que se propaga)
_B4 = np.array([25 / 216, 0.0, 1408 / 2565, 2197 / 4104, -1 / 5, 0.0])
# diferencia 5º - 4º orden
_E = np.array([1 / 360, 0.0, -128 / 4275, -2197 / 75240, 1 / 50, 2 / 55])


@dataclass(frozen=True)
class IntegratorSettings:
    """Parámetros del integrador adaptativo."""

    delta_t_step: float = 0.5        # K, tope de cambio de temperatura por subpaso
    min_step: float = 1e-12          # s
    max_step: float = 20e-9          # s
    initial_step: float = 1e-10      # s
    rtol: float = 1e-7
    atol: float = 1e-6               # K
    event_resolution: float = 1e-12  # s, bisección de cruces de umbral
    scan_resolution: float = 0.5     # K, barrido de puntos fijos
    max_time: float = 1e-3           # s, guarda para integraciones abiertas

    def __post_init__(self):
        for name in ("delta_t_step", "min_step", "max_step", "initial_step",
                     "rtol", "atol", "event_resolution", "scan_resolution", "max_time"):
            if not getattr(self, name) > 0:
                raise ValueError(f"IntegratorSettings.{name} debe ser positivo")
        if self.min_step > self.max_step:
            raise ValueError("min_step no puede superar max_step")


RHS = Callable[[float, np.ndarray], np.ndarray]


class AdaptiveStepper:
    """
    Paso RKF45 con control de error y tope de ΔT.

    Args:
        rhs: f(t, y) -> dy/dt
        settings: IntegratorSettings
        capped: índices de y que son temperaturas (tope ΔT y control de error)
    """

    def __init__(self, rhs: RHS, settings: IntegratorSettings, capped: Sequence[int]):
        self.rhs = rhs
        self.settings = settings
        self.capped = np.asarray(capped, dtype=int)
        self.rejected = 0
        self.accepted = 0

    def step(self, t: float, y: np.ndarray, h: float) -> Tuple[np.ndarray, np.ndarray]:
        """Un paso RKF45 sin control. Devuelve (y_nuevo, estimación_de_error)."""
        k = np.empty((6, y.size))
        for i in range(6):
            yi = y.copy()
            for j, a in enumerate(_A[i]):
                yi += h * a * k[j]
            k[i] = self.rhs(t + _C[i] * h, yi)
        return y + h * (_B4 @ k), h * (_E @ k)

    def advance(self, t: float, y: np.ndarray, h_try: float,
                h_limit: float) -> Tuple[float, np.ndarray, float, float]:
        """
        Avanza un subpaso aceptado.

        Args:
            t: tiempo actual
            y: estado actual
            h_try: paso propuesto
            h_limit: paso máximo permitido (frontera de estímulo, fin, evento)

        Returns:
            (t_nuevo, y_nuevo, paso_usado, paso_siguiente_propuesto)
        """
        s = self.settings
        h = min(h_try, h_limit, s.max_step)
        while True:
            y_new, err = self.step(t, y, h)
            cap = self.capped
            if not np.all(np.isfinite(y_new)):
                ratio = 0.1
                ok = False
            else:
                scale = s.atol + s.rtol * np.maximum(np.abs(y[cap]), np.abs(y_new[cap]))
                err_norm = float(np.max(np.abs(err[cap]) / scale))
                d_temp = float(np.max(np.abs(y_new[cap] - y[cap])))
                ok = err_norm <= 1.0 and d_temp <= s.delta_t_step
                if ok:
                    growth = 5.0 if err_norm == 0.0 else min(5.0, 0.9 * err_norm ** -0.2)
                    if d_temp > 0.0:
                        growth = min(growth, s.delta_t_step / d_temp)
                    ratio = max(growth, 0.2)
                else:
                    ratio = 0.9 * err_norm ** -0.2 if err_norm > 1.0 else 1.0
                    if d_temp > s.delta_t_step:
                        ratio = min(ratio, 0.9 * s.delta_t_step / d_temp)
                    ratio = min(max(ratio, 0.1), 0.9)
            if ok:
                self.accepted += 1
                h_next = min(max(h * ratio, s.min_step), s.max_step)
                return t + h, y_new, h, h_next
            self.rejected += 1
            if h <= s.min_step:
                raise IntegrationError(
                    f"Subpaso por debajo del mínimo ({s.min_step:.1e} s) en t={t:.6e} s "
                    f"sin cumplir el tope ΔT={s.delta_t_step} K"
                )
            h = max(h * ratio, s.min_step)

    def locate(self, t: float, y: np.ndarray, h: float,
               crossed: Callable[[float, np.ndarray], bool]) -> Tuple[float, np.ndarray]:
        """
        Bisección del instante de cruce dentro de un subpaso ya aceptado.

        `crossed(t, y)` debe ser falso al inicio del subpaso y verdadero al final.

        Returns:
            (paso_hasta_el_cruce, estado_en_el_cruce)
        """
        lo, hi = 0.0, h
        y_hi, _ = self.step(t, y, h)
        while hi - lo > self.settings.event_resolution:
            mid = 0.5 * (lo + hi)
            y_mid, _ = self.step(t, y, mid)
            if crossed(t + mid, y_mid):
                hi, y_hi = mid, y_mid
            else:
                lo = mid
        return hi, y_hi
