"""
Clasificación de patrones de disparo (RS / IB / CH) a partir de los tiempos de disparo.
"""
import logging
from itertools import groupby
from typing import List, Sequence, Tuple

import numpy as np

from src.utils.errors import PatternError

logger = logging.getLogger(__name__)

MIN_SPIKES = 6
DEFAULT_TOLERANCE = 0.15

BURST_LENGTH = 3


def split_short_long(isis: Sequence[float]) -> Tuple[np.ndarray, float]:
    """
    2-medias exacto en 1-D: mejor corte sobre los ISIs ordenados.

    Returns:
        (máscara booleana de ISIs largos, umbral de corte)
    """
    values = np.asarray(isis, dtype=float)
    ordered = np.sort(values)
    best_cost, best_k = np.inf, 1
    for k in range(1, len(ordered)):
        low, high = ordered[:k], ordered[k:]
        cost = ((low - low.mean()) ** 2).sum() + ((high - high.mean()) ** 2).sum()
        if cost < best_cost:
            best_cost, best_k = cost, k
    cut = 0.5 * (ordered[best_k - 1] + ordered[best_k])
    return values > cut, cut


def _runs(labels: List[str]) -> List[Tuple[str, int]]:
    return [(key, len(list(group))) for key, group in groupby(labels)]


def is_chattering(labels: List[str]) -> bool:
    """Ráfagas de 3 cortos separadas por largos aislados (s,s,s,l periódico)."""
    runs = _runs(labels)
    if not any(key == "l" for key, _ in runs):
        return False
    for i, (key, length) in enumerate(runs):
        if key == "l" and length != 1:
            return False
        if key == "s":
            interior = 0 < i < len(runs) - 1
            if interior and length != BURST_LENGTH:
                return False
            if not interior and length > BURST_LENGTH:
                return False
    return sum(1 for key, _ in runs if key == "l") >= 2


def is_bursting(labels: List[str]) -> bool:
    """Una ráfaga inicial de cortos seguida solo de largos (s^k l^m, 1 <= k <= 3, m >= 2)."""
    runs = _runs(labels)
    return (len(runs) == 2 and runs[0][0] == "s" and 1 <= runs[0][1] <= BURST_LENGTH
            and runs[1][0] == "l" and runs[1][1] >= 2)


def classify_pattern(spike_times: Sequence[float], tolerance: float = DEFAULT_TOLERANCE) -> str:
    """
    Etiqueta el patrón de disparo de un tren de disparos de integración.

    Args:
        spike_times: instantes de disparo [s] (ordenados)
        tolerance: razón largo/corto por debajo de 1 + tolerance se considera un único grupo

    Returns:
        'RS', 'CH', 'IB' u 'other'

    Raises:
        PatternError: menos de 6 disparos
    """
    times = np.asarray(spike_times, dtype=float)
    if len(times) < MIN_SPIKES:
        raise PatternError(f"Se necesitan al menos {MIN_SPIKES} disparos para clasificar (hay {len(times)})")
    isis = np.diff(times)
    if np.any(isis <= 0):
        raise ValueError("Los tiempos de disparo deben ser estrictamente crecientes")

    long_mask, _ = split_short_long(isis)
    if not long_mask.any():
        return "RS"
    short_mean = isis[~long_mask].mean()
    long_mean = isis[long_mask].mean()
    if long_mean / short_mean < 1 + tolerance:
        return "RS"
    labels = ["l" if flag else "s" for flag in long_mask]
    logger.debug(f"Secuencia de ISIs: {''.join(labels)}")
    if is_chattering(labels):
        return "CH"
    if is_bursting(labels):
        return "IB"
    return "other"


def classify_isis(isis: Sequence[float], tolerance: float = DEFAULT_TOLERANCE) -> str:
    """Igual que classify_pattern pero a partir de los intervalos."""
    return classify_pattern(np.concatenate([[0.0], np.cumsum(isis)]), tolerance)
