"""
Resumen de trazas de simulación: frecuencia, ISIs, patrón, informe JSON y gráficas vectoriales.
"""
import json
import logging
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from src.neuron.neuron_core import INTEGRATION, REFRACTORY, read_trace_csv
from src.neuron.patterns import MIN_SPIKES, classify_pattern

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import seaborn as sns
    PLOTTING_AVAILABLE = True
except ImportError:
    PLOTTING_AVAILABLE = False
    logging.warning("Matplotlib/Seaborn no disponibles. Los gráficos se omitirán.")

logger = logging.getLogger(__name__)


def _spike_rows(frame: pd.DataFrame) -> pd.DataFrame:
    return frame.loc[frame["spike"] == 1, ["time_s", "block"]]


def summarize(frame: pd.DataFrame, source: Optional[str] = None) -> Dict:
    """
    Estadísticas de disparo de una traza (en memoria o leída de CSV).

    Args:
        frame: DataFrame con al menos time_s, block y spike
        source: bloque cuyos disparos se cuentan (por defecto 'integration',
                o 'device' en trazas de réplica)

    Returns:
        Diccionario con spike_count, frequency_hz, isi_s, pattern y quiescent_gaps_s
    """
    spikes = _spike_rows(frame)
    if source is None:
        source = INTEGRATION if (frame["block"] != "device").any() else "device"
    times = spikes.loc[spikes["block"] == source, "time_s"].to_numpy(dtype=float)
    isis = np.diff(times)
    frequency = (len(times) - 1) / (times[-1] - times[0]) if len(times) >= 2 else 0.0
    pattern = classify_pattern(times) if len(times) >= MIN_SPIKES else "insufficient"

    gaps: List[float] = []
    blocks = spikes["block"].tolist()
    stamps = spikes["time_s"].tolist()
    for i in range(len(blocks) - 1):
        if blocks[i] == INTEGRATION and blocks[i + 1] == REFRACTORY:
            gaps.append(stamps[i + 1] - stamps[i])

    return {
        'source': source,
        'spike_count': int(len(times)),
        'refractory_spike_count': int((spikes["block"] == REFRACTORY).sum()),
        'frequency_hz': float(frequency),
        'isi_s': [float(x) for x in isis],
        'pattern': pattern,
        'quiescent_gaps_s': [float(g) for g in gaps],
    }


def summary_from_csv(path: Path, source: Optional[str] = None) -> Dict:
    """Resumen recalculado a partir del CSV de traza exportado."""
    return summarize(read_trace_csv(path), source)


class TraceAnalyzer:
    """Analizador de trazas de la neurona."""

    def __init__(self, output_dir: Optional[Path] = None):
        """
        Inicializa el analizador.

        Args:
            output_dir: Directorio para guardar reportes y gráficas
        """
        self.output_dir = Path(output_dir) if output_dir else Path("data/reports")
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def analyze(self, frame: pd.DataFrame, output_name: str = "summary", plot: bool = False,
                extra: Optional[Dict] = None) -> Dict:
        """
        Resume la traza y guarda el reporte JSON (y la gráfica si se pide).

        Args:
            frame: traza completa
            output_name: nombre base de los archivos de salida
            plot: generar gráfica SVG de corriente y temperatura
            extra: campos adicionales para el reporte

        Returns:
            Diccionario del reporte
        """
        logger.info("Analizando traza...")
        summary = summarize(frame)
        results = {
            'timestamp': datetime.now().isoformat(),
            'samples': int(len(frame)),
            'duration_s': float(frame["time_s"].iloc[-1]) if len(frame) else 0.0,
            'summary': summary,
            'diagnostics': self._diagnostics(frame, summary),
        }
        if extra:
            results.update(extra)
        self._save_json_report(results, output_name)
        if plot:
            self.plot(frame, output_name)
        return results

    def _diagnostics(self, frame: pd.DataFrame, summary: Dict) -> List[str]:
        notes = []
        if summary['spike_count'] == 0:
            notes.append("⚠️ No hay disparos: estímulo sub-umbral o ventana demasiado corta.")
        elif summary['pattern'] == "insufficient":
            notes.append(f"⚠️ Solo {summary['spike_count']} disparos; se necesitan {MIN_SPIKES} para clasificar.")
        if len(frame) and (frame["temperature_k"] > 1500).any():
            notes.append("⚠️ La temperatura supera 1500 K; revisar la compliance y las resistencias serie.")
        if not notes:
            notes.append("✅ Traza sin incidencias.")
        return notes

    def _save_json_report(self, results: Dict, output_name: str) -> Path:
        output_path = self.output_dir / f"{output_name}.json"
        with open(output_path, 'w', encoding='utf-8') as f:
            json.dump(results, f, indent=2, ensure_ascii=False, default=str)
        logger.info(f"Reporte JSON guardado: {output_path}")
        return output_path

    def plot(self, frame: pd.DataFrame, output_name: str) -> Optional[Path]:
        """Corriente y temperatura frente al tiempo, en SVG."""
        if not PLOTTING_AVAILABLE:
            logger.warning("⚠️ Gráfica omitida: matplotlib no disponible")
            return None
        sns.set_theme(style="whitegrid")
        fig, (ax_i, ax_t) = plt.subplots(2, 1, sharex=True, figsize=(9, 6))
        t_us = frame["time_s"] * 1e6
        ax_i.plot(t_us, frame["current_a"] * 1e3, lw=0.8)
        ax_i.set_ylabel("Corriente [mA]")
        for column, label in (("temperature_integration_k", "integración"),
                              ("temperature_refractory_k", "refractario")):
            if column in frame and frame[column].notna().any():
                ax_t.plot(t_us, frame[column], lw=0.8, label=label)
        if "temperature_integration_k" not in frame:
            ax_t.plot(t_us, frame["temperature_k"], lw=0.8)
        ax_t.set_ylabel("Temperatura [K]")
        ax_t.set_xlabel("Tiempo [μs]")
        if ax_t.get_legend_handles_labels()[0]:
            ax_t.legend(loc="upper right")
        spikes = frame.loc[frame["spike"] == 1, "time_s"] * 1e6
        for t in spikes:
            ax_i.axvline(t, color="grey", lw=0.3, alpha=0.5)
        fig.tight_layout()
        output_path = self.output_dir / f"{output_name}.svg"
        fig.savefig(output_path, format="svg")
        plt.close(fig)
        logger.info(f"Gráfica guardada: {output_path}")
        return output_path
