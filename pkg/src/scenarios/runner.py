"""
Ejecución de escenarios y barridos de tensión en paralelo.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from tqdm import tqdm

from config import EXPERIMENT_ANCHORS, OUTPUT_FORMAT
from src.neuron.neuron_core import NeuronConfig, simulate
from src.scenarios.scenarios import DEFAULT_T_END, scenario_for
from src.stimuli.waveforms import constant
from src.utils.config_loader import ScenarioSpec
from src.utils.errors import ConfigError
from src.utils.file_handlers import FileHandler

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ["point", "source", "v_input_v", "v_refractory_v", "spike_count", "frequency_hz", "first_gap_s"]


def run(spec: ScenarioSpec, output_dir: Path, plot: bool = False,
        sample_interval: Optional[float] = None, table_format: str = OUTPUT_FORMAT) -> Dict[str, Any]:
    """
    Ejecuta un escenario y devuelve su resultado.

    Args:
        spec: escenario validado
        output_dir: directorio de artefactos
        plot: generar gráficas
        sample_interval: intervalo de muestreo de la traza
        table_format: formato de tablas agregadas

    Returns:
        Diccionario del escenario ('success', 'summary', 'artifacts', ...)
    """
    scenario = scenario_for(spec, Path(output_dir) / spec.name, plot=plot,
                            sample_interval=sample_interval, table_format=table_format)
    return scenario.process()


def sweep_voltages(spec: ScenarioSpec) -> List[float]:
    """Tensiones de entrada del barrido: lista explícita o start/stop/step."""
    sw = spec.sweep
    if "v_input_v" in sw:
        return [float(v) for v in sw["v_input_v"]]
    if {"start_v", "stop_v", "step_v"} <= set(sw):
        start, stop, step = sw["start_v"], sw["stop_v"], sw["step_v"]
        if step == 0:
            raise ConfigError("step_v no puede ser 0", field="sweep.step_v")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [float(start + k * step) for k in range(max(n, 0))]
    if sw:
        raise ConfigError("El barrido necesita v_input_v o start_v/stop_v/step_v", field="sweep")
    return []


def _sweep_point(args) -> Dict[str, Any]:
    index, config, v_in, t_end, point_dir, sample_interval = args
    trace = simulate(config, constant(v_in, t_end), t_end)
    trace.to_csv(Path(point_dir) / f"point_{index:03d}.csv", sample_interval)
    gaps = trace.quiescent_gaps()
    return {
        "point": index,
        "source": "simulation",
        "v_input_v": v_in,
        "v_refractory_v": config.v_refractory,
        "spike_count": int(len(trace.spike_times())),
        "frequency_hz": trace.frequency(),
        "first_gap_s": float(gaps[0]) if len(gaps) else np.nan,
    }


def reference_rows(anchors: Sequence = EXPERIMENT_ANCHORS) -> List[Dict[str, Any]]:
    return [{"point": np.nan, "source": "experiment", "v_input_v": v, "v_refractory_v": np.nan,
             "spike_count": np.nan, "frequency_hz": f, "first_gap_s": np.nan} for v, f in anchors]


def sweep(spec: ScenarioSpec, output_dir: Path, workers: int = 1, sample_interval: Optional[float] = None,
          table_format: str = OUTPUT_FORMAT, voltages: Optional[Sequence[float]] = None,
          include_reference: bool = True) -> pd.DataFrame:
    """
    Barrido de tensión de entrada constante; una fila por punto más filas de referencia experimental.

    Los puntos se ejecutan en paralelo y la tabla se ensambla en el orden de entrada.
    Un barrido vacío produce solo la cabecera.

    Args:
        spec: escenario base (configuración de la neurona y t_end_s)
        output_dir: directorio de salida
        workers: procesos en paralelo (1 = secuencial)
        sample_interval: intervalo de muestreo de las trazas por punto
        table_format: formato de la tabla agregada
        voltages: tensiones explícitas (sustituyen a spec.sweep)
        include_reference: añadir las filas de anclaje experimental

    Returns:
        DataFrame agregado
    """
    voltages = list(voltages) if voltages is not None else sweep_voltages(spec)
    out_dir = FileHandler.ensure_directory(Path(output_dir) / spec.name)
    point_dir = FileHandler.ensure_directory(out_dir / "points")
    t_end = spec.t_end or DEFAULT_T_END
    config: NeuronConfig = spec.config
    jobs = [(i, config, v, t_end, str(point_dir), sample_interval or spec.sample_interval)
            for i, v in enumerate(voltages)]

    logger.info("=" * 60)
    logger.info(f"BARRIDO: {len(jobs)} puntos, {workers} procesos")
    logger.info("=" * 60)

    if not jobs:
        rows = []
    elif workers <= 1:
        rows = [_sweep_point(job) for job in tqdm(jobs, desc="Barrido", unit="punto")]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(tqdm(pool.map(_sweep_point, jobs), total=len(jobs), desc="Barrido", unit="punto"))

    if rows and include_reference:
        rows.extend(reference_rows())
    table = pd.DataFrame(rows, columns=SWEEP_COLUMNS)
    FileHandler.save_dataframe(table, out_dir / "sweep", format_type=table_format)
    logger.info(f"✓ Barrido completado: {len(voltages)} puntos")
    return table
