"""
Clase base para los escenarios de simulación.
"""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, List, Optional
import logging

import pandas as pd

from src.analysis.trace_analyzer import TraceAnalyzer
from src.neuron.neuron_core import Trace
from src.utils.config_loader import ScenarioSpec
from src.utils.errors import ConfigError
from src.utils.file_handlers import FileHandler

logger = logging.getLogger(__name__)


class NeuronScenario(ABC):
    """
    Clase base abstracta para escenarios.

    Define el flujo común: validar, ejecutar y escribir artefactos en `output_dir`.
    """

    kind: str = ""
    description: str = ""

    def __init__(self, spec: ScenarioSpec, output_dir: Path, plot: bool = False,
                 sample_interval: Optional[float] = None, table_format: str = "csv"):
        """
        Inicializa el escenario.

        Args:
            spec: escenario validado
            output_dir: directorio de artefactos
            plot: generar gráficas SVG
            sample_interval: intervalo de muestreo de la traza (sustituye al del escenario)
            table_format: formato de las tablas agregadas ('csv', 'excel', 'json')
        """
        self.spec = spec
        self.name = spec.name
        self.output_dir = FileHandler.ensure_directory(Path(output_dir))
        self.plot = plot
        self.sample_interval = sample_interval or spec.sample_interval
        self.table_format = table_format
        self.artifacts: List[Path] = []

    def validate(self) -> Dict[str, Any]:
        """Comprobaciones previas propias del escenario; por defecto ninguna."""
        return {'is_valid': True, 'errors': [], 'warnings': []}

    @abstractmethod
    def execute(self) -> Dict[str, Any]:
        """
        Ejecuta la simulación y escribe los artefactos.

        Returns:
            Resumen del escenario
        """
        pass

    def get_scenario_info(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'kind': self.kind,
            'description': self.description,
            'source': str(self.spec.source) if self.spec.source else None,
        }

    def process(self) -> Dict[str, Any]:
        """
        Ejecuta el flujo completo del escenario.

        Returns:
            Diccionario con 'success', 'summary' y 'artifacts'

        Raises:
            ConfigError: validación fallida
            SimulationError: fallo numérico, con el nombre del escenario en el log
        """
        logger.info("=" * 60)
        logger.info(f"Escenario {self.kind}: {self.name}")
        logger.info("=" * 60)

        validation = self.validate()
        for warning in validation.get('warnings', []):
            logger.warning(f"  ⚠️ {warning}")
        if not validation.get('is_valid', True):
            raise ConfigError("; ".join(validation['errors']), field=self.name)

        try:
            summary = self.execute()
        except Exception as e:
            logger.error(f"Error en el escenario '{self.name}': {e}", exc_info=True)
            raise

        logger.info(f"✓ Escenario completado: {len(self.artifacts)} artefactos en {self.output_dir}")
        return {
            'success': True,
            'summary': summary,
            'artifacts': [str(p) for p in self.artifacts],
            'scenario_info': self.get_scenario_info(),
        }

    # Utilidades comunes de escritura

    def write_trace(self, trace: Trace, stem: str = "trace", extra: Optional[Dict] = None) -> Dict[str, Any]:
        """Traza CSV, eventos CSV, resumen JSON y gráfica opcional."""
        trace_path = trace.to_csv(self.output_dir / f"{stem}.csv", self.sample_interval)
        events_path = FileHandler.save_dataframe(trace.events_frame(), self.output_dir / f"{stem}_events.csv")
        analyzer = TraceAnalyzer(output_dir=self.output_dir)
        report = analyzer.analyze(trace.frame, output_name=f"{stem}_summary", plot=self.plot, extra=extra)
        self.artifacts.extend([trace_path, events_path, self.output_dir / f"{stem}_summary.json"])
        svg_path = self.output_dir / f"{stem}_summary.svg"
        if self.plot and svg_path.exists():
            self.artifacts.append(svg_path)
        return report

    def write_table(self, df: pd.DataFrame, stem: str) -> Optional[Path]:
        path = FileHandler.save_dataframe(df, self.output_dir / stem, format_type=self.table_format)
        if path is not None:
            self.artifacts.append(path)
        return path
