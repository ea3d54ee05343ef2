"""
Manejadores de archivos para las salidas del simulador.
"""

import json
import logging
from pathlib import Path
from typing import Dict, Optional

import pandas as pd

logger = logging.getLogger(__name__)

SUPPORTED_FORMATS = ('csv', 'excel', 'json')


class FileHandler:
    """Utilidades para manejo de archivos."""

    @staticmethod
    def save_dataframe(df: pd.DataFrame, output_path: Path,
                       format_type: str = 'csv', **kwargs) -> Optional[Path]:
        """
        Guarda un DataFrame en diferentes formatos.

        Los CSV se escriben con 17 cifras significativas para que una
        relectura con float_precision='round_trip' sea exacta.

        Args:
            df: DataFrame a guardar
            output_path: Ruta de salida (sin extensión si se especifica format_type)
            format_type: Tipo de archivo ('csv', 'excel', 'json')
            **kwargs: Argumentos adicionales para to_csv, to_excel, etc.

        Returns:
            Ruta escrita, o None si hubo un error
        """
        output_path = Path(output_path)
        fmt = format_type.lower()
        try:
            output_path.parent.mkdir(parents=True, exist_ok=True)
            if fmt == 'csv':
                if not output_path.suffix:
                    output_path = output_path.with_suffix('.csv')
                kwargs.setdefault('float_format', '%.17g')
                df.to_csv(output_path, index=False, encoding='utf-8', **kwargs)
            elif fmt in ['excel', 'xlsx']:
                if not output_path.suffix:
                    output_path = output_path.with_suffix('.xlsx')
                df.to_excel(output_path, index=False, **kwargs)
            elif fmt == 'json':
                if not output_path.suffix:
                    output_path = output_path.with_suffix('.json')
                df.to_json(output_path, orient='records', double_precision=15, **kwargs)
            else:
                raise ValueError(f"Formato no soportado: {format_type}")

            logger.info(f"Archivo guardado: {output_path}")
            return output_path

        except (OSError, ValueError) as e:
            logger.error(f"Error guardando archivo {output_path}: {e}")
            return None

    @staticmethod
    def save_json(data: Dict, output_path: Path) -> Path:
        """Guarda un diccionario como JSON legible."""
        output_path = Path(output_path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        with open(output_path, 'w', encoding='utf-8') as f:
            json.dump(data, f, indent=2, ensure_ascii=False, default=str)
        logger.info(f"Archivo guardado: {output_path}")
        return output_path

    @staticmethod
    def ensure_directory(path: Path) -> Path:
        """Asegura que un directorio existe."""
        path = Path(path)
        path.mkdir(parents=True, exist_ok=True)
        return path
