"""
Utilidades del simulador: excepciones, archivos y carga de escenarios.
"""

from .errors import ConfigError, SimulationError
from .file_handlers import FileHandler

__all__ = ['ConfigError', 'SimulationError', 'FileHandler']
