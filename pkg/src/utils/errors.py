"""
Excepciones del simulador.

Dos familias: errores de configuración (código de salida 2) y errores
numéricos de simulación (código de salida 3).
"""


class ConfigError(ValueError):
    """Configuración inválida (archivo, clave o valor)."""

    def __init__(self, message: str, field: str = None, line: int = None):
        self.field = field
        self.line = line
        location = []
        if field:
            location.append(f"campo '{field}'")
        if line:
            location.append(f"línea {line}")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)


class SimulationError(RuntimeError):
    """Fallo numérico durante una simulación."""


class DeviceDomainError(SimulationError, ValueError):
    """Entradas fuera del dominio del modelo (negativas o no finitas)."""


class IntegrationError(SimulationError):
    """El integrador no pudo cumplir el tope de ΔT con el subpaso mínimo."""


class SolverError(SimulationError):
    """El punto de operación del circuito serie no converge."""


class StimulusDomainError(SimulationError, ValueError):
    """Se consultó un estímulo fuera de su dominio temporal."""


class NeverFiresError(SimulationError):
    """Una rama nunca alcanza el umbral de disparo."""


class CalibrationInfeasibleError(SimulationError):
    """Ningún arranque produce disparo para alguna observación."""


class PatternError(ValueError):
    """Muy pocos disparos para clasificar un patrón."""


class LimitCycleCollapseError(SimulationError):
    """Las fases de calentamiento se acortan sin límite: el ciclo de disparo colapsa."""
