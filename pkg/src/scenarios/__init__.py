"""
Escenarios de simulación y ejecución por lotes.
"""

from .runner import run, sweep
from .scenario_base import NeuronScenario
from .scenarios import SCENARIOS, scenario_for

__all__ = ['run', 'sweep', 'NeuronScenario', 'SCENARIOS', 'scenario_for']
