"""
Neurona asíncrona: registros de control, bucle de eventos y clasificación de patrones.
"""

from .neuron_core import (
    NeuronConfig,
    SpikeEvent,
    Trace,
    limit_cycle_frequency,
    predicted_spike_times,
    read_trace_csv,
    refractory_period,
    simulate,
    simulate_bare_device,
    solve_refractory_voltage,
)
from .patterns import classify_pattern
from .registers import ShiftRegister, pattern_registers

__all__ = [
    'NeuronConfig', 'SpikeEvent', 'Trace', 'limit_cycle_frequency', 'predicted_spike_times',
    'read_trace_csv', 'refractory_period', 'simulate', 'simulate_bare_device', 'solve_refractory_voltage',
    'classify_pattern', 'ShiftRegister', 'pattern_registers',
]
