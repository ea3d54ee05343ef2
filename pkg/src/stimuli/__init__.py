"""
Estímulos de entrada de la neurona.
"""

from .waveforms import (
    Waveform,
    bursting_program,
    carrier_regions,
    chattering_program,
    constant,
    pulse_program,
    sinusoid_sum,
    waveform_from_dict,
)

__all__ = [
    'Waveform', 'bursting_program', 'carrier_regions', 'chattering_program', 'constant',
    'pulse_program', 'sinusoid_sum', 'waveform_from_dict',
]
