"""
Modelo electrotérmico del dispositivo, integrador adaptativo y red serie.
"""

from .circuit_solver import OperatingPoint, SeriesNetwork, network_load, solve_operating_point
from .device_model import (
    NOMINAL_PARAMS,
    DeviceParams,
    DeviceState,
    calibrated_thermal_params,
    integration_params,
    ohmic_current,
    refractory_params,
    runaway_threshold,
    sclc_current,
    spike_time,
    steady_state_temperature,
    step_state,
    temperature_derivative,
    total_current,
)
from .integrator import AdaptiveStepper, IntegratorSettings

__all__ = [
    'OperatingPoint', 'SeriesNetwork', 'network_load', 'solve_operating_point',
    'NOMINAL_PARAMS', 'DeviceParams', 'DeviceState', 'calibrated_thermal_params', 'integration_params',
    'ohmic_current', 'refractory_params', 'runaway_threshold', 'sclc_current', 'spike_time',
    'steady_state_temperature', 'step_state', 'temperature_derivative', 'total_current', 'AdaptiveStepper',
    'IntegratorSettings',
]
