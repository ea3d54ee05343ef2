"""
Análisis: calibración, escalado y resumen de trazas.
"""

from .calibration import FitResult, SpikeTimeObservation, fit, fit_frequency_anchors, load_observations
from .scaling import ScalingInputs, estimate_area, tau_rc, tau_th, transistor_budget
from .trace_analyzer import TraceAnalyzer, summarize, summary_from_csv

__all__ = [
    'FitResult', 'SpikeTimeObservation', 'fit', 'fit_frequency_anchors', 'load_observations',
    'ScalingInputs', 'estimate_area', 'tau_rc', 'tau_th', 'transistor_budget',
    'TraceAnalyzer', 'summarize', 'summary_from_csv',
]
