"""
Escenarios concretos: régimen constante, patrones CH/IB, dos sinusoides, barrido refractario,
réplica experimental, informe de escalado y calibración.
"""
import logging
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict

import pandas as pd

from config import (
    N_STARTS,
    REPLICATION_SLOW_WIDTH_S,
    REPLICATION_WIDTH_S,
    SIMULATION_ANCHORS,
    SINUSOID_AMPLITUDE_V,
    SINUSOID_DC_V,
    SINUSOID_F1_HZ,
    SINUSOID_F2_HZ,
)
from src.analysis import calibration, scaling
from src.neuron.neuron_core import (
    limit_cycle_frequency,
    refractory_period,
    simulate,
    simulate_bare_device,
    solve_refractory_voltage,
)
from src.scenarios.scenario_base import NeuronScenario
from src.stimuli.waveforms import beat_period, carrier_regions, constant, sinusoid_sum, waveform_from_dict
from src.utils.errors import ConfigError, NeverFiresError
from src.utils.file_handlers import FileHandler

logger = logging.getLogger(__name__)

DEFAULT_V_INPUT = -1.6
DEFAULT_T_END = 12e-6
PATTERN_V_INPUT = -2.4
PATTERN_T_END = 18e-6
REFRACTORY_V_INPUT = -2.2
REFRACTORY_TARGETS = (200e-9, 400e-9)


class ConstantScenario(NeuronScenario):
    """Disparo regular bajo entrada constante."""

    kind = "constant"
    description = "Neurona completa con estímulo constante"

    def execute(self) -> Dict[str, Any]:
        spec = self.spec
        v_in = spec.stimulus.get("v_input_v", DEFAULT_V_INPUT)
        t_end = spec.t_end or DEFAULT_T_END
        predictions = self._predictions(v_in)
        trace = simulate(spec.config, constant(v_in, t_end), t_end)
        extra = {'v_input_v': v_in, 'predictions': predictions}
        report = self.write_trace(trace, extra=extra)
        summary = dict(report['summary'])
        summary.update(extra)
        logger.info(f"  Frecuencia simulada: {summary['frequency_hz'] / 1e3:.1f} kHz "
                     f"({summary['spike_count']} disparos)")
        return summary

    def _predictions(self, v_in: float) -> Dict[str, Any]:
        try:
            return {
                'refractory_period_s': refractory_period(self.spec.config),
                'limit_cycle_frequency_hz': limit_cycle_frequency(self.spec.config, v_in),
            }
        except NeverFiresError as e:
            logger.warning(f"  ⚠️ {e}")
            return {'refractory_period_s': None, 'limit_cycle_frequency_hz': None}


class PatternScenario(NeuronScenario):
    """Patrones CH / IB programados en el Registro 1."""

    description = "Patrón de ráfagas programado por el Registro 1"

    def __init__(self, spec, output_dir, **kwargs):
        super().__init__(spec, output_dir, **kwargs)
        self.pattern = spec.kind.split(":", 1)[1]
        self.kind = spec.kind

    def execute(self) -> Dict[str, Any]:
        spec = self.spec
        config = spec.config.with_pattern(self.pattern)
        v_in = spec.stimulus.get("v_input_v", PATTERN_V_INPUT)
        t_end = spec.t_end or PATTERN_T_END
        trace = simulate(config, constant(v_in, t_end), t_end)
        extra = {
            'programmed_pattern': self.pattern,
            'register1_init': str(config.register1_init),
            'register1_wrap': config.register1_init.wrap,
            'register1_msb_sequence': trace.register1_msb_sequence(),
        }
        report = self.write_trace(trace, extra=extra)
        summary = dict(report['summary'])
        summary.update(extra)
        if summary['pattern'] not in (self.pattern, "insufficient"):
            logger.warning(f"  ⚠️ Patrón clasificado '{summary['pattern']}' distinto del programado "
                           f"'{self.pattern}'; revisar R_C y v_refractory")
        return summary


class SinusoidScenario(NeuronScenario):
    """Dos sinusoides superpuestas: disparos por región de la envolvente."""

    kind = "sinusoid"
    description = "Entrada variable en el tiempo (suma de dos sinusoides)"

    def execute(self) -> Dict[str, Any]:
        st = self.spec.stimulus
        f1 = st.get("f1_hz", SINUSOID_F1_HZ)
        f2 = st.get("f2_hz", SINUSOID_F2_HZ)
        amplitude = st.get("amplitude_v", SINUSOID_AMPLITUDE_V)
        dc = st.get("dc_v", SINUSOID_DC_V)
        t_end = self.spec.t_end or beat_period(f1, f2)
        trace = simulate(self.spec.config, sinusoid_sum(f1, f2, amplitude, dc, t_end), t_end)

        regions = carrier_regions(f1, f2, amplitude, dc)
        period = beat_period(f1, f2)
        spikes = trace.spike_times() % period
        regions["spikes"] = [int(((spikes >= s) & (spikes < e)).sum())
                             for s, e in zip(regions["start_s"], regions["end_s"])]
        self.write_table(regions, "regions")
        per_label = {label: int(n) for label, n in regions.groupby("label")["spikes"].sum().items()}
        report = self.write_trace(trace, extra={'spikes_per_label': per_label})
        summary = dict(report['summary'])
        summary['spikes_per_label'] = per_label
        logger.info(f"  Disparos por región: {per_label}")
        return summary


class RefractorySweepScenario(NeuronScenario):
    """Control del periodo refractario mediante v_refractory."""

    kind = "refractory-sweep"
    description = "Periodos refractarios objetivo y hueco de reposo simulado"

    def execute(self) -> Dict[str, Any]:
        spec = self.spec
        v_in = spec.stimulus.get("v_input_v", REFRACTORY_V_INPUT)
        targets = spec.refractory_targets or list(REFRACTORY_TARGETS)
        rows = []
        for target in targets:
            v_ref = solve_refractory_voltage(spec.config, target)
            rows.append(self._measure(v_in, v_ref, target))
        for v_ref in spec.sweep.get("v_refractory_v", []):
            rows.append(self._measure(v_in, v_ref, None))
        table = pd.DataFrame(rows)
        self.write_table(table, "refractory_sweep")
        return {'v_input_v': v_in, 'points': rows}

    def _measure(self, v_in: float, v_ref: float, target) -> Dict[str, Any]:
        config = replace(self.spec.config, v_refractory=v_ref)
        predicted = refractory_period(config)
        t_end = self.spec.t_end or 4 * predicted + 2e-6
        trace = simulate(config, constant(v_in, t_end), t_end)
        gaps = trace.quiescent_gaps()
        first_gap = float(gaps[0]) if len(gaps) else None
        logger.info(f"  v_refractory={v_ref:.4f} V: predicho {predicted * 1e9:.1f} ns, "
                    f"simulado {first_gap * 1e9 if first_gap else float('nan'):.1f} ns")
        return {'target_s': target, 'v_refractory_v': v_ref, 'predicted_gap_s': predicted,
                'first_gap_s': first_gap, 'frequency_hz': trace.frequency()}


class ReplicationScenario(NeuronScenario):
    """Réplica experimental: pulsos aplicados directamente a un dispositivo aislado."""

    kind = "experiment-replication"
    description = "Dispositivo aislado con programa de pulsos; disparo = compliance"

    def validate(self) -> Dict[str, Any]:
        result = super().validate()
        if self.spec.stimulus.get("type", "pulses") == "constant" and not self.spec.t_end:
            result['is_valid'] = False
            result['errors'].append("Un estímulo constante necesita t_end_s")
        return result

    def execute(self) -> Dict[str, Any]:
        st = dict(self.spec.stimulus) or {"type": "chattering", "width_s": REPLICATION_WIDTH_S,
                                          "slow_width_s": REPLICATION_SLOW_WIDTH_S}
        st.setdefault("type", "pulses")
        stimulus = waveform_from_dict(st, self.spec.t_end)
        if stimulus.duration == 0:
            raise ConfigError("El programa de pulsos está vacío", field="stimulus.levels")
        t_end = self.spec.t_end or stimulus.duration
        trace = simulate_bare_device(self.spec.config.device_params_input, stimulus, t_end,
                                     settings=self.spec.config.settings)
        report = self.write_trace(trace, extra={'stimulus_type': st["type"]})
        summary = dict(report['summary'])
        summary['stimulus_type'] = st["type"]
        return summary


class ScalingScenario(NeuronScenario):
    """Informe de escalado: τ_RC frente a τ_th y área en F²."""

    kind = "scaling-report"
    description = "Constantes de tiempo y estimación de área"

    def execute(self) -> Dict[str, Any]:
        sc = self.spec.scaling
        p = self.spec.config.device_params_input
        overrides = {}
        if "eps_r" in sc:
            overrides["eps_r"] = sc["eps_r"]
        if "d_nm" in sc:
            overrides["d"] = sc["d_nm"] * 1e-9
        if "v_v" in sc:
            overrides["v"] = sc["v_v"]
        if "j_d_a_per_m2" in sc:
            overrides["j_d"] = sc["j_d_a_per_m2"]
        if "c_v_j_per_k_m3" in sc:
            overrides["c_v"] = sc["c_v_j_per_k_m3"]
        if "length_nm" in sc:
            overrides["length"] = sc["length_nm"] * 1e-9
        inputs = scaling.ScalingInputs.from_device(p, delta_t=sc.get("delta_t_k"), settings=self.spec.config.settings,
                                                   **overrides)
        area = sc.get("area_um2", p.area * 1e12) * 1e-12
        table = scaling.comparison_table(inputs, area=area)
        budget = scaling.transistor_budget()
        self.write_table(table, "comparison")
        self.write_table(budget, "transistor_budget")
        report = table.to_dict(orient="records")[0]
        report['inputs'] = {k: getattr(inputs, k) for k in ("eps_r", "d", "v", "j_d", "c_v", "delta_t", "length")}
        self.artifacts.append(FileHandler.save_json(report, self.output_dir / "scaling_report.json"))
        logger.info(f"  τ_RC={report['tau_rc_s']:.3e} s, τ_th={report['tau_th_s']:.3e} s, "
                    f"razón={report['tau_ratio']:.0f}, área={report['area_f2']} F²")
        return report


class CalibrationScenario(NeuronScenario):
    """Ajuste de parámetros a tiempos de disparo o a frecuencias de anclaje."""

    kind = "calibrate"
    description = "Calibración multi-arranque Nelder-Mead"

    def validate(self) -> Dict[str, Any]:
        result = super().validate()
        csv = self.spec.calibration.get("observations_csv")
        if csv and not self._resolve(csv).exists():
            result['is_valid'] = False
            result['errors'].append(f"No existe el archivo de observaciones: {csv}")
        return result

    def _resolve(self, path: str) -> Path:
        candidate = Path(path)
        if not candidate.is_absolute() and self.spec.source is not None:
            candidate = self.spec.source.parent / candidate
        return candidate

    def execute(self) -> Dict[str, Any]:
        cal = self.spec.calibration
        n_starts = cal.get("n_starts", N_STARTS)
        bounds = {k: tuple(v) for k, v in cal.get("bounds", {}).items()}
        if "observations_csv" in cal:
            observations = calibration.load_observations(self._resolve(cal["observations_csv"]))
            result = calibration.fit(observations, free=cal.get("free", calibration.DEFAULT_FREE),
                                     bounds=bounds, init=self.spec.config.device_params_input,
                                     n_starts=n_starts, settings=self.spec.config.settings,
                                     method=cal.get("method", "quadrature"))
            rows = pd.DataFrame({'v_volts': [o.v for o in observations],
                                 't_spike_seconds': [o.t_spike for o in observations],
                                 'log_residual': result.residuals})
        else:
            anchors = [(a["v_input_v"], a["frequency_hz"]) for a in cal.get("anchors", [])] or SIMULATION_ANCHORS
            result = calibration.fit_frequency_anchors(self.spec.config, anchors,
                                                       free=cal.get("free", calibration.ANCHOR_FREE),
                                                       bounds=bounds, n_starts=n_starts)
            rows = pd.DataFrame({'v_input_v': [a[0] for a in anchors],
                                 'frequency_hz': [a[1] for a in anchors],
                                 'log_residual': result.residuals})
        self.write_table(rows, "calibration_residuals")
        report = result.to_dict()
        self.artifacts.append(FileHandler.save_json(report, self.output_dir / "calibration.json"))
        return report


SCENARIOS = {
    "constant": ConstantScenario,
    "pattern:CH": PatternScenario,
    "pattern:IB": PatternScenario,
    "sinusoid": SinusoidScenario,
    "refractory-sweep": RefractorySweepScenario,
    "experiment-replication": ReplicationScenario,
    "scaling-report": ScalingScenario,
    "calibrate": CalibrationScenario,
}


def scenario_for(spec, output_dir: Path, **kwargs) -> NeuronScenario:
    """Instancia la clase de escenario correspondiente a spec.kind."""
    try:
        cls = SCENARIOS[spec.kind]
    except KeyError as e:
        raise ConfigError(f"Tipo de escenario desconocido '{spec.kind}'", field="kind") from e
    return cls(spec, output_dir, **kwargs)
