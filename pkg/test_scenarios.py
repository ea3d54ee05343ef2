"""
Pruebas de los escenarios por defecto (patrones, sinusoides, periodo refractario y réplica).
"""
from dataclasses import replace

import numpy as np
import pytest

from config import REPLICATION_SLOW_WIDTH_S, REPLICATION_WIDTH_S
from src.models.device_model import integration_params
from src.neuron.neuron_core import DEVICE, simulate_bare_device
from src.neuron.patterns import classify_pattern, split_short_long
from src.scenarios.scenarios import scenario_for
from src.stimuli.waveforms import bursting_program
from src.utils.config_loader import default_scenario


def _run(kind, output_dir, settings=None, **overrides):
    spec = default_scenario(kind, **overrides)
    if settings is not None:
        spec = replace(spec, config=spec.config.with_values(settings=settings))
    result = scenario_for(spec, output_dir).process()
    assert result['success']
    return result['summary']


def _labels(isis):
    long_mask, _ = split_short_long(isis)
    return "".join("l" if flag else "s" for flag in long_mask)


def test_escenario_ch_por_defecto(output_dir, fast_settings):
    summary = _run("pattern:CH", output_dir, fast_settings)
    assert summary['pattern'] == "CH"
    assert _labels(summary['isi_s']).count("sssl") >= 3
    assert summary['register1_msb_sequence'][:8] == [1, 1, 1, 0, 1, 1, 1, 0]
    assert (output_dir / "trace.csv").exists()


def test_escenario_ib_por_defecto(output_dir, fast_settings):
    summary = _run("pattern:IB", output_dir, fast_settings)
    assert summary['pattern'] == "IB"
    labels = _labels(summary['isi_s'])
    burst = len(labels) - len(labels.lstrip("s"))
    assert 1 <= burst <= 3
    assert labels[burst:].count("l") == len(labels) - burst >= 4
    assert summary['register1_msb_sequence'][:5] == [1, 1, 1, 0, 0]


def test_barrido_refractario_por_defecto(output_dir, fast_settings):
    summary = _run("refractory-sweep", output_dir, fast_settings)
    points = summary['points']
    assert summary['v_input_v'] == -2.2
    assert [p['target_s'] for p in points] == [200e-9, 400e-9]
    for p in points:
        assert p['first_gap_s'] == pytest.approx(p['target_s'], rel=0.10)
        assert p['predicted_gap_s'] == pytest.approx(p['target_s'], rel=1e-2)
    fast, slow = points
    assert abs(fast['v_refractory_v']) > abs(slow['v_refractory_v'])
    assert fast['first_gap_s'] < slow['first_gap_s']
    assert (output_dir / "refractory_sweep.csv").exists()


def test_regiones_de_la_suma_de_sinusoides(output_dir, fast_settings):
    summary = _run("sinusoid", output_dir, fast_settings)
    per_label = summary['spikes_per_label']
    assert per_label['high'] > per_label['moderate'] > 0
    assert per_label.get('low', 0) == 0


def test_replica_de_chattering_por_defecto(output_dir):
    summary = _run("experiment-replication", output_dir)
    assert summary['source'] == DEVICE
    assert summary['stimulus_type'] == "chattering"
    assert summary['spike_count'] == 12
    assert summary['pattern'] == "CH"
    labels = _labels(summary['isi_s'])
    assert labels.startswith("ssl")
    assert labels.count("sssl") >= 2


def test_replica_de_bursting():
    stimulus = bursting_program(REPLICATION_WIDTH_S, slow_width=REPLICATION_SLOW_WIDTH_S)
    trace = simulate_bare_device(integration_params(), stimulus, stimulus.duration)
    times = trace.spike_times(DEVICE)
    assert len(times) == 8
    assert classify_pattern(times) == "IB"
    assert _labels(np.diff(times)) == "ssl" + "l" * 4
