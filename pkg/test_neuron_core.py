"""
Pruebas de la neurona completa (bloques de integración, refractario y conmutación).
"""
from dataclasses import replace

import numpy as np
import pandas as pd
import pytest

from src.analysis.trace_analyzer import summarize, summary_from_csv
from src.models.device_model import calibrated_thermal_params, spike_time
from src.models.integrator import IntegratorSettings
from src.neuron.neuron_core import (
    INTEGRATION,
    REFRACTORY,
    TRACE_COLUMNS,
    NeuronConfig,
    limit_cycle_frequency,
    predicted_spike_times,
    read_trace_csv,
    refractory_period,
    simulate,
    simulate_bare_device,
    solve_refractory_voltage,
)
from src.neuron.patterns import classify_pattern, split_short_long
from src.neuron.registers import ShiftRegister
from src.stimuli.waveforms import constant
from src.utils.errors import LimitCycleCollapseError, NeverFiresError, StimulusDomainError


@pytest.fixture(scope="module")
def regular_trace():
    config = NeuronConfig(settings=IntegratorSettings(delta_t_step=2.0, rtol=1e-6, atol=1e-5))
    return config, simulate(config, constant(-2.0, 3e-6), 3e-6)


def test_sin_estimulo_no_hay_disparos(neuron_config):
    trace = simulate(neuron_config, constant(0.0, 1e-6), 1e-6)
    assert trace.events == []
    assert (trace.frame["spike"] == 0).all()
    assert np.allclose(trace.frame["temperature_integration_k"], 300.0)
    assert np.allclose(trace.frame["temperature_refractory_k"], 300.0)


def test_bloques_mutuamente_excluyentes(regular_trace):
    _, trace = regular_trace
    frame = trace.frame
    assert (frame["s1_closed"] != frame["s2_closed"]).all()
    sources = [e.source for e in trace.events]
    assert len(sources) >= 2
    assert sources[0] == INTEGRATION
    assert all(a != b for a, b in zip(sources[:-1], sources[1:]))


def test_primer_disparo_coincide_con_el_mapa_de_ciclo(regular_trace):
    config, trace = regular_trace
    predicted = predicted_spike_times(config, -2.0, 1)
    assert trace.spike_times(INTEGRATION)[0] == pytest.approx(predicted[0], rel=2e-3)


def test_primer_hueco_igual_al_periodo_refractario(regular_trace):
    config, trace = regular_trace
    gaps = trace.quiescent_gaps()
    assert len(gaps) >= 1
    assert gaps[0] == pytest.approx(refractory_period(config), rel=2e-3)
    assert np.all(gaps[1:] <= gaps[0] * (1 + 1e-6))


def test_simulacion_determinista(neuron_config):
    a = simulate(neuron_config, constant(-2.0, 1.5e-6), 1.5e-6)
    b = simulate(neuron_config, constant(-2.0, 1.5e-6), 1.5e-6)
    pd.testing.assert_frame_equal(a.frame, b.frame)
    assert a.events == b.events


@pytest.mark.parametrize("pattern, expected", [
    ("CH", [1, 1, 1, 0, 1, 1, 1, 0]),
    ("IB", [1, 1, 1, 0, 0, 0, 0, 0]),
])
def test_secuencia_msb_del_registro_1(neuron_config, pattern, expected):
    config = neuron_config.with_pattern(pattern)
    trace = simulate(config, constant(-2.4, 10e-6), 10e-6)
    sequence = trace.register1_msb_sequence()
    assert len(sequence) >= 5
    n = min(len(sequence), len(expected))
    assert sequence[:n] == expected[:n]


def test_latencia_del_detector_mantiene_la_alternancia(neuron_config):
    config = neuron_config.with_values(detector_latency=5e-9)
    trace = simulate(config, constant(-2.0, 2e-6), 2e-6)
    sources = [e.source for e in trace.events]
    assert sources and sources[0] == INTEGRATION
    assert all(a != b for a, b in zip(sources[:-1], sources[1:]))
    assert np.all(np.diff([e.time for e in trace.events]) >= 5e-9 * (1 - 1e-9))


def test_inversion_del_periodo_refractario(neuron_config):
    v_200 = solve_refractory_voltage(neuron_config, 200e-9)
    v_400 = solve_refractory_voltage(neuron_config, 400e-9)
    assert v_200 < 0 and v_400 < 0
    assert abs(v_200) > abs(v_400)
    for v, target in ((v_200, 200e-9), (v_400, 400e-9)):
        period = refractory_period(replace(neuron_config, v_refractory=v), method="quadrature")
        assert period == pytest.approx(target, rel=1e-4)


def test_periodo_refractario_decrece_con_la_tension(neuron_config):
    periods = [refractory_period(replace(neuron_config, v_refractory=v), method="quadrature")
               for v in (-1.6, -2.0, -2.4)]
    assert periods[0] > periods[1] > periods[2]


def test_rama_refractaria_subumbral(neuron_config):
    with pytest.raises(NeverFiresError):
        refractory_period(replace(neuron_config, v_refractory=-0.3))


def test_configuracion_invalida(neuron_config):
    with pytest.raises(ValueError):
        neuron_config.with_values(register1_init=ShiftRegister((1, 1, 1)))
    with pytest.raises(ValueError):
        neuron_config.with_values(register2_init=ShiftRegister((1, 1)))
    with pytest.raises(ValueError):
        neuron_config.with_values(v_th_detect=1.0)


def test_t_end_fuera_del_estimulo(neuron_config):
    with pytest.raises(StimulusDomainError):
        simulate(neuron_config, constant(-2.0, 1e-6), 2e-6)


def test_dispositivo_aislado_un_solo_disparo(calibrated_params):
    trace = simulate_bare_device(calibrated_params, constant(2.0, 2e-6), 2e-6)
    assert len(trace.events) == 1
    assert trace.events[0].time == pytest.approx(spike_time(2.0, calibrated_params), rel=1e-3)
    assert set(trace.frame["block"]) == {"device"}


def test_traza_csv_reproduce_el_resumen(regular_trace, tmp_path):
    _, trace = regular_trace
    path = trace.to_csv(tmp_path / "traza.csv", sample_interval=1e-9)
    frame = read_trace_csv(path)
    assert list(frame.columns) == TRACE_COLUMNS
    assert set(frame["spike"].unique()) <= {0, 1}
    assert int(frame["spike"].sum()) == len(trace.events)
    assert summary_from_csv(path) == summarize(trace.frame)


def test_decimado_conserva_los_disparos(regular_trace):
    _, trace = regular_trace
    coarse = trace.decimate(100e-9)
    assert len(coarse) < len(trace.frame)
    assert int(coarse["spike"].sum()) == len(trace.events)
    assert coarse["time_s"].iloc[-1] == trace.frame["time_s"].iloc[-1]
    sources = coarse.loc[coarse["spike"] == 1, "block"].tolist()
    assert sources == [e.source for e in trace.events]
    assert set(sources) <= {INTEGRATION, REFRACTORY}


def _legacy_config(settings):
    """Ambas ramas con el dispositivo lento de 24 pF: el refractario no se enfría entre disparos."""
    return NeuronConfig(device_params_input=calibrated_thermal_params(),
                        device_params_refractory=calibrated_thermal_params(),
                        v_refractory=-1.6, settings=settings)


def test_colapso_del_ciclo_en_el_mapa(fast_settings):
    with pytest.raises(LimitCycleCollapseError):
        predicted_spike_times(_legacy_config(fast_settings), -1.6, 24)
    with pytest.raises(LimitCycleCollapseError):
        limit_cycle_frequency(_legacy_config(fast_settings), -1.6)


def test_colapso_del_ciclo_en_la_simulacion(fast_settings):
    with pytest.raises(LimitCycleCollapseError):
        simulate(_legacy_config(fast_settings), constant(-1.6, 4e-6), 4e-6)


def test_preset_por_defecto_sin_colapso(neuron_config):
    spikes = predicted_spike_times(neuron_config, -1.6, 24)
    isis = np.diff(spikes)
    assert isis[-1] == pytest.approx(isis[-2], rel=1e-4)
    trace = simulate(neuron_config, constant(-1.6, 12e-6), 12e-6)
    assert trace.frequency() == pytest.approx(limit_cycle_frequency(neuron_config, -1.6), rel=2e-2)


def test_hueco_refractario_a_2_2_v(neuron_config):
    v_200 = solve_refractory_voltage(neuron_config, 200e-9)
    v_400 = solve_refractory_voltage(neuron_config, 400e-9)
    sweep = sorted([v_200, v_400, -1.02, -1.035, -1.045], key=abs)
    first_gaps = []
    for v_ref in sweep:
        trace = simulate(replace(neuron_config, v_refractory=v_ref), constant(-2.2, 4e-6), 4e-6)
        gaps = trace.quiescent_gaps()
        assert len(gaps) >= 2
        assert np.ptp(gaps) <= 1e-2 * gaps[0]
        first_gaps.append(gaps[0])
        if v_ref == v_200:
            assert gaps == pytest.approx(np.full(len(gaps), 200e-9), rel=0.10)
        if v_ref == v_400:
            assert gaps == pytest.approx(np.full(len(gaps), 400e-9), rel=0.10)
    assert np.all(np.diff(first_gaps) < 0)


def _labels(isis):
    long_mask, _ = split_short_long(isis)
    return "".join("l" if flag else "s" for flag in long_mask)


def test_patron_ch_a_2_4_v(neuron_config):
    config = neuron_config.with_pattern("CH")
    trace = simulate(config, constant(-2.4, 18e-6), 18e-6)
    times = trace.spike_times()
    assert classify_pattern(times) == "CH"
    labels = _labels(np.diff(times))
    assert labels.startswith("ssl")
    assert labels.count("sssl") >= 3
    assert trace.register1_msb_sequence()[:12] == [1, 1, 1, 0] * 3


def test_patron_ib_a_2_4_v(neuron_config):
    config = neuron_config.with_pattern("IB")
    trace = simulate(config, constant(-2.4, 18e-6), 18e-6)
    times = trace.spike_times()
    assert classify_pattern(times) == "IB"
    # Los tres disparos rápidos abren el tren: dos ISIs cortos y después solo largos
    labels = _labels(np.diff(times))
    assert labels.startswith("ss")
    burst = len(labels) - len(labels.lstrip("s"))
    assert 1 <= burst <= 3
    assert set(labels[burst:]) == {"l"}
    assert len(labels[burst:]) >= 4
    assert trace.register1_msb_sequence()[:5] == [1, 1, 1, 0, 0]


def test_cien_escenarios_aleatorios_excluyentes_y_deterministas(neuron_config):
    rng = np.random.default_rng(3)
    for _ in range(100):
        config = neuron_config.with_pattern(str(rng.choice(["RS", "CH", "IB"]))).with_values(
            v_refractory=float(rng.uniform(-1.07, -1.02)),
            detector_latency=float(rng.choice([0.0, 2e-9])),
        )
        v_in = float(rng.uniform(-2.4, -1.8))
        a = simulate(config, constant(v_in, 1.2e-6), 1.2e-6)
        frame = a.frame
        assert (frame["s1_closed"] != frame["s2_closed"]).all()
        sources = [e.source for e in a.events]
        assert not sources or sources[0] == INTEGRATION
        assert all(x != y for x, y in zip(sources[:-1], sources[1:]))
        b = simulate(config, constant(v_in, 1.2e-6), 1.2e-6)
        pd.testing.assert_frame_equal(a.frame, b.frame)
        assert a.events == b.events
