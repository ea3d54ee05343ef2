"""
Pruebas de la calibración multi-arranque.
"""
from dataclasses import replace

import numpy as np
import pandas as pd
import pytest

from config import EXPERIMENT_ANCHORS, SIMULATION_ANCHORS
from src.analysis.calibration import (
    SpikeTimeObservation,
    apply_anchor_values,
    fit_frequency_anchors,
    fit,
    load_observations,
    synthetic_observations,
)
from src.neuron.neuron_core import NeuronConfig, limit_cycle_frequency
from src.utils.errors import CalibrationInfeasibleError, ConfigError

VOLTAGES = [1.5, 1.7, 1.9, 2.1, 2.4]


def test_sin_parametros_libres_devuelve_los_residuos(calibrated_params):
    observations = synthetic_observations(calibrated_params, VOLTAGES)
    result = fit(observations, free=[], init=calibrated_params)
    assert result.values == {}
    assert result.iterations == 0
    assert np.max(np.abs(result.residuals)) < 1e-9


@pytest.mark.parametrize("factor", [1.0, 1.1])
def test_recupera_c_th(calibrated_params, factor):
    truth = calibrated_params.with_values(c_th=calibrated_params.c_th * factor)
    observations = synthetic_observations(truth, VOLTAGES)
    init = calibrated_params.with_values(c_th=10e-12)
    result = fit(observations, free=["c_th"], init=init, n_starts=1, xatol=1e-6)
    assert result.values["c_th"] == pytest.approx(truth.c_th, rel=1e-2)
    assert result.rms_log_error < 1e-2


def test_recupera_r_th_y_c_th(calibrated_params):
    observations = synthetic_observations(calibrated_params, VOLTAGES)
    init = calibrated_params.with_values(r_th=1.2 * calibrated_params.r_th, c_th=0.8 * calibrated_params.c_th)
    result = fit(observations, free=["r_th", "c_th"], init=init, n_starts=1, xatol=1e-6)
    assert result.values["r_th"] == pytest.approx(calibrated_params.r_th, rel=2e-2)
    assert result.values["c_th"] == pytest.approx(calibrated_params.c_th, rel=2e-2)


def test_historial_no_creciente(calibrated_params):
    observations = synthetic_observations(calibrated_params, VOLTAGES)
    init = calibrated_params.with_values(c_th=50e-12)
    result = fit(observations, free=["c_th"], init=init, n_starts=2, xatol=1e-5)
    assert len(result.history) > 0
    assert np.all(np.diff(result.history) <= 0)
    assert len(result.starts) == 2


def test_observacion_imposible(calibrated_params):
    observations = [SpikeTimeObservation(0.3, 200e-9), SpikeTimeObservation(2.0, 300e-9)]
    with pytest.raises(CalibrationInfeasibleError):
        fit(observations, free=["c_th"], init=calibrated_params, n_starts=1, maxiter=20)


def test_observaciones_desde_csv(tmp_path):
    path = tmp_path / "observaciones.csv"
    pd.DataFrame({"v_volts": [1.6, 2.0], "t_spike_seconds": [5e-7, 3e-7], "weight": [1.0, 2.0]}).to_csv(
        path, index=False)
    observations = load_observations(path)
    assert observations[1] == SpikeTimeObservation(2.0, 3e-7, 2.0)


def test_cabecera_incorrecta(tmp_path):
    path = tmp_path / "malo.csv"
    path.write_text("v,t\n1.6,5e-7\n", encoding="utf-8")
    with pytest.raises(ConfigError) as excinfo:
        load_observations(path)
    assert excinfo.value.line == 1


def test_valor_no_valido_indica_la_linea(tmp_path):
    path = tmp_path / "negativo.csv"
    path.write_text("v_volts,t_spike_seconds,weight\n1.6,5e-7,1\n2.0,-3e-7,1\n", encoding="utf-8")
    with pytest.raises(ConfigError) as excinfo:
        load_observations(path)
    assert excinfo.value.line == 3


def test_veinte_verdades_aleatorias_recuperadas(calibrated_params):
    rng = np.random.default_rng(11)
    for _ in range(20):
        truth = calibrated_params.with_values(r_th=float(np.exp(rng.uniform(np.log(2e4), np.log(6e4)))),
                                              c_th=float(np.exp(rng.uniform(np.log(10e-12), np.log(100e-12)))))
        observations = synthetic_observations(truth, VOLTAGES)
        result = fit(observations, free=["r_th", "c_th"], init=calibrated_params, n_starts=1, xatol=1e-6)
        assert result.values["r_th"] == pytest.approx(truth.r_th, rel=2e-2)
        assert result.values["c_th"] == pytest.approx(truth.c_th, rel=2e-2)


def test_anclajes_aplicados_a_la_rama_de_integracion(neuron_config):
    refractory = neuron_config.device_params_refractory
    config = apply_anchor_values(neuron_config, {"c_th": 30e-12, "v_refractory": 2.0, "r_s": 60.0})
    assert config.device_params_input.c_th == 30e-12
    assert config.device_params_refractory == refractory
    assert config.v_refractory == -2.0
    assert config.network_input.r_s == config.network_refractory.r_s == 60.0


def test_frecuencia_inversa_a_c_th(neuron_config):
    base = limit_cycle_frequency(neuron_config, -2.0)
    slower = replace(
        neuron_config,
        device_params_input=neuron_config.device_params_input.with_values(
            c_th=2 * neuron_config.device_params_input.c_th),
        device_params_refractory=neuron_config.device_params_refractory.with_values(
            c_th=2 * neuron_config.device_params_refractory.c_th),
    )
    assert limit_cycle_frequency(slower, -2.0) == pytest.approx(base / 2, rel=1e-3)


def test_c_th_de_integracion_frena_el_disparo(neuron_config):
    base = limit_cycle_frequency(neuron_config, -1.6)
    slower = apply_anchor_values(neuron_config, {"c_th": 1.3 * neuron_config.device_params_input.c_th})
    assert limit_cycle_frequency(slower, -1.6) < base


def test_anclaje_de_frecuencia_recupera_c_th(neuron_config):
    truth = neuron_config.device_params_input.c_th
    target = limit_cycle_frequency(neuron_config, -1.6)
    init = apply_anchor_values(neuron_config, {"c_th": 1.3 * truth})
    assert init.device_params_input.c_th == pytest.approx(1.3 * truth)
    result = fit_frequency_anchors(init, [(-1.6, target)], free=["c_th"], n_starts=1, xatol=1e-6)
    assert result.values["c_th"] == pytest.approx(truth, rel=1e-2)
    assert result.params.device_params_input.c_th == pytest.approx(truth, rel=1e-2)
    assert limit_cycle_frequency(result.params, -1.6) == pytest.approx(target, rel=1e-3)


def test_preset_reproduce_las_frecuencias_de_simulacion():
    config = NeuronConfig()
    (v_low, f_low), (v_high, f_high) = SIMULATION_ANCHORS
    low = limit_cycle_frequency(config, v_low)
    high = limit_cycle_frequency(config, v_high)
    assert low == pytest.approx(f_low, rel=0.10)
    assert high == pytest.approx(f_high, rel=0.10)
    assert high / low == pytest.approx(1.40, rel=0.08)
    for (v, f_measured), f_model in zip(EXPERIMENT_ANCHORS, (low, high)):
        assert limit_cycle_frequency(config, v) == pytest.approx(f_model)
        assert f_model == pytest.approx(f_measured, rel=0.15)
