"""
Pruebas de las formas de onda de estímulo.
"""
import numpy as np
import pytest

from config import RESET_GAP_S
from src.stimuli.waveforms import (
    Waveform,
    beat_period,
    bursting_program,
    carrier_regions,
    chattering_program,
    constant,
    pulse_program,
    sinusoid_sum,
    waveform_from_dict,
)
from src.utils.errors import StimulusDomainError


def test_suma_de_sinusoides_en_el_origen_vale_dc():
    wave = sinusoid_sum(250e3, 350e3, -0.7, -0.7, 20e-6)
    assert wave(0.0) == pytest.approx(-0.7)


def test_extremos_de_la_suma_de_sinusoides():
    wave = sinusoid_sum(250e3, 350e3, -0.7, -0.7, 20e-6)
    values = wave.sample(np.linspace(0.0, 20e-6, 200001))
    assert values.min() >= -2.1 - 1e-9
    assert values.max() <= 0.7 + 1e-9
    assert values.min() < -1.9
    assert values.max() > 0.5


def test_periodo_de_batido():
    assert beat_period(250e3, 350e3) == pytest.approx(20e-6)


def test_regiones_de_la_envolvente():
    regions = carrier_regions(250e3, 350e3, -0.7, -0.7)
    assert len(regions) == 6
    assert regions["label"].value_counts().to_dict() == {"high": 2, "moderate": 2, "low": 2}
    assert regions["start_s"].iloc[0] == 0.0
    assert regions["end_s"].iloc[-1] == pytest.approx(20e-6)
    high = regions.loc[regions["label"] == "high", "peak_v"].min()
    low = regions.loc[regions["label"] == "low", "peak_v"].max()
    assert high > low


def test_programa_de_pulsos_duracion_y_huecos():
    wave = pulse_program([(-2.4, 300e-9, 3), (-1.7, 300e-9, 1)], gap=100e-9, cycles=2)
    assert wave.duration == pytest.approx(8 * 300e-9 + 7 * 100e-9)
    assert wave(150e-9) == -2.4
    assert wave(350e-9) == 0.0
    assert wave(wave.duration) == -1.7
    assert len(wave.breakpoints) == 14


def test_programa_vacio_es_la_forma_de_onda_nula():
    wave = pulse_program([])
    assert wave.duration == 0.0
    assert wave(0.0) == 0.0
    with pytest.raises(StimulusDomainError):
        wave(1e-9)


def test_fuera_de_dominio():
    wave = constant(-1.6, 1e-6)
    with pytest.raises(StimulusDomainError):
        wave(2e-6)
    with pytest.raises(StimulusDomainError):
        wave(-1e-9)
    assert wave(1e-6) == -1.6


def test_evaluador_fijo_al_tramo():
    wave = pulse_program([(-2.0, 100e-9, 1), (-1.0, 100e-9, 1)], gap=0.0)
    evaluate = wave.evaluator(50e-9)
    assert evaluate(100e-9) == -2.0
    assert wave.next_breakpoint(50e-9) == pytest.approx(100e-9)
    assert wave.next_breakpoint(100e-9) == pytest.approx(200e-9)


def test_programas_de_replica():
    ch = chattering_program(300e-9)
    ib = bursting_program(300e-9, n_slow=5)
    assert ch.duration == pytest.approx(12 * 300e-9 + 11 * RESET_GAP_S)
    assert ib.duration == pytest.approx(8 * 300e-9 + 7 * RESET_GAP_S)
    assert ib(ib.duration) == -1.9


def test_hueco_de_reset_por_defecto():
    wave = pulse_program([(-2.0, 100e-9, 2)])
    assert wave.duration == pytest.approx(200e-9 + RESET_GAP_S)
    assert wave(100e-9 + 0.5 * RESET_GAP_S) == 0.0
    from_dict = waveform_from_dict({"type": "pulses", "levels": [{"v_v": -2.0, "width_s": 1e-7, "repeat": 2}]})
    assert from_dict.duration == wave.duration


def test_pulso_lento_alargado():
    ch = chattering_program(300e-9, slow_width=600e-9, cycles=1)
    assert ch.duration == pytest.approx(3 * 300e-9 + 600e-9 + 3 * RESET_GAP_S)
    assert ch(ch.duration - 500e-9) == -1.7
    ib = waveform_from_dict({"type": "bursting", "width_s": 300e-9, "slow_width_s": 600e-9, "n_slow": 2})
    assert ib.duration == pytest.approx(3 * 300e-9 + 2 * 600e-9 + 4 * RESET_GAP_S)


def test_exportacion_muestreada():
    frame = constant(-1.6, 10e-9).to_frame(1e-9)
    assert list(frame.columns) == ["time_s", "v_in_v"]
    assert len(frame) == 11
    assert (frame["v_in_v"] == -1.6).all()


def test_construccion_desde_diccionario():
    wave = waveform_from_dict({"type": "pulses", "gap_s": 50e-9,
                               "levels": [{"v_v": -2.0, "width_s": 1e-7, "repeat": 2}]})
    assert isinstance(wave, Waveform)
    assert wave.duration == pytest.approx(250e-9)
    sine = waveform_from_dict({"type": "sinusoid", "f1_hz": 250e3, "f2_hz": 350e3,
                               "amplitude_v": -0.7, "dc_v": -0.7}, t_end=1e-6)
    assert sine.max_step_hint == pytest.approx(1 / (40 * 350e3))
