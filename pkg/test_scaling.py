"""
Pruebas del análisis de escalado y de la estimación de área.
"""
import pytest

from src.analysis.scaling import (
    ScalingInputs,
    capacitance,
    comparison_table,
    estimate_area,
    runaway_onset_delta_t,
    tau_rc,
    tau_rc_for_area,
    tau_th,
    tau_th_for_area,
    timescale_ratio,
    transistor_budget,
)
from src.models.device_model import NOMINAL_PARAMS


def test_tau_rc_con_valores_de_referencia():
    assert tau_rc(ScalingInputs()) == pytest.approx(1.727e-10, rel=1e-3)


def test_capacidad_de_placas_paralelas():
    assert capacitance(3.9, 2e-9, 100e-12) == pytest.approx(1.7e-12, rel=3e-2)


@pytest.mark.parametrize("area", [1e-14, 1e-12, 100e-12, 1e-9])
def test_el_area_se_cancela(area):
    inp = ScalingInputs()
    assert tau_rc_for_area(inp, area) == pytest.approx(tau_rc(inp), rel=1e-12)
    assert tau_th_for_area(inp, area) == pytest.approx(tau_th(inp), rel=1e-12)


def test_razon_de_constantes_de_tiempo():
    inp = ScalingInputs()
    assert tau_th(inp) == pytest.approx(32.5e-9, rel=1e-12)
    assert timescale_ratio(inp) == pytest.approx(tau_th(inp) / tau_rc(inp), rel=1e-12)
    assert 100 <= timescale_ratio(inp) <= 1000


def test_entradas_desde_el_dispositivo():
    inp = ScalingInputs.from_device(NOMINAL_PARAMS, delta_t=100.0)
    assert inp.c_v == pytest.approx(5e5, rel=1e-12)
    assert inp.j_d == pytest.approx(1e8, rel=1e-12)
    assert tau_th(inp) == pytest.approx(tau_th(ScalingInputs()), rel=1e-12)


def test_salto_de_temperatura_en_el_embalamiento():
    delta_t = runaway_onset_delta_t(NOMINAL_PARAMS)
    assert 0 < delta_t < 1000


def test_entradas_no_positivas():
    with pytest.raises(ValueError):
        ScalingInputs(d=0.0)


def test_area_en_f2():
    assert estimate_area(119) == 11900
    assert estimate_area(0) == 0
    with pytest.raises(ValueError):
        estimate_area(-1)


def test_presupuesto_de_transistores():
    budget = transistor_budget()
    assert budget["component"].iloc[-1] == "total"
    assert budget["transistors"].iloc[-1] == 119
    assert budget["transistors"].iloc[:-1].sum() == 119


def test_fila_de_la_tabla_comparativa():
    row = comparison_table(ScalingInputs()).iloc[0]
    assert row["work"] == "This Work"
    assert row["transistor_count"] == 119
    assert row["area_f2"] == 11900
    assert row["tau_ratio"] == pytest.approx(timescale_ratio(ScalingInputs()))
