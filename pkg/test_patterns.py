"""
Pruebas de los registros de desplazamiento y del clasificador de patrones.
"""
import numpy as np
import pytest

from src.neuron.patterns import classify_isis, classify_pattern, split_short_long
from src.neuron.registers import TOGGLE_INIT, ShiftRegister, pattern_registers
from src.utils.errors import PatternError


def test_registro_circular():
    reg = ShiftRegister.from_string("1110")
    msbs = []
    for _ in range(8):
        msbs.append(reg.msb)
        reg = reg.shifted()
    assert msbs == [1, 1, 1, 0, 1, 1, 1, 0]
    assert reg.popcount == 3


def test_registro_con_relleno_de_ceros():
    reg = pattern_registers("IB")
    states = []
    for _ in range(5):
        states.append(str(reg))
        reg = reg.shifted()
    assert states == ["1110", "1100", "1000", "0000", "0000"]


def test_registro_de_conmutacion_alterna():
    reg = TOGGLE_INIT
    assert (reg.msb, reg.lsb) == (0, 1)
    reg = reg.shifted()
    assert (reg.msb, reg.lsb) == (1, 0)
    assert reg.shifted() == TOGGLE_INIT


def test_registro_invalido():
    with pytest.raises(ValueError):
        ShiftRegister.from_string("10a1")
    with pytest.raises(ValueError):
        ShiftRegister(())
    with pytest.raises(ValueError):
        pattern_registers("XX")
    assert str(pattern_registers("pattern:CH")) == "1110"


@pytest.mark.parametrize("isis, expected", [
    ([1, 1, 1, 3, 1, 1, 1, 3], "CH"),
    ([1, 1, 3, 1, 1, 1, 3, 1, 1, 1], "CH"),
    ([1, 1, 1, 3, 3, 3, 3], "IB"),
    ([1, 1, 3, 3, 3], "IB"),
    ([1, 1, 1, 1, 1, 1, 1], "RS"),
    ([1.0, 1.05, 0.98, 1.02, 1.0, 1.04], "RS"),
    ([1, 3, 1, 3, 1, 3, 1], "other"),
])
def test_clasificacion_por_isis(isis, expected):
    assert classify_isis(isis) == expected


def test_pocos_disparos():
    with pytest.raises(PatternError):
        classify_pattern([0.0, 1.0, 2.0, 3.0, 4.0])


def test_tiempos_no_crecientes():
    with pytest.raises(ValueError):
        classify_pattern([0.0, 1.0, 1.0, 2.0, 3.0, 4.0])


def test_corte_corto_largo():
    mask, cut = split_short_long([1.0, 1.1, 0.9, 5.0, 5.2])
    assert mask.tolist() == [False, False, False, True, True]
    assert 1.1 < cut < 5.0


def test_escala_temporal_irrelevante():
    isis = np.array([1, 1, 1, 3, 1, 1, 1, 3]) * 250e-9
    assert classify_isis(isis) == "CH"
