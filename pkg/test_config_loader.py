"""
Pruebas de la carga de escenarios y del manejo de archivos.
"""
import json

import pandas as pd
import pytest

from config import SINUSOID_V_REFRACTORY_V, V_REFRACTORY_V
from src.models.device_model import calibrated_thermal_params, integration_params, refractory_params
from src.utils.config_loader import default_scenario, load_scenario, parse_scenario
from src.utils.errors import ConfigError
from src.utils.file_handlers import FileHandler


def test_clave_desconocida_indica_campo_y_linea():
    text = '{\n  "kind": "constant",\n  "neuron": {\n    "r_x_ohm": 10\n  }\n}\n'
    with pytest.raises(ConfigError) as excinfo:
        parse_scenario(text)
    assert excinfo.value.field == "neuron.r_x_ohm"
    assert excinfo.value.line == 4


def test_tipo_incorrecto():
    text = '{\n  "kind": "constant",\n  "t_end_s": "1e-6"\n}\n'
    with pytest.raises(ConfigError) as excinfo:
        parse_scenario(text)
    assert excinfo.value.field == "t_end_s"
    assert excinfo.value.line == 3


def test_json_mal_formado():
    with pytest.raises(ConfigError) as excinfo:
        parse_scenario('{\n  "kind": "constant",\n  "t_end_s": \n}\n')
    assert excinfo.value.line == 4


def test_tipo_de_escenario_obligatorio_y_conocido():
    with pytest.raises(ConfigError):
        parse_scenario('{"name": "x"}')
    with pytest.raises(ConfigError) as excinfo:
        parse_scenario('{"kind": "pattern:XX"}')
    assert excinfo.value.field == "kind"


def test_unidades_de_tabla_convertidas():
    text = json.dumps({
        "kind": "constant",
        "device": {"c_th_pj_per_k": 30.0, "i_compliance_ma": 12.0},
        "neuron": {"r_s_ohm": 45.0, "register1_bits": "1110", "register1_wrap": False},
    })
    spec = parse_scenario(text)
    p = spec.config.device_params_input
    assert p.c_th == pytest.approx(30e-12)
    assert p.i_compliance == pytest.approx(12e-3)
    assert spec.config.device_params_refractory == refractory_params()
    assert spec.config.network_input.r_s == 45.0
    assert str(spec.config.register1_init) == "1110"
    assert not spec.config.register1_init.wrap


def test_presets_por_tipo_de_escenario():
    constant_config = default_scenario("constant").config
    assert constant_config.device_params_input == integration_params()
    assert constant_config.device_params_refractory.c_th == pytest.approx(0.65e-12)
    assert constant_config.v_refractory == V_REFRACTORY_V
    sinusoid_config = default_scenario("sinusoid").config
    assert sinusoid_config.device_params_input == calibrated_thermal_params()
    assert sinusoid_config.v_refractory == SINUSOID_V_REFRACTORY_V
    plain = parse_scenario('{"kind": "constant", "neuron": {"calibrated_thermal": false}}').config
    assert plain.device_params_refractory == plain.device_params_input


def test_valor_fisico_no_valido():
    with pytest.raises(ConfigError) as excinfo:
        parse_scenario('{\n  "kind": "constant",\n  "device": {"r_th_k_per_w": -5}\n}\n')
    assert excinfo.value.field == "device"
    with pytest.raises(ConfigError):
        parse_scenario('{"kind": "constant", "sample_interval_s": 0}')


def test_archivo_inexistente(tmp_path):
    with pytest.raises(ConfigError):
        load_scenario(tmp_path / "no_existe.json")


def test_nombre_desde_el_archivo(tmp_path):
    path = tmp_path / "regular.json"
    path.write_text('{"kind": "constant", "stimulus": {"v_input_v": -1.8}}', encoding="utf-8")
    spec = load_scenario(path)
    assert spec.name == "regular"
    assert spec.stimulus["v_input_v"] == -1.8
    assert spec.source == path


def test_escenario_por_defecto():
    spec = default_scenario("pattern:CH", t_end=1e-6)
    assert spec.name == "pattern_CH"
    assert spec.t_end == 1e-6
    with pytest.raises(ConfigError):
        default_scenario("desconocido")


def test_guardado_de_tablas(tmp_path):
    frame = pd.DataFrame({"a": [0.1, 1 / 3], "b": ["x", "y"]})
    path = FileHandler.save_dataframe(frame, tmp_path / "tabla")
    assert path.suffix == ".csv"
    restored = pd.read_csv(path, float_precision="round_trip")
    pd.testing.assert_frame_equal(restored, frame)
    assert FileHandler.save_dataframe(frame, tmp_path / "tabla", format_type="parquet") is None
    json_path = FileHandler.save_dataframe(frame, tmp_path / "tabla", format_type="json")
    assert json_path.suffix == ".json"
