"""
Carga y validación de archivos de escenario (JSON con unidades en el nombre de cada clave).

Claves desconocidas se rechazan. Los errores de sintaxis informan línea y
columna; los semánticos, la ruta del campo y la línea donde aparece.
"""
import json
import logging
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from config import (
    DELTA_T_STEP_K,
    MAX_STEP_S,
    MIN_STEP_S,
    R_C_OHM,
    R_S_OHM,
    SAMPLE_INTERVAL_S,
    SCENARIO_KINDS,
    SINUSOID_V_REFRACTORY_V,
    V_REFRACTORY_V,
    V_TH_DETECT_V,
)
from src.models.circuit_solver import SeriesNetwork
from src.models.device_model import (
    TABLE_UNIT_KEYS,
    DeviceParams,
    calibrated_thermal_params,
    integration_params,
    refractory_params,
)
from src.models.integrator import IntegratorSettings
from src.neuron.neuron_core import NeuronConfig
from src.neuron.registers import ShiftRegister
from src.utils.errors import ConfigError

logger = logging.getLogger(__name__)

NUMBER = "number"
INTEGER = "integer"
STRING = "string"
BOOLEAN = "boolean"
LIST = "list"
OBJECT = "object"

DEVICE_SCHEMA = {key: NUMBER for key in TABLE_UNIT_KEYS}

NEURON_SCHEMA = {
    "r_s_ohm": NUMBER,
    "r_c_ohm": NUMBER,
    "r_s_refractory_ohm": NUMBER,
    "v_th_detect_v": NUMBER,
    "v_refractory_v": NUMBER,
    "detector_latency_s": NUMBER,
    "register1_bits": STRING,
    "register1_wrap": BOOLEAN,
    "register2_bits": STRING,
    "calibrated_thermal": BOOLEAN,
}

INTEGRATOR_SCHEMA = {
    "delta_t_step_k": NUMBER,
    "min_step_s": NUMBER,
    "max_step_s": NUMBER,
    "initial_step_s": NUMBER,
    "rtol": NUMBER,
    "atol_k": NUMBER,
    "event_resolution_s": NUMBER,
    "scan_resolution_k": NUMBER,
    "max_time_s": NUMBER,
}

STIMULUS_SCHEMA = {
    "type": STRING,
    "v_input_v": NUMBER,
    "f1_hz": NUMBER,
    "f2_hz": NUMBER,
    "amplitude_v": NUMBER,
    "dc_v": NUMBER,
    "levels": LIST,
    "gap_s": NUMBER,
    "cycles": INTEGER,
    "width_s": NUMBER,
    "slow_width_s": NUMBER,
    "n_slow": INTEGER,
}

LEVEL_SCHEMA = {"v_v": NUMBER, "width_s": NUMBER, "repeat": INTEGER}

SWEEP_SCHEMA = {
    "v_input_v": LIST,
    "v_refractory_v": LIST,
    "start_v": NUMBER,
    "stop_v": NUMBER,
    "step_v": NUMBER,
}

CALIBRATION_SCHEMA = {
    "observations_csv": STRING,
    "free": LIST,
    "bounds": OBJECT,
    "n_starts": INTEGER,
    "method": STRING,
    "anchors": LIST,
}

ANCHOR_SCHEMA = {"v_input_v": NUMBER, "frequency_hz": NUMBER}

SCALING_SCHEMA = {
    "eps_r": NUMBER,
    "d_nm": NUMBER,
    "v_v": NUMBER,
    "j_d_a_per_m2": NUMBER,
    "c_v_j_per_k_m3": NUMBER,
    "delta_t_k": NUMBER,
    "length_nm": NUMBER,
    "area_um2": NUMBER,
}

TOP_SCHEMA = {
    "kind": STRING,
    "name": STRING,
    "t_end_s": NUMBER,
    "sample_interval_s": NUMBER,
    "device": OBJECT,
    "device_refractory": OBJECT,
    "neuron": OBJECT,
    "integrator": OBJECT,
    "stimulus": OBJECT,
    "sweep": OBJECT,
    "refractory_targets_s": LIST,
    "calibration": OBJECT,
    "scaling": OBJECT,
}

SECTION_SCHEMAS = {
    "device": DEVICE_SCHEMA,
    "device_refractory": DEVICE_SCHEMA,
    "neuron": NEURON_SCHEMA,
    "integrator": INTEGRATOR_SCHEMA,
    "stimulus": STIMULUS_SCHEMA,
    "sweep": SWEEP_SCHEMA,
    "calibration": CALIBRATION_SCHEMA,
    "scaling": SCALING_SCHEMA,
}

STIMULUS_TYPES = ("constant", "sinusoid", "pulses", "chattering", "bursting")


@dataclass
class ScenarioSpec:
    """Escenario validado y listo para ejecutar."""

    kind: str
    name: str
    config: NeuronConfig
    stimulus: Dict[str, Any] = field(default_factory=dict)
    t_end: Optional[float] = None
    sample_interval: float = SAMPLE_INTERVAL_S
    sweep: Dict[str, Any] = field(default_factory=dict)
    refractory_targets: List[float] = field(default_factory=list)
    calibration: Dict[str, Any] = field(default_factory=dict)
    scaling: Dict[str, Any] = field(default_factory=dict)
    source: Optional[Path] = None


class _Locator:
    """Línea de la primera aparición de cada clave en el texto fuente."""

    def __init__(self, text: str):
        self.lines = text.splitlines()

    def line_of(self, key: str) -> Optional[int]:
        pattern = re.compile(r'"' + re.escape(key) + r'"\s*:')
        for number, line in enumerate(self.lines, start=1):
            if pattern.search(line):
                return number
        return None


def _type_ok(value: Any, expected: str) -> bool:
    if expected == NUMBER:
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if expected == INTEGER:
        return isinstance(value, int) and not isinstance(value, bool)
    if expected == STRING:
        return isinstance(value, str)
    if expected == BOOLEAN:
        return isinstance(value, bool)
    if expected == LIST:
        return isinstance(value, list)
    if expected == OBJECT:
        return isinstance(value, dict)
    return False


def _check_section(data: Dict, schema: Dict[str, str], path: str, locator: _Locator):
    if not isinstance(data, dict):
        raise ConfigError("Se esperaba un objeto", field=path or "<raíz>")
    for key, value in data.items():
        dotted = f"{path}.{key}" if path else key
        if key not in schema:
            raise ConfigError(f"Clave desconocida '{key}'", field=dotted, line=locator.line_of(key))
        if not _type_ok(value, schema[key]):
            raise ConfigError(f"Tipo no válido: se esperaba {schema[key]}, recibido {type(value).__name__}",
                              field=dotted, line=locator.line_of(key))


def _check_items(items: List, schema: Dict[str, str], path: str, locator: _Locator):
    for i, item in enumerate(items):
        _check_section(item, schema, f"{path}[{i}]", locator)


def parse_scenario(text: str, source: Optional[Path] = None) -> ScenarioSpec:
    """
    Valida el texto JSON de un escenario y construye el ScenarioSpec.

    Args:
        text: contenido del archivo
        source: ruta de origen (para rutas relativas y mensajes)

    Returns:
        ScenarioSpec

    Raises:
        ConfigError: sintaxis, claves desconocidas, tipos o valores no válidos
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"JSON no válido: {e.msg} (columna {e.colno})", line=e.lineno) from e

    locator = _Locator(text)
    _check_section(data, TOP_SCHEMA, "", locator)
    for section, schema in SECTION_SCHEMAS.items():
        if section in data:
            _check_section(data[section], schema, section, locator)
    stimulus = data.get("stimulus", {})
    if "levels" in stimulus:
        _check_items(stimulus["levels"], LEVEL_SCHEMA, "stimulus.levels", locator)
    calibration = data.get("calibration", {})
    if "anchors" in calibration:
        _check_items(calibration["anchors"], ANCHOR_SCHEMA, "calibration.anchors", locator)

    kind = data.get("kind")
    if kind is None:
        raise ConfigError("Falta la clave obligatoria 'kind'", field="kind")
    if kind not in SCENARIO_KINDS:
        raise ConfigError(f"Tipo de escenario desconocido '{kind}' (disponibles: {', '.join(SCENARIO_KINDS)})",
                          field="kind", line=locator.line_of("kind"))
    if stimulus.get("type", "constant") not in STIMULUS_TYPES:
        raise ConfigError(f"Tipo de estímulo desconocido '{stimulus['type']}'", field="stimulus.type",
                          line=locator.line_of("type"))

    def positive(key: str, value: Optional[float], dotted: str) -> Optional[float]:
        if value is not None and not value > 0:
            raise ConfigError(f"'{key}' debe ser positivo (recibido {value})", field=dotted,
                              line=locator.line_of(key))
        return value

    t_end = positive("t_end_s", data.get("t_end_s"), "t_end_s")
    sample_interval = positive("sample_interval_s", data.get("sample_interval_s", SAMPLE_INTERVAL_S),
                               "sample_interval_s")
    targets = data.get("refractory_targets_s", [])
    for i, value in enumerate(targets):
        if not _type_ok(value, NUMBER) or not value > 0:
            raise ConfigError("Los periodos objetivo deben ser números positivos",
                              field=f"refractory_targets_s[{i}]", line=locator.line_of("refractory_targets_s"))

    config = build_neuron_config(data, locator, kind=kind)
    spec = ScenarioSpec(
        kind=kind,
        name=data.get("name", (source.stem if source else kind).replace(":", "_")),
        config=config,
        stimulus=stimulus,
        t_end=t_end,
        sample_interval=sample_interval,
        sweep=data.get("sweep", {}),
        refractory_targets=[float(v) for v in targets],
        calibration=calibration,
        scaling=data.get("scaling", {}),
        source=source,
    )
    logger.debug(f"Escenario '{spec.name}' ({spec.kind}) validado")
    return spec


def _device_params(values: Dict, base: DeviceParams, section: str, locator: _Locator) -> DeviceParams:
    if not values:
        return base
    current = base.to_table_units()
    current.update(values)
    try:
        return DeviceParams.from_table_units(**current)
    except ValueError as e:
        key = next(iter(values))
        raise ConfigError(str(e), field=section, line=locator.line_of(key)) from e


def build_neuron_config(data: Dict, locator: Optional[_Locator] = None, kind: Optional[str] = None) -> NeuronConfig:
    """
    NeuronConfig a partir de las secciones device / device_refractory / neuron / integrator.

    Con calibrated_thermal (por defecto) cada rama parte de su preset: el de
    integración ajustado a los anclajes de frecuencia y el refractario rápido.
    El escenario de dos sinusoides usa el dispositivo de la década 100 ns - 1 μs
    y su propia tensión refractaria.
    """
    locator = locator or _Locator("")
    neuron = data.get("neuron", {})
    sinusoid = kind == "sinusoid"
    calibrated = neuron.get("calibrated_thermal", True)
    if calibrated:
        base_input = calibrated_thermal_params() if sinusoid else integration_params()
    else:
        base_input = DeviceParams()
    p_input = _device_params(data.get("device", {}), base_input, "device", locator)
    base_refractory = refractory_params() if calibrated else p_input
    p_refractory = _device_params(data.get("device_refractory", {}), base_refractory, "device_refractory", locator)
    v_refractory_default = SINUSOID_V_REFRACTORY_V if sinusoid else V_REFRACTORY_V

    integ = data.get("integrator", {})
    mapping = {
        "delta_t_step_k": "delta_t_step", "min_step_s": "min_step", "max_step_s": "max_step",
        "initial_step_s": "initial_step", "rtol": "rtol", "atol_k": "atol",
        "event_resolution_s": "event_resolution", "scan_resolution_k": "scan_resolution",
        "max_time_s": "max_time",
    }
    settings_values = {"delta_t_step": DELTA_T_STEP_K, "min_step": MIN_STEP_S, "max_step": MAX_STEP_S}
    settings_values.update({mapping[k]: float(v) for k, v in integ.items()})
    try:
        settings = IntegratorSettings(**settings_values)
    except ValueError as e:
        raise ConfigError(str(e), field="integrator", line=locator.line_of("integrator")) from e

    try:
        register1 = ShiftRegister.from_string(neuron.get("register1_bits", "1111"),
                                              wrap=neuron.get("register1_wrap", True))
        register2 = ShiftRegister.from_string(neuron.get("register2_bits", "01"), wrap=True)
        r_s = float(neuron.get("r_s_ohm", R_S_OHM))
        config = NeuronConfig(
            device_params_input=p_input,
            device_params_refractory=p_refractory,
            network_input=SeriesNetwork(r_s=r_s, r_c_active=float(neuron.get("r_c_ohm", R_C_OHM))),
            network_refractory=SeriesNetwork(r_s=float(neuron.get("r_s_refractory_ohm", r_s))),
            v_refractory=float(neuron.get("v_refractory_v", v_refractory_default)),
            register1_init=register1,
            register2_init=register2,
            v_th_detect=float(neuron.get("v_th_detect_v", V_TH_DETECT_V)),
            detector_latency=float(neuron.get("detector_latency_s", 0.0)),
            settings=settings,
        )
    except ValueError as e:
        raise ConfigError(str(e), field="neuron", line=locator.line_of("neuron")) from e
    return config


def load_scenario(path: Union[str, Path]) -> ScenarioSpec:
    """
    Lee y valida un archivo de escenario.

    Raises:
        ConfigError: archivo inexistente o contenido no válido
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"No existe el archivo de configuración: {path}")
    spec = parse_scenario(path.read_text(encoding="utf-8"), source=path)
    logger.info(f"✓ Escenario cargado: {spec.name} ({spec.kind})")
    return spec


def default_scenario(kind: str, **overrides) -> ScenarioSpec:
    """Escenario por defecto de un tipo, sin archivo."""
    if kind not in SCENARIO_KINDS:
        raise ConfigError(f"Tipo de escenario desconocido '{kind}'", field="kind")
    spec = ScenarioSpec(kind=kind, name=kind.replace(":", "_"), config=build_neuron_config({}, kind=kind))
    return replace(spec, **overrides)
