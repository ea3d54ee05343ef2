"""
Fixtures compartidas por las pruebas del simulador.
"""
import pytest

from src.models.device_model import NOMINAL_PARAMS, calibrated_thermal_params
from src.models.integrator import IntegratorSettings
from src.neuron.neuron_core import NeuronConfig


@pytest.fixture
def table_params():
    """Parámetros de la tabla del dispositivo (SI)."""
    return NOMINAL_PARAMS


@pytest.fixture
def calibrated_params():
    """Preset con C_th llevada a la década 100 ns - 1 μs."""
    return calibrated_thermal_params()


@pytest.fixture
def fast_settings():
    """Integrador algo más laxo para las simulaciones de neurona completa."""
    return IntegratorSettings(delta_t_step=2.0, rtol=1e-6, atol=1e-5)


@pytest.fixture
def neuron_config(fast_settings):
    return NeuronConfig(settings=fast_settings)


@pytest.fixture
def output_dir(tmp_path):
    directory = tmp_path / "salida"
    directory.mkdir()
    return directory
