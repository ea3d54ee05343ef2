"""
Configuración centralizada del simulador de la neurona electrotérmica PMO.
"""
import os
from pathlib import Path
from dotenv import load_dotenv

# Cargar variables de entorno
load_dotenv()

# Rutas del proyecto
PROJECT_ROOT = Path(__file__).parent
DATA_DIR = PROJECT_ROOT / "data"
INPUT_DIR = DATA_DIR / "input"
OUTPUT_DIR = DATA_DIR / "output"
REPORTS_DIR = DATA_DIR / "reports"
LOGS_DIR = PROJECT_ROOT / "logs"

# Crear directorios si no existen
for directory in [INPUT_DIR, OUTPUT_DIR, REPORTS_DIR, LOGS_DIR]:
    directory.mkdir(parents=True, exist_ok=True)

# Configuración de logging
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
LOG_FILE = LOGS_DIR / "simulacion.log"

# Integrador
DELTA_T_STEP_K = float(os.getenv("DELTA_T_STEP_K", "0.5"))
MIN_STEP_S = float(os.getenv("MIN_STEP_S", "1e-12"))
MAX_STEP_S = float(os.getenv("MAX_STEP_S", "20e-9"))

# Circuito de la neurona
R_S_OHM = float(os.getenv("R_S_OHM", "50"))
R_C_OHM = float(os.getenv("R_C_OHM", "100"))
V_TH_DETECT_V = float(os.getenv("V_TH_DETECT_V", "0.5"))
V_REFRACTORY_V = float(os.getenv("V_REFRACTORY_V", "-1.0163"))

# Estímulos: el hueco de reset a 0 V deja enfriar el dispositivo entre pulsos
RESET_GAP_S = float(os.getenv("RESET_GAP_S", "1e-6"))
SAMPLE_INTERVAL_S = float(os.getenv("SAMPLE_INTERVAL_S", "1e-9"))

# Programa de réplica experimental: el pulso lento dura lo que el rápido más su retardo extra de disparo
REPLICATION_WIDTH_S = 300e-9
REPLICATION_SLOW_WIDTH_S = 600e-9

# Calibración
N_STARTS = int(os.getenv("N_STARTS", "5"))

# Formato de tablas agregadas (csv, excel, json)
OUTPUT_FORMAT = os.getenv("OUTPUT_FORMAT", "csv")

# Anclajes de frecuencia de disparo regular: simulación y experimento (V, Hz)
SIMULATION_ANCHORS = [(-1.6, 537e3), (-1.8, 754e3)]
EXPERIMENT_ANCHORS = [(-1.6, 595e3), (-1.8, 757e3)]

# Estímulo de dos sinusoides por defecto
SINUSOID_F1_HZ = 250e3
SINUSOID_F2_HZ = 350e3
SINUSOID_AMPLITUDE_V = -0.7
SINUSOID_DC_V = -0.7
# El escenario de dos sinusoides usa el dispositivo de la década 100 ns - 1 μs
# y un periodo refractario de 200 ns
SINUSOID_V_REFRACTORY_V = -1.0698

# Clases de escenario disponibles
SCENARIO_KINDS = [
    "constant", "refractory-sweep", "sinusoid", "pattern:CH", "pattern:IB",
    "experiment-replication", "scaling-report", "calibrate",
]
