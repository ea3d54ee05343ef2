"""
Script principal del simulador de la neurona electrotérmica RRAM.
"""
import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

from config import LOG_FILE, LOG_LEVEL, OUTPUT_DIR, OUTPUT_FORMAT
from src.scenarios.runner import run, sweep
from src.utils.config_loader import default_scenario, load_scenario
from src.utils.errors import ConfigError, SimulationError

# Configurar logging
logging.basicConfig(
    level=getattr(logging, LOG_LEVEL),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    handlers=[
        logging.FileHandler(LOG_FILE, encoding='utf-8'),
        logging.StreamHandler(sys.stdout)
    ]
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _load(config_path: Optional[str], kind: str):
    """Carga el escenario del archivo o construye el escenario por defecto del tipo dado."""
    if config_path:
        return load_scenario(config_path)
    return default_scenario(kind)


def _with_kind(spec, kind: str):
    if spec.kind == kind:
        return spec
    logger.info(f"  Escenario '{spec.name}' ejecutado como '{kind}'")
    return replace(spec, kind=kind)


def _report(result) -> None:
    summary = result.get('summary', {})
    for key in ('spike_count', 'frequency_hz', 'pattern'):
        if key in summary:
            logger.info(f"  {key}: {summary[key]}")
    for artifact in result.get('artifacts', []):
        logger.info(f"  → {artifact}")


def cmd_simulate(args) -> None:
    spec = _load(args.config, args.kind)
    _report(run(spec, Path(args.out), plot=args.plot, sample_interval=args.sample_interval,
                table_format=args.format))


def cmd_sweep(args) -> None:
    spec = _load(args.config, "constant")
    table = sweep(spec, Path(args.out), workers=args.workers, sample_interval=args.sample_interval,
                  table_format=args.format, voltages=args.voltages)
    simulated = table[table['source'] == 'simulation']
    for _, row in simulated.iterrows():
        logger.info(f"  {row['v_input_v']:+.3f} V → {row['frequency_hz'] / 1e3:.1f} kHz")


def cmd_calibrate(args) -> None:
    spec = _with_kind(_load(args.config, "calibrate"), "calibrate")
    _report(run(spec, Path(args.out), plot=args.plot, sample_interval=args.sample_interval,
                table_format=args.format))


def cmd_scaling(args) -> None:
    spec = _with_kind(_load(args.config, "scaling-report"), "scaling-report")
    _report(run(spec, Path(args.out), table_format=args.format))


def cmd_patterns(args) -> None:
    names = ["CH", "IB"] if args.pattern == "both" else [args.pattern]
    base = load_scenario(args.config) if args.config else None
    for name in names:
        kind = f"pattern:{name}"
        spec = _with_kind(base, kind) if base is not None else default_scenario(kind)
        if base is not None and len(names) > 1:
            spec = replace(spec, name=f"{base.name}_{name}")
        _report(run(spec, Path(args.out), plot=args.plot, sample_interval=args.sample_interval,
                    table_format=args.format))


def build_parser() -> argparse.ArgumentParser:
    """Construye el parser de argumentos con sus subcomandos."""
    parser = argparse.ArgumentParser(
        description="Simulador sin reloj de una neurona electrotérmica basada en RRAM de PMO"
    )

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        '--config',
        type=str,
        help='Archivo JSON del escenario (opcional, usa el escenario por defecto si no se proporciona)'
    )
    common.add_argument(
        '--out',
        type=str,
        default=str(OUTPUT_DIR),
        help=f'Directorio de salida (default: {OUTPUT_DIR})'
    )
    common.add_argument(
        '--plot',
        action='store_true',
        help='Generar gráficas SVG de corriente y temperatura'
    )
    common.add_argument(
        '--sample-interval',
        type=float,
        help='Intervalo de muestreo de la traza en segundos'
    )
    common.add_argument(
        '--format',
        type=str,
        default=OUTPUT_FORMAT,
        choices=['csv', 'excel', 'json'],
        help=f'Formato de las tablas agregadas (default: {OUTPUT_FORMAT})'
    )

    subparsers = parser.add_subparsers(dest='command', required=True)

    p_sim = subparsers.add_parser('simulate', parents=[common], help='Ejecuta un escenario')
    p_sim.add_argument(
        '--kind',
        type=str,
        default='constant',
        help='Tipo de escenario cuando no se da --config (default: constant)'
    )
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = subparsers.add_parser('sweep', parents=[common], help='Barrido de tensión de entrada')
    p_sweep.add_argument(
        '--workers',
        type=int,
        default=1,
        help='Procesos en paralelo (default: 1)'
    )
    p_sweep.add_argument(
        '--voltages',
        type=float,
        nargs='*',
        help='Tensiones de entrada explícitas (sustituyen al bloque sweep del escenario)'
    )
    p_sweep.set_defaults(func=cmd_sweep)

    p_cal = subparsers.add_parser('calibrate', parents=[common], help='Calibra parámetros libres')
    p_cal.set_defaults(func=cmd_calibrate)

    p_scal = subparsers.add_parser('scaling', parents=[common], help='Informe de escalado y área')
    p_scal.set_defaults(func=cmd_scaling)

    p_pat = subparsers.add_parser('patterns', parents=[common], help='Patrones de disparo CH / IB')
    p_pat.add_argument(
        '--pattern',
        type=str,
        default='both',
        choices=['CH', 'IB', 'both'],
        help='Patrón a simular (default: both)'
    )
    p_pat.set_defaults(func=cmd_patterns)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Función principal.

    Returns:
        0 si todo fue bien, 2 ante errores de configuración, 3 ante fallos numéricos
    """
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.sample_interval is not None and not args.sample_interval > 0:
        logger.error("--sample-interval debe ser positivo")
        return EXIT_CONFIG

    try:
        args.func(args)
    except ConfigError as e:
        logger.error(f"Error de configuración: {e}")
        return EXIT_CONFIG
    except SimulationError as e:
        logger.error(f"Fallo numérico: {e}")
        return EXIT_NUMERICAL

    logger.info("✓ Proceso completado")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
