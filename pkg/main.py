#!/usr/bin/env python3
"""
🧮 GK Verify - Punto de Entrada Principal

Interfaz de línea de comandos del verificador (``gkv``):

- ``gkv check <spec.json>``: ejecutar suites y emitir el reporte JSON
- ``gkv zoo <nombre>``: generar la especificación de un ejemplo
- ``gkv courant <spec.json> --sections <secciones.json>``: corchetes de Courant
"""

import argparse
import sys
from pathlib import Path
from typing import Dict, List, Optional, Union

from loguru import logger

# Añadir el directorio del proyecto al path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from gkverify import __version__
from gkverify.core.config import ToleranceConfig, get_config
from gkverify.core.errors import GKVError
from gkverify.core.harness import load_sections, load_spec, run_courant, run_suite
from gkverify.core.models import ExitCode, SuiteName
from gkverify.core.zoo import zoo_generate


def configure_logging(level: str) -> None:
    """Sink de loguru en stderr (stdout queda para el JSON)"""
    logger.remove()
    logger.add(sys.stderr, level=level.upper(), format="<level>{level: <8}</level> | {message}")


def parse_params(pairs: Optional[List[str]]) -> Dict[str, Union[float, str]]:
    """Convertir ``k=v`` en un diccionario (valores numéricos si es posible)"""
    params: Dict[str, Union[float, str]] = {}
    for pair in pairs or []:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise argparse.ArgumentTypeError(f"Parámetro inválido '{pair}' (se espera k=v)")
        try:
            params[key] = float(value)
        except ValueError:
            params[key] = value
    return params


def write_output(text: str, path: Optional[str]) -> None:
    if path:
        Path(path).write_text(text + "\n", encoding="utf-8")
        logger.info(f"💾 Escrito {path}")
    else:
        print(text)


class VerifierCLI:
    """Interfaz de línea de comandos para el verificador"""

    def __init__(self):
        self.config = get_config()

    def check(self, args: argparse.Namespace) -> int:
        """Ejecutar una suite y emitir el reporte"""
        spec = load_spec(args.spec)
        tol = ToleranceConfig().with_override(args.tol)
        workers = args.workers or self.config.workers
        report = run_suite(spec, args.suite, tol, seed=args.seed, grid=args.grid, workers=workers)
        text = report.to_json()
        if args.report:
            write_output(text, args.report)
        else:
            print(text)
        for record in report.failing():
            logger.warning(
                f"❌ {record.check_name}: residuo {record.max_residual:.3e} > {record.tolerance:.1e} "
                f"en {record.argmax_point}"
            )
        if report.passed:
            logger.info(f"✅ {len(report.checks)} comprobaciones superadas")
            return ExitCode.PASS
        return ExitCode.RESIDUAL_FAILURE

    def zoo(self, args: argparse.Namespace) -> int:
        """Generar la especificación de un ejemplo del zoológico"""
        spec = zoo_generate(args.name, parse_params(args.param))
        write_output(spec.model_dump_json(by_alias=True, exclude_none=True, indent=2), args.emit)
        return ExitCode.PASS

    def courant(self, args: argparse.Namespace) -> int:
        """Corchetes de Courant de los pares de secciones"""
        spec = load_spec(args.spec)
        report = run_courant(spec, load_sections(args.sections), seed=args.seed, grid=args.grid)
        write_output(report.model_dump_json(by_alias=True, indent=2), args.report)
        return ExitCode.PASS

    def run(self, args: argparse.Namespace) -> int:
        handler = {"check": self.check, "zoo": self.zoo, "courant": self.courant}[args.command]
        try:
            return int(handler(args))
        except GKVError as e:
            logger.error(f"❌ {type(e).__name__}: {e}")
            return e.exit_code
        except argparse.ArgumentTypeError as e:
            logger.error(f"❌ {e}")
            return ExitCode.SPEC_ERROR


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gkv",
        description="🧮 GK Verify - Verificación numérica de geometría Kähler generalizada",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Ejemplos de uso:
  gkv zoo Z1 --param alpha=0 --param beta=1 --emit z1.json
  gkv check zoo/z3.json --suite all --seed 7 --report z3-report.json
  gkv check zoo/z4.json --suite gk
  gkv courant zoo/z1.json --sections secciones.json
        """
    )
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Nivel de logging en stderr (default: WARNING)"
    )
    parser.add_argument(
        "--version", "-v",
        action="version",
        version=f"GK Verify v{__version__}"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    check = subparsers.add_parser("check", help="Ejecutar suites de verificación")
    check.add_argument("spec", help="Archivo de especificación JSON")
    check.add_argument(
        "--suite",
        choices=[s.value for s in SuiteName],
        default=None,
        help="Suite a ejecutar (default: las declaradas en la especificación, o all)"
    )
    check.add_argument("--tol", type=float, help="Tolerancia de residuos (algebraica y con derivadas)")
    check.add_argument("--grid", type=int, help="Puntos por eje de la malla")
    check.add_argument("--seed", type=int, help="Semilla de los puntos aleatorios")
    check.add_argument("--workers", type=int, help="Tamaño del pool (default: GKV_WORKERS)")
    check.add_argument("--report", help="Escribir el reporte en este archivo")

    zoo = subparsers.add_parser("zoo", help="Generar un ejemplo del zoológico")
    zoo.add_argument("name", help="Z1, Z2, Z3, Z4 o Z5")
    zoo.add_argument("--param", action="append", metavar="K=V", help="Parámetro del ejemplo (repetible)")
    zoo.add_argument("--emit", help="Escribir la especificación en este archivo")

    courant = subparsers.add_parser("courant", help="Corchetes de Courant de pares de secciones")
    courant.add_argument("spec", help="Archivo de especificación JSON")
    courant.add_argument("--sections", required=True, help="Archivo JSON de pares de secciones")
    courant.add_argument("--grid", type=int, help="Puntos por eje de la malla")
    courant.add_argument("--seed", type=int, help="Semilla de los puntos aleatorios")
    courant.add_argument("--report", help="Escribir el reporte en este archivo")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Función principal"""
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    cli = VerifierCLI()
    try:
        return cli.run(args)
    except KeyboardInterrupt:
        logger.warning("👋 Interrumpido")
        return ExitCode.SPEC_ERROR


if __name__ == "__main__":
    sys.exit(main())
