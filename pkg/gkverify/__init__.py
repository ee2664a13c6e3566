"""
🧮 GK Verify - Módulo Principal

Toolkit de verificación numérica de geometría Kähler generalizada:
cuádruplas bihermíticas sobre un parche de coordenadas, estructuras
complejas generalizadas, eigendistribuciones de Σ = J₊J₋ + J₋J₊ y el
arnés que ejecuta las suites y produce reportes JSON.
"""

__version__ = "1.0.0"
__author__ = "GK Verify Team"

from .core.config import ToleranceConfig, VerifierSettings, get_config
from .core.errors import GKVError
from .core.harness import load_spec, run_courant, run_suite
from .core.models import ManifoldSpec, Report, SuiteName
from .core.zoo import zoo_generate

__all__ = [
    "GKVError",
    "ManifoldSpec",
    "Report",
    "SuiteName",
    "ToleranceConfig",
    "VerifierSettings",
    "get_config",
    "load_spec",
    "run_courant",
    "run_suite",
    "zoo_generate",
]
