"""
🧪 Fixtures compartidas de las pruebas
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Añadir el directorio del proyecto al path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from gkverify.core.config import ToleranceConfig
from gkverify.core.expr import parse_expr
from gkverify.core.harness import build_quadruple
from gkverify.core.models import ManifoldSpec, SamplePlan
from gkverify.core.patch import FieldKind, TensorField
from gkverify.core.zoo import zoo_generate

ZOO_DIR = project_root / "zoo"


def small_plan(spec: ManifoldSpec, grid: int = 1, random: int = 4, seed: int = 0) -> ManifoldSpec:
    """Misma especificación con un plan de muestreo reducido"""
    return spec.model_copy(update={"sample_plan": SamplePlan(grid=grid, random=random, seed=seed)})


def minimal_spec(**overrides) -> dict:
    """Especificación plana bidimensional con J₊ = J₋ como diccionario JSON"""
    spec = {
        "dim": 2,
        "coords": ["x", "y"],
        "metric": [["1", "0"], ["0", "1"]],
        "b": [["0", "0"], ["0", "0"]],
        "jplus": [["0", "-1"], ["1", "0"]],
        "jminus": [["0", "-1"], ["1", "0"]],
        "domain": [[-1, 1], [-1, 1]],
    }
    spec.update(overrides)
    return spec


def field_from_text(kind: FieldKind, texts, coords, parameters=None) -> TensorField:
    """Campo tensorial desde arrays anidados de textos"""
    def compile_entries(item):
        if isinstance(item, str):
            return parse_expr(item, coords, parameters)
        return [compile_entries(x) for x in item]

    return TensorField.from_expressions(kind, compile_entries(texts), len(coords))


@pytest.fixture
def tol() -> ToleranceConfig:
    return ToleranceConfig()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def z1_spec() -> ManifoldSpec:
    return small_plan(zoo_generate("Z1"))


@pytest.fixture
def z1_quadruple(z1_spec):
    return build_quadruple(z1_spec)


@pytest.fixture
def z1_points(z1_quadruple):
    return z1_quadruple.patch.sample_points()


@pytest.fixture
def z2_quadruple():
    return build_quadruple(small_plan(zoo_generate("Z2"), grid=2, random=6))


@pytest.fixture
def z3_quadruple():
    return build_quadruple(small_plan(zoo_generate("Z3"), random=3))


@pytest.fixture
def z4_quadruple():
    return build_quadruple(small_plan(zoo_generate("Z4"), random=3))
