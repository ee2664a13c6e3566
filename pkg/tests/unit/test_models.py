"""
📦 Pruebas de modelos y residuos
"""

import math

import numpy as np
import pytest

from gkverify.core.errors import SpecShapeError
from gkverify.core.harness import parse_spec, to_record
from gkverify.core.models import ManifoldSpec, SuiteName
from gkverify.core.residuals import CheckSpec, max_abs, merge_pointwise, single_result
from gkverify.core.zoo import zoo_generate
from tests.conftest import minimal_spec


# =============================================================================
# 📄 ESPECIFICACIÓN
# =============================================================================

def test_minimal_spec_defaults():
    spec = ManifoldSpec.model_validate(minimal_spec())
    assert spec.sample_plan.grid == 5
    assert spec.sample_plan.random == 64
    assert spec.orientation == 1


@pytest.mark.parametrize("overrides", [
    {"metric": [["1", "0"]]},
    {"jplus": [["0", "-1"], ["1"]]},
    {"coords": ["x"]},
    {"coords": ["x", "x"]},
    {"domain": [[1, -1], [-1, 1]]},
    {"orientation": 0},
    {"declaredScenarios": ["everything"]},
    {"b": None},
    {"unknownField": 1},
])
def test_invalid_specs(overrides):
    with pytest.raises(ValueError):
        ManifoldSpec.model_validate(minimal_spec(**overrides))


def test_parse_spec_reports_location():
    with pytest.raises(SpecShapeError) as info:
        parse_spec('{"dim": 2, "coords": ["x", "y"], "domain": "nada"}')
    assert "domain" in str(info.value)


def test_parse_spec_rejects_bad_json():
    with pytest.raises(SpecShapeError):
        parse_spec("{not json")


def test_spec_json_uses_camel_case():
    text = zoo_generate("Z2").model_dump_json(by_alias=True, exclude_none=True)
    assert '"samplePlan"' in text and '"declaredScenarios"' in text
    assert parse_spec(text).model_dump() == zoo_generate("Z2").model_dump()


def test_suite_names():
    assert SuiteName("all") == SuiteName.ALL
    assert {s.value for s in SuiteName} >= {"validate", "gk", "identities", "gauge", "eigendist",
                                           "theorem", "fourdim", "courant"}


# =============================================================================
# 📏 RESIDUOS
# =============================================================================

def test_merge_keeps_first_maximum_and_counts_skips():
    spec = CheckSpec("c", "x = 0", 1e-3)
    points = [np.array([0.0]), np.array([1.0]), np.array([2.0])]
    result = merge_pointwise([spec], points, [{"c": 0.5}, {"c": None}, {"c": 0.5}])["c"]
    assert result.max_residual == 0.5
    assert result.argmax_point == (0.0,)
    assert result.notes == ["omitido en 1 punto(s)"]
    assert not result.passed


def test_merge_without_evaluable_points():
    spec = CheckSpec("c", "x = 0", 1e-3)
    result = merge_pointwise([spec], [np.zeros(1)], [{"c": None}])["c"]
    assert result.max_residual == 0.0
    assert result.passed
    assert "sin puntos evaluables" in result.notes


def test_nan_residual_fails():
    spec = CheckSpec("c", "x = 0", 1e-3)
    result = merge_pointwise([spec], [np.zeros(1), np.ones(1)], [{"c": float("nan")}, {"c": 7.0}])["c"]
    assert math.isnan(result.max_residual)
    assert not result.passed


def test_lower_bound_check():
    spec = CheckSpec("fraction", "fraction ≥ 0.99", 0.99, lower_bound=True)
    assert single_result(spec, 1.0).passed
    assert not single_result(spec, 0.5).passed


def test_max_abs():
    assert max_abs(np.array([1.0, -3.0j])) == 3.0
    assert max_abs(np.zeros((0, 3))) == 0.0


def test_record_serializes_pass_alias():
    record = to_record(single_result(CheckSpec("c", "x = 0", 1e-3), 1e-4, [0.5, 0.25]))
    dumped = record.model_dump(by_alias=True)
    assert dumped["pass"] is True
    assert dumped["checkName"] == "c"
    assert dumped["argmaxPoint"] == [0.5, 0.25]
