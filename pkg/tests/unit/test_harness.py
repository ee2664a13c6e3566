"""
🧪 Pruebas del arnés: carga, aplicabilidad y pool
"""

import json
from types import SimpleNamespace

import numpy as np
import pytest

from gkverify.core import harness
from gkverify.core.config import SamplingDefaults, ToleranceConfig
from gkverify.core.errors import (
    DegenerateMetricError,
    QuadrupleValidationError,
    SpecDomainError,
    SpecError,
    SuiteNotApplicableError,
    UnknownIdentifierError,
)
from gkverify.core.harness import PointPool, SuiteRunner, build_quadruple, load_spec, sample_plan, run_suite
from gkverify.core.models import SamplePlan, SuiteName
from gkverify.core.zoo import zoo_generate
from tests.conftest import minimal_spec, small_plan


def write_spec(tmp_path, **overrides):
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(minimal_spec(**overrides)), encoding="utf-8")
    return path


# =============================================================================
# 📄 CARGA
# =============================================================================

def test_load_minimal_spec(tmp_path):
    spec = load_spec(write_spec(tmp_path))
    assert spec.dim == 2


def test_pregrid_resolution_comes_from_config(tmp_path, monkeypatch):
    # log(x²) solo se indefine en x = 0, nodo de la pre-malla de 3 puntos por eje
    path = write_spec(tmp_path, b=[["0", "log(x^2)"], ["-log(x^2)", "0"]])
    with pytest.raises(SpecDomainError):
        load_spec(path)
    coarse = SimpleNamespace(sampling=SamplingDefaults(pregrid=2), workers=1)
    monkeypatch.setattr(harness, "get_config", lambda: coarse)
    assert load_spec(path).dim == 2


def test_missing_file(tmp_path):
    with pytest.raises(SpecError):
        load_spec(tmp_path / "no-existe.json")


def test_expression_outside_domain(tmp_path):
    path = write_spec(tmp_path, metric=[["log(x)", "0"], ["0", "1"]])
    with pytest.raises(SpecDomainError):
        load_spec(path)


def test_unknown_identifier_in_spec(tmp_path):
    path = write_spec(tmp_path, b=[["0", "z"], ["-z", "0"]])
    with pytest.raises(UnknownIdentifierError):
        load_spec(path)


def test_degenerate_metric(tmp_path):
    path = write_spec(tmp_path, metric=[["1", "0"], ["0", "-1"]])
    with pytest.raises(DegenerateMetricError):
        load_spec(path)


def test_invalid_quadruple(tmp_path):
    path = write_spec(tmp_path, jminus=[["0", "-2"], ["1", "0"]])
    with pytest.raises(QuadrupleValidationError) as info:
        load_spec(path)
    assert info.value.check.startswith("validate.j_minus")


def test_sampler_has_no_quadruple():
    with pytest.raises(SuiteNotApplicableError):
        build_quadruple(zoo_generate("Z5"))


def test_sample_plan_overrides():
    plan = sample_plan(zoo_generate("Z1"), seed=9, grid=2)
    assert (plan.seed, plan.grid, plan.random) == (9, 2, 64)


# =============================================================================
# 🔎 APLICABILIDAD
# =============================================================================

def runner_for(spec, plan=SamplePlan(grid=1, random=3)) -> SuiteRunner:
    return SuiteRunner(spec, ToleranceConfig(), plan, PointPool(1))


def test_z2_applicability():
    runner = runner_for(zoo_generate("Z2"))
    assert runner.not_applicable(SuiteName.VALIDATE) is None
    assert runner.not_applicable(SuiteName.THEOREM) is None
    assert "Σ" in runner.not_applicable(SuiteName.IDENTITIES)
    assert runner.not_applicable(SuiteName.GAUGE) is not None
    assert runner.not_applicable(SuiteName.COURANT) is not None


def test_z3_fourdim_requires_dimension_four():
    runner = runner_for(zoo_generate("Z3"))
    assert "dim 4" in runner.not_applicable(SuiteName.FOURDIM)
    assert runner.not_applicable(SuiteName.COURANT) is None


def test_sampler_only_admits_fourdim():
    runner = runner_for(zoo_generate("Z5", {"samples": 5}))
    assert runner.not_applicable(SuiteName.FOURDIM) is None
    assert runner.not_applicable(SuiteName.GK) is not None


def test_regime_invertibility_uses_configured_threshold():
    spec = zoo_generate("Z1")
    plan = SamplePlan(grid=1, random=3)
    strict = SuiteRunner(spec, ToleranceConfig(invertibility=10.0), plan, PointPool(1))
    assert not any(r.plus_invertible or r.minus_invertible for r in strict.regimes())


def test_declared_suites_follow_canonical_order():
    runner = runner_for(zoo_generate("Z2"))
    assert runner.declared_suites() == (SuiteName.VALIDATE, SuiteName.GK, SuiteName.EIGENDIST, SuiteName.THEOREM)


def test_declared_all_or_nothing_runs_every_suite():
    assert len(runner_for(zoo_generate("Z1")).declared_suites()) == 8
    spec = zoo_generate("Z2").model_copy(update={"declared_scenarios": []})
    assert runner_for(spec).declared_suites() == runner_for(zoo_generate("Z1")).declared_suites()


def test_declared_run_skips_instead_of_raising():
    spec = small_plan(zoo_generate("Z2")).model_copy(update={"declared_scenarios": ["validate", "identities"]})
    report = run_suite(spec, None, workers=1)
    assert report.metadata.suite == "validate,identities"
    assert [s.suite for s in report.skipped] == ["identities"]
    assert report.passed


def test_explicit_inapplicable_suite_raises():
    with pytest.raises(SuiteNotApplicableError) as info:
        run_suite(small_plan(zoo_generate("Z2")), "identities", workers=1)
    assert info.value.exit_code == 2


# =============================================================================
# 🧵 POOL
# =============================================================================

def test_pool_preserves_order():
    points = [np.array([float(i)]) for i in range(20)]
    assert PointPool(4).map(lambda p: 2 * p[0], points) == [2.0 * i for i in range(20)]


def test_single_worker_is_sequential():
    points = [np.array([1.0]), np.array([2.0])]
    assert PointPool(1)(lambda p: p[0] + 1, points) == [2.0, 3.0]
