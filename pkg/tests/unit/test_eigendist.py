"""
🌈 Pruebas de eigendistribuciones y foliaciones
"""

import numpy as np
import pytest

from gkverify.core.eigendist import (
    DistributionField,
    band_layout,
    cluster_eigenvalues,
    eigendist_suite,
    frobenius_residual,
    parallel_foliation_residual,
    riemannian_foliation_at,
    riemannian_foliation_residual,
    spectral_split,
    theorem_scenario,
)
from gkverify.core.errors import AmbiguousClusteringError, NonIntegrableError, RankJumpError
from gkverify.core.jet import Jet
from gkverify.core.models import VerdictKind
from gkverify.core.patch import FieldKind, TensorField
from tests.conftest import field_from_text

XYZ = ["x1", "x2", "x3"]
FLAT3 = TensorField.constant(FieldKind.METRIC, np.eye(3))
POINTS3 = [np.array([0.0, 0.0, 0.0]), np.array([0.7, -0.2, 0.4]), np.array([-0.9, 0.5, -0.3])]


def span(*texts) -> DistributionField:
    fields = [field_from_text(FieldKind.VECTOR, t, XYZ) for t in texts]
    return DistributionField.from_vector_fields(FLAT3, fields, "D")


# =============================================================================
# 📊 AGRUPAMIENTO
# =============================================================================

def test_close_eigenvalues_merge():
    clusters = cluster_eigenvalues([1.0, 0.0, 1e-8], 1e-6)
    assert clusters == [[1, 2], [0]]


def test_separated_eigenvalues_split():
    assert cluster_eigenvalues([0.0, 1e-5], 1e-6) == [[0], [1]]


def test_guard_band_is_ambiguous():
    with pytest.raises(AmbiguousClusteringError) as info:
        cluster_eigenvalues([0.0, 2e-6], 1e-6, point=[0.5, 0.5])
    assert info.value.exit_code == 3
    assert info.value.point == (0.5, 0.5)


def test_z1_single_band(z1_quadruple, z1_points):
    structure = spectral_split(z1_quadruple, z1_points[0])
    assert structure.values == pytest.approx([0.6])
    assert structure.dimensions == [4]


def test_z3_two_bands(z3_quadruple, tol):
    layout = band_layout(z3_quadruple, z3_quadruple.patch.sample_points(), tol.cluster_tol)
    assert layout.values == pytest.approx((0.0, 0.5))
    assert layout.dimensions == (8, 8)
    assert layout.index_of(0.5, tol.cluster_tol) == 1
    assert layout.index_of(1.0, tol.cluster_tol) is None


def test_z2_extremal_bands(z2_quadruple, tol):
    layout = band_layout(z2_quadruple, z2_quadruple.patch.sample_points(), tol.cluster_tol)
    assert layout.values == pytest.approx((-1.0, 1.0))
    assert layout.dimensions == (2, 2)


# =============================================================================
# 🧵 DISTRIBUCIONES
# =============================================================================

def test_contact_distribution_is_not_integrable():
    result = frobenius_residual(span(["1", "0", "0"], ["0", "1", "x1"]), POINTS3)
    assert not result.passed
    # |P_⊥[e₁, e₂]| = 1/(1 + x₁²)
    assert result.max_residual == pytest.approx(1.0)
    assert result.argmax_point == (0.0, 0.0, 0.0)


def test_coordinate_plane_is_integrable():
    dist = span(["1", "0", "0"], ["x1", "1", "0"])
    assert frobenius_residual(dist, POINTS3).max_residual < 1e-12
    assert riemannian_foliation_residual(dist, POINTS3).max_residual < 1e-12
    assert parallel_foliation_residual(dist, POINTS3).max_residual < 1e-12


def test_riemannian_foliation_requires_integrability():
    with pytest.raises(NonIntegrableError):
        riemannian_foliation_at(span(["1", "0", "0"], ["0", "1", "x1"]), POINTS3[1])


def test_radial_lines_are_not_parallel():
    # Líneas radiales en el plano: foliación integrable pero no paralela
    dist = span(["x1", "x2", "0"])
    point = [np.array([0.6, 0.8, 0.0])]
    assert frobenius_residual(dist, point).max_residual < 1e-12
    assert parallel_foliation_residual(dist, point).max_residual > 0.1


def test_rank_mismatch_raises():
    dist = DistributionField.from_projector(
        FLAT3, lambda p: Jet.constant(np.diag([1.0, 0.0, 0.0]), 3), rank=2, name="línea"
    )
    with pytest.raises(RankJumpError):
        dist.frame_at(POINTS3[0])


def test_complement_projector():
    dist = span(["1", "0", "0"])
    complement = dist.complement()
    assert complement.rank == 2
    np.testing.assert_allclose(complement.projector_at(POINTS3[1]).value, np.diag([0.0, 1.0, 1.0]), atol=1e-15)


# =============================================================================
# 🧪 SUITE Y ESCENARIO
# =============================================================================

def test_z1_eigendist_suite(z1_quadruple, z1_points, tol):
    results, layout = eigendist_suite(z1_quadruple, z1_points, tol)
    assert layout.dimensions == (4,)
    assert all(r.passed for r in results.values())
    assert "eigendist.frobenius_complement_band0" not in results


def test_z2_eigendist_suite_includes_band_kahler_forms(z2_quadruple, tol):
    points = z2_quadruple.patch.sample_points()
    results, _ = eigendist_suite(z2_quadruple, points, tol)
    assert all(r.passed for r in results.values()), [r.name for r in results.values() if not r.passed]
    assert "identities.closed_kahler_combination_band0_plus" in results


def test_verdict_for_z1_is_hypothesis_not_satisfied(z1_quadruple, z1_points, tol):
    scenario = theorem_scenario(z1_quadruple, z1_points, tol)
    assert scenario.verdict.verdict == VerdictKind.HYPOTHESIS_NOT_SATISFIED
    assert scenario.verdict.hypotheses["inner_bands_dim_at_least_8"] is False


def test_verdict_for_z2_is_consistent(z2_quadruple, tol):
    scenario = theorem_scenario(z2_quadruple, z2_quadruple.patch.sample_points(), tol)
    verdict = scenario.verdict
    assert verdict.verdict == VerdictKind.CONSISTENT
    corollary = next(s for s in verdict.statements if s.statement == "corollary")
    assert corollary.hypotheses_met and corollary.condition_i and corollary.condition_ii
    theorem = next(s for s in verdict.statements if s.statement == "theorem")
    assert not theorem.hypotheses_met


def test_verdict_for_z4_is_out_of_scope(z4_quadruple, tol):
    scenario = theorem_scenario(z4_quadruple, z4_quadruple.patch.sample_points(), tol)
    assert scenario.verdict.verdict == VerdictKind.OUT_OF_SCOPE
    assert not scenario.verdict.generalized_kahler
    assert scenario.checks["theorem.db_vanishes"].max_residual == pytest.approx(1.0)
