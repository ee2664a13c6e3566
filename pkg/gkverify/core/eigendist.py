"""
🌈 Eigendistribuciones de Σ = J₊J₋ + J₋J₊

Descomposición espectral puntual de Σ en bandas H^a (autovalor −2a),
campos de distribución con proyectores diferenciables y los residuos de
foliación: Frobenius, foliación riemanniana (métrica bundle-like) y
paralelismo. Incluye el escenario del teorema de integrabilidad con su
veredicto.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from .bihermitian import (
    BihermitianQuadruple,
    band_kahler_combinations,
    gk_integrability_residual,
    is_generalized_kahler,
)
from .config import ToleranceConfig
from .errors import AmbiguousClusteringError, NonIntegrableError, RankJumpError
from .jet import Jet, identity, jet_einsum, stack
from .models import ScenarioVerdict, StatementOutcome, VerdictKind
from .patch import (
    TensorField,
    christoffels,
    covariant_deriv_endo,
    exterior_derivative,
    lie_bracket,
    metric_sharp_flat,
    orthonormal_frame,
    tensor_norm,
)
from .residuals import (
    CheckSpec,
    PointMapper,
    ResidualResult,
    max_abs,
    merge_pointwise,
    sequential_map,
    single_result,
)


# =============================================================================
# 📊 DESCOMPOSICIÓN ESPECTRAL
# =============================================================================

@dataclass(frozen=True)
class Band:
    """Banda espectral: valor a, multiplicidad y proyector g-ortogonal"""
    a_value: float
    multiplicity: int
    projector: np.ndarray

    @property
    def eigenvalue(self) -> float:
        return -2.0 * self.a_value


@dataclass(frozen=True)
class EigenStructure:
    """Bandas de Σ en un punto, ordenadas por a creciente"""
    bands: Tuple[Band, ...]
    cluster_tol: float

    @property
    def values(self) -> List[float]:
        return [b.a_value for b in self.bands]

    @property
    def dimensions(self) -> List[int]:
        return [b.multiplicity for b in self.bands]

    def invariant_residuals(self, sigma: np.ndarray, g: np.ndarray, j_plus: np.ndarray,
                            j_minus: np.ndarray) -> Dict[str, float]:
        """Idempotencia, autoadjunción, ortogonalidad, completitud, conmutación y autovalor"""
        n = g.shape[0]
        projectors = [b.projector for b in self.bands]
        values = {
            "idempotent": max(max_abs(p @ p - p) for p in projectors),
            "self_adjoint": max(max_abs(g @ p - (g @ p).T) for p in projectors),
            "complete": max_abs(sum(projectors) - np.eye(n)),
            "commute_j_plus": max(max_abs(j_plus @ p - p @ j_plus) for p in projectors),
            "commute_j_minus": max(max_abs(j_minus @ p - p @ j_minus) for p in projectors),
            "eigenvalue": max(max_abs(sigma @ b.projector - b.eigenvalue * b.projector) for b in self.bands),
        }
        values["orthogonal"] = max(
            [max_abs(p @ r) for i, p in enumerate(projectors) for j, r in enumerate(projectors) if i != j],
            default=0.0,
        )
        return values


def cluster_eigenvalues(eigenvalues: Sequence[float], cluster_tol: float,
                        point: Optional[Sequence[float]] = None) -> List[List[int]]:
    """
    Agrupar autovalores ordenados: saltos ≤ tol se funden, saltos en
    (tol, 3·tol] son ambiguos.

    Raises:
        AmbiguousClusteringError: si algún salto cae en la banda de guarda
    """
    order = list(np.argsort(eigenvalues))
    clusters: List[List[int]] = [[order[0]]]
    for previous, current in zip(order, order[1:]):
        gap = eigenvalues[current] - eigenvalues[previous]
        if gap <= cluster_tol:
            clusters[-1].append(current)
        elif gap <= 3 * cluster_tol:
            raise AmbiguousClusteringError(
                f"Autovalores {eigenvalues[previous]:.12g} y {eigenvalues[current]:.12g} "
                f"en la banda de guarda (salto {gap:.3e})",
                point,
            )
        else:
            clusters.append([current])
    return clusters


def spectral_split(q: BihermitianQuadruple, point: Sequence[float],
                   cluster_tol: float = 1e-6) -> EigenStructure:
    """
    Autodescomposición simétrica de Σ en un marco g-ortonormal.

    Raises:
        AmbiguousClusteringError: si dos bandas no son separables
    """
    loc = q.local(point)
    g = loc.g.value
    sigma = np.real(loc.sigma.value)
    frame = orthonormal_frame(g)
    coframe = frame.T @ g
    local = coframe @ sigma @ frame
    eigenvalues, vectors = np.linalg.eigh(0.5 * (local + local.T))
    clusters = cluster_eigenvalues(eigenvalues, cluster_tol, loc.point)
    bands = []
    for members in clusters:
        v = vectors[:, members]
        projector = frame @ v @ v.T @ coframe
        a_value = -float(np.mean(eigenvalues[members])) / 2.0
        bands.append(Band(a_value, len(members), projector))
    bands.sort(key=lambda b: b.a_value)
    return EigenStructure(tuple(bands), cluster_tol)


@dataclass(frozen=True)
class BandLayout:
    """Estructura de bandas fija en el parche (valores representativos y dimensiones)"""
    values: Tuple[float, ...]
    dimensions: Tuple[int, ...]

    def index_of(self, a_value: float, tol: float) -> Optional[int]:
        for index, value in enumerate(self.values):
            if abs(value - a_value) <= tol:
                return index
        return None


def band_layout(q: BihermitianQuadruple, points: Sequence[np.ndarray],
                cluster_tol: float = 1e-6) -> BandLayout:
    """
    Pasada secuencial de agrupamiento: fija número y dimensiones de bandas.

    Raises:
        RankJumpError: si el número o las dimensiones de las bandas cambian
        AmbiguousClusteringError: si algún punto es ambiguo
    """
    reference: Optional[EigenStructure] = None
    for point in points:
        structure = spectral_split(q, point, cluster_tol)
        if reference is None:
            reference = structure
            continue
        if structure.dimensions != reference.dimensions:
            raise RankJumpError(
                f"Bandas {structure.dimensions} distintas de {reference.dimensions}", point
            )
    if reference is None:
        raise ValueError("band_layout necesita al menos un punto")
    logger.debug(f"🌈 Bandas a = {[round(v, 10) for v in reference.values]}, dims {reference.dimensions}")
    return BandLayout(tuple(reference.values), tuple(reference.dimensions))


def band_projector_jets(q: BihermitianQuadruple, point: Sequence[float], layout: BandLayout,
                        cluster_tol: float = 1e-6) -> List[Jet]:
    """
    Proyectores de banda como Jets vía el polinomio de Lagrange
    P_j = Π_{l≠j} (Σ − λ_l)/(λ_j − λ_l), con dλ_j = tr(P_j ∂Σ)/m_j.
    """
    structure = spectral_split(q, point, cluster_tol)
    if tuple(structure.dimensions) != layout.dimensions:
        raise RankJumpError(f"Bandas {structure.dimensions} distintas de {layout.dimensions}", point)
    sigma = q.local(point).sigma.real
    n = q.dim
    if len(structure.bands) == 1:
        return [identity(n)]
    lambdas = [
        Jet(b.eigenvalue, np.einsum("ij,jiZ->Z", b.projector, sigma.grad) / b.multiplicity)
        for b in structure.bands
    ]
    eye = identity(n)
    projectors = []
    for j, lam_j in enumerate(lambdas):
        projector = eye
        for l, lam_l in enumerate(lambdas):
            if l == j:
                continue
            projector = projector @ ((sigma - eye * lam_l) / (lam_j - lam_l))
        projectors.append(projector)
    return projectors


# =============================================================================
# 🧵 CAMPOS DE DISTRIBUCIÓN
# =============================================================================

ProjectorFn = Callable[[np.ndarray], Jet]


@dataclass(frozen=True)
class DistributionField:
    """Distribución de rango constante dada por su campo de proyectores g-ortogonales"""

    metric: TensorField
    projector: ProjectorFn = field(compare=False)
    rank: int
    name: str = ""
    frame_fields: Optional[Tuple[TensorField, ...]] = field(default=None, compare=False)
    drop_tol: float = 1e-6

    @property
    def dim(self) -> int:
        return self.metric.dim

    @classmethod
    def from_band(cls, q: BihermitianQuadruple, index: int, layout: BandLayout,
                  cluster_tol: float = 1e-6, drop_tol: float = 1e-6) -> "DistributionField":
        return cls(
            q.g,
            lambda p: band_projector_jets(q, p, layout, cluster_tol)[index],
            layout.dimensions[index],
            f"H^{layout.values[index]:.6g}",
            drop_tol=drop_tol,
        )

    @classmethod
    def from_bands(cls, q: BihermitianQuadruple, indices: Sequence[int], layout: BandLayout,
                   cluster_tol: float = 1e-6, drop_tol: float = 1e-6) -> "DistributionField":
        """Suma ortogonal de varias bandas"""
        indices = tuple(indices)

        def projector(p):
            jets = band_projector_jets(q, p, layout, cluster_tol)
            total = jets[indices[0]]
            for i in indices[1:]:
                total = total + jets[i]
            return total

        name = " ⊕ ".join(f"H^{layout.values[i]:.6g}" for i in indices)
        return cls(q.g, projector, sum(layout.dimensions[i] for i in indices), name, drop_tol=drop_tol)

    @classmethod
    def from_vector_fields(cls, metric: TensorField, fields: Sequence[TensorField],
                           name: str = "", drop_tol: float = 1e-6) -> "DistributionField":
        """span{V_a}: P = V (Vᵀ g V)⁻¹ Vᵀ g"""
        fields = tuple(fields)

        def projector(p):
            g = metric.at(p)
            v = stack([f.at(p) for f in fields], axis=1)
            gram = v.T @ g @ v
            return v @ gram.inv() @ v.T @ g

        return cls(metric, projector, len(fields), name, frame_fields=fields, drop_tol=drop_tol)

    @classmethod
    def from_projector(cls, metric: TensorField, projector: ProjectorFn, rank: int,
                       name: str = "", drop_tol: float = 1e-6) -> "DistributionField":
        return cls(metric, projector, rank, name, drop_tol=drop_tol)

    def projector_at(self, point: Sequence[float]) -> Jet:
        return self.projector(np.asarray(point, dtype=float))

    def complement(self) -> "DistributionField":
        """Complemento g-ortogonal: Id − P"""
        n = self.dim
        return DistributionField(
            self.metric,
            lambda p: identity(n) - self.projector(p),
            n - self.rank,
            f"({self.name})^⊥",
            drop_tol=self.drop_tol,
        )

    def frame_at(self, point: Sequence[float]) -> List[Jet]:
        """
        Marco g-ortonormal local como Jets.

        Proyecta el marco coordenado (o los campos dados), descarta vectores
        casi nulos y ortonormaliza tomando primero el de mayor norma.
        """
        point = np.asarray(point, dtype=float)
        g = self.metric.at(point)
        if self.frame_fields is not None:
            candidates = [f.at(point) for f in self.frame_fields]
        else:
            p = self.projector_at(point)
            candidates = [p[:, c] for c in range(self.dim)]
        order = _greedy_pivots([np.real(c.value) for c in candidates], g.value, self.rank, self.drop_tol)
        if len(order) != self.rank:
            raise RankJumpError(f"'{self.name}' tiene rango {len(order)} ≠ {self.rank}", point)
        frame: List[Jet] = []
        for index in order:
            v = candidates[index]
            w = v
            for e in frame:
                w = w - e * jet_einsum("i,ij,j->", e, g, v)
            frame.append(w / jet_einsum("i,ij,j->", w, g, w).sqrt())
        return frame


def _greedy_pivots(vectors: Sequence[np.ndarray], g: np.ndarray, rank: int, drop_tol: float) -> List[int]:
    """Orden de Gram-Schmidt: en cada paso el candidato con mayor resto"""
    remaining = [np.array(v, dtype=float) for v in vectors]
    chosen: List[int] = []
    while len(chosen) < rank:
        norms = [
            -1.0 if i in chosen else math.sqrt(max(float(r @ g @ r), 0.0))
            for i, r in enumerate(remaining)
        ]
        best = int(np.argmax(norms)) if norms else -1
        if best < 0 or norms[best] < drop_tol:
            break
        chosen.append(best)
        e = remaining[best] / norms[best]
        remaining = [r - (e @ g @ r) * e for r in remaining]
    return chosen


# =============================================================================
# 📏 RESIDUOS DE FOLIACIÓN
# =============================================================================

def frobenius_at(dist: DistributionField, point: Sequence[float]) -> float:
    """max ∥P_{D^⊥}[e_a, e_b]∥_g sobre pares del marco"""
    point = np.asarray(point, dtype=float)
    frame = dist.frame_at(point)
    p = dist.projector_at(point).value
    g = dist.metric.at(point).value
    transverse = np.eye(dist.dim) - p
    worst = 0.0
    for a in range(len(frame)):
        for b in range(a + 1, len(frame)):
            w = transverse @ lie_bracket(frame[a], frame[b])
            worst = max(worst, math.sqrt(max(float(np.real(np.conj(w) @ g @ w)), 0.0)))
    return worst


def frobenius_residual(dist: DistributionField, points: Sequence[np.ndarray],
                       name: Optional[str] = None, tol: float = 1e-8,
                       mapper: PointMapper = sequential_map) -> ResidualResult:
    """
    Residuo de Frobenius de la distribución.

    Raises:
        RankJumpError: si el rango cambia en el parche
    """
    name = name or f"eigendist.frobenius[{dist.name}]"
    spec = CheckSpec(name, f"[Γ(D), Γ(D)] ⊂ Γ(D) for D = {dist.name}", tol)
    return merge_pointwise([spec], points, mapper(lambda p: {name: frobenius_at(dist, p)}, points))[name]


def riemannian_foliation_at(dist: DistributionField, point: Sequence[float],
                            integrability_tol: float = 1e-7) -> float:
    """
    max |g(∇_Y X, Z) + g(∇_Z X, Y)| con X ∈ D, Y, Z ∈ D^⊥.

    Raises:
        NonIntegrableError: si D no es integrable en el punto
    """
    point = np.asarray(point, dtype=float)
    frobenius = frobenius_at(dist, point)
    if frobenius > integrability_tol:
        raise NonIntegrableError(f"'{dist.name}' no es integrable (residuo {frobenius:.3e})", point)
    g_jet, _ = metric_sharp_flat(dist.metric, point)
    g = g_jet.value
    gamma = christoffels(g_jet, point)
    tangent = dist.frame_at(point)
    normal = [v.value for v in dist.complement().frame_at(point)] if dist.rank < dist.dim else []
    worst = 0.0
    for x in tangent:
        # nabla_x[k, j] = ∂_j X^k + Γ^k_jl X^l
        nabla_x = x.grad + np.einsum("kjl,l->kj", gamma, x.value)
        for y in normal:
            for z in normal:
                value = z @ g @ (nabla_x @ y) + y @ g @ (nabla_x @ z)
                worst = max(worst, abs(float(value)))
    return worst


def riemannian_foliation_residual(dist: DistributionField, points: Sequence[np.ndarray],
                                  name: Optional[str] = None, tol: float = 1e-8,
                                  integrability_tol: float = 1e-7,
                                  mapper: PointMapper = sequential_map) -> ResidualResult:
    """
    Obstrucción a que g sea bundle-like para la foliación D.

    Raises:
        NonIntegrableError: si D no es integrable en algún punto
    """
    name = name or f"eigendist.riemannian_foliation[{dist.name}]"
    spec = CheckSpec(name, f"g(∇_Y X, Z) + g(∇_Z X, Y) = 0, X ∈ {dist.name}, Y, Z ⊥", tol)
    per_point = mapper(lambda p: {name: riemannian_foliation_at(dist, p, integrability_tol)}, points)
    result = merge_pointwise([spec], points, per_point)[name]
    result.notes.append("bundle-like metric residual (standard formalization of a Riemannian foliation)")
    return result


def parallel_at(dist: DistributionField, point: Sequence[float]) -> float:
    """∥∇P∥_g en el punto"""
    point = np.asarray(point, dtype=float)
    g, g_inv = metric_sharp_flat(dist.metric, point)
    nabla = covariant_deriv_endo(dist.projector_at(point), g, point)
    return tensor_norm(nabla, g.value, g_inv.value, covariant=(True, False, True))


def parallel_foliation_residual(dist: DistributionField, points: Sequence[np.ndarray],
                                name: Optional[str] = None, tol: float = 1e-8,
                                mapper: PointMapper = sequential_map) -> ResidualResult:
    name = name or f"eigendist.parallel[{dist.name}]"
    spec = CheckSpec(name, f"∇P = 0 for the projector onto {dist.name}", tol)
    return merge_pointwise([spec], points, mapper(lambda p: {name: parallel_at(dist, p)}, points))[name]


# =============================================================================
# 🧪 SUITE DE EIGENDISTRIBUCIONES
# =============================================================================

_INVARIANTS = {
    "idempotent": "P² = P for every band projector",
    "self_adjoint": "g(PX, Y) = g(X, PY) for every band projector",
    "orthogonal": "P_i P_j = 0 for distinct bands",
    "complete": "Σ_j P_j = Id",
    "commute_j_plus": "J₊P = PJ₊ (H^a preserved by J₊)",
    "commute_j_minus": "J₋P = PJ₋ (H^a preserved by J₋)",
    "eigenvalue": "ΣP_j = −2a_j P_j",
}


def eigendist_suite(
    q: BihermitianQuadruple,
    points: Sequence[np.ndarray],
    tol: Optional[ToleranceConfig] = None,
    mapper: PointMapper = sequential_map,
) -> Tuple[Dict[str, ResidualResult], BandLayout]:
    """
    Invariantes de las bandas y residuos de foliación por banda.

    Raises:
        AmbiguousClusteringError: si la agrupación es ambigua
        RankJumpError: si las dimensiones cambian en el parche
    """
    tol = tol or ToleranceConfig()
    layout = band_layout(q, points, tol.cluster_tol)
    specs = [
        CheckSpec(f"eigendist.{key}", reference,
                  tol.derivative if key.startswith("commute") else tol.algebraic)
        for key, reference in _INVARIANTS.items()
    ]

    def invariants(point):
        loc = q.local(point)
        structure = spectral_split(q, point, tol.cluster_tol)
        values = structure.invariant_residuals(
            np.real(loc.sigma.value), loc.g.value, np.real(loc.jp.value), np.real(loc.jm.value)
        )
        return {f"eigendist.{key}": value for key, value in values.items()}

    results = merge_pointwise(specs, points, mapper(invariants, points))

    implication_ok = True
    for index, value in enumerate(layout.values):
        band = DistributionField.from_band(q, index, layout, tol.cluster_tol, tol.frame_drop)
        label = f"band{index}"
        parallel = parallel_foliation_residual(band, points, f"eigendist.parallel_{label}", tol.derivative, mapper)
        frobenius = frobenius_residual(band, points, f"eigendist.frobenius_{label}", tol.derivative, mapper)
        checks = [parallel, frobenius]
        if band.rank < q.dim:
            complement = band.complement()
            checks.append(frobenius_residual(
                complement, points, f"eigendist.frobenius_complement_{label}", tol.derivative, mapper
            ))
        riemannian = _riemannian_or_skip(band, points, f"eigendist.riemannian_foliation_{label}", tol, mapper)
        checks.append(riemannian)
        for check in checks:
            check.notes.append(f"a = {value:.12g}, dim {layout.dimensions[index]}")
            results[check.name] = check
        if parallel.max_residual < tol.implication_parallel:
            implication_ok &= max(frobenius.max_residual, riemannian.max_residual) < tol.implication_foliation

    results["eigendist.parallel_implies_foliations"] = single_result(
        CheckSpec(
            "eigendist.parallel_implies_foliations",
            "∇P = 0 ⇒ D integrable ⇒ Riemannian foliation, for every band",
            0.5,
        ),
        0.0 if implication_ok else 1.0,
    )

    extremal = [v for v in layout.values if abs(abs(v) - 1) <= tol.cluster_tol]
    if extremal:
        results.update(band_kahler_combinations(q, points, extremal, tol, mapper))
    return results, layout


def _riemannian_or_skip(band: DistributionField, points: Sequence[np.ndarray], name: str,
                        tol: ToleranceConfig, mapper: PointMapper) -> ResidualResult:
    """Foliación riemanniana donde la banda es integrable; None (omitido) en otro caso"""
    spec = CheckSpec(name, f"g(∇_Y X, Z) + g(∇_Z X, Y) = 0, X ∈ {band.name}, Y, Z ⊥", tol.derivative)

    def at(point):
        try:
            return {name: riemannian_foliation_at(band, point, 10 * tol.derivative)}
        except NonIntegrableError:
            return {name: None}

    result = merge_pointwise([spec], points, mapper(at, points))[name]
    result.notes.append("bundle-like metric residual (standard formalization of a Riemannian foliation)")
    return result


# =============================================================================
# ⚖️ ESCENARIO DEL TEOREMA
# =============================================================================

@dataclass
class TheoremScenario:
    """Resultado del escenario: comprobaciones y veredicto"""
    checks: Dict[str, ResidualResult]
    verdict: ScenarioVerdict


def db_norm(q: BihermitianQuadruple, points: Sequence[np.ndarray],
            tol: float = 1e-10, mapper: PointMapper = sequential_map) -> ResidualResult:
    """max |db| sobre los puntos (condición (i): db = 0)"""
    spec = CheckSpec("theorem.db_vanishes", "db = 0", tol)
    per_point = mapper(lambda p: {spec.name: max_abs(exterior_derivative(q.b.at(p)))}, points)
    return merge_pointwise([spec], points, per_point)[spec.name]


def theorem_scenario(
    q: BihermitianQuadruple,
    points: Sequence[np.ndarray],
    tol: Optional[ToleranceConfig] = None,
    mapper: PointMapper = sequential_map,
) -> TheoremScenario:
    """
    Evaluar hipótesis y las condiciones (i) db = 0 y (ii) de integrabilidad
    del teorema y del corolario, y si coinciden en este ejemplo.

    Raises:
        AmbiguousClusteringError: si la agrupación es ambigua
        RankJumpError: si las dimensiones cambian en el parche
    """
    tol = tol or ToleranceConfig()
    gk = gk_integrability_residual(q, points, tol, mapper)
    generalized_kahler = is_generalized_kahler(gk)
    layout = band_layout(q, points, tol.cluster_tol)
    checks: Dict[str, ResidualResult] = {}

    db = db_norm(q, points, tol.algebraic, mapper)
    checks[db.name] = db
    condition_i = db.passed

    plus = layout.index_of(1.0, tol.cluster_tol)
    minus = layout.index_of(-1.0, tol.cluster_tol)
    inner = [i for i in range(len(layout.values)) if i not in (plus, minus)]
    hypotheses = {
        "generalized_kahler": generalized_kahler,
        "j_plus_plus_j_minus_invertible": minus is None,
        "j_plus_minus_j_minus_invertible": plus is None,
        "inner_bands_dim_at_least_8": all(layout.dimensions[i] >= 8 for i in inner),
    }

    def integrable(dist: DistributionField, name: str) -> bool:
        if dist.rank in (0, dist.dim):
            return True
        result = frobenius_residual(dist, points, name, tol.derivative, mapper)
        result.notes.append(dist.name)
        checks[result.name] = result
        return result.passed

    # (ii) del teorema: cada banda y su complemento ortogonal
    bands = [DistributionField.from_band(q, i, layout, tol.cluster_tol, tol.frame_drop)
             for i in range(len(layout.values))]
    theorem_ii = True
    for index, band in enumerate(bands):
        theorem_ii &= integrable(band, f"theorem.frobenius_band{index}")
        theorem_ii &= integrable(band.complement(), f"theorem.frobenius_complement_band{index}")

    # (ii) del corolario: H^± y la suma de dos bandas cualesquiera
    corollary_ii = True
    for index in (plus, minus):
        if index is not None:
            corollary_ii &= integrable(bands[index], f"theorem.frobenius_band{index}")
    for i in range(len(bands)):
        for j in range(i + 1, len(bands)):
            pair = DistributionField.from_bands(q, (i, j), layout, tol.cluster_tol, tol.frame_drop)
            corollary_ii &= integrable(pair, f"theorem.frobenius_sum_band{i}_band{j}")

    statements = []
    theorem_hypotheses = (
        generalized_kahler
        and (hypotheses["j_plus_plus_j_minus_invertible"] or hypotheses["j_plus_minus_j_minus_invertible"])
        and hypotheses["inner_bands_dim_at_least_8"]
    )
    corollary_hypotheses = generalized_kahler and hypotheses["inner_bands_dim_at_least_8"]
    for statement, met, condition_ii in (
        ("theorem", theorem_hypotheses, theorem_ii),
        ("corollary", corollary_hypotheses, corollary_ii),
    ):
        statements.append(StatementOutcome(
            statement=statement,
            hypotheses_met=met,
            condition_i=condition_i,
            condition_ii=condition_ii,
            agrees=condition_i == condition_ii,
        ))

    notes: List[str] = []
    if not generalized_kahler:
        verdict = VerdictKind.OUT_OF_SCOPE
        failing = sorted(name for name, r in gk.items() if not r.passed)
        notes.append(f"not a generalized Kähler structure (failing: {', '.join(failing)})")
    else:
        applicable = [s for s in statements if s.hypotheses_met]
        if not applicable:
            verdict = VerdictKind.HYPOTHESIS_NOT_SATISFIED
        elif all(s.agrees for s in applicable):
            verdict = VerdictKind.CONSISTENT
        else:
            verdict = VerdictKind.INCONSISTENT
    logger.info(f"⚖️ Veredicto del escenario: {verdict.value}")

    return TheoremScenario(checks, ScenarioVerdict(
        verdict=verdict,
        generalized_kahler=generalized_kahler,
        hypotheses=hypotheses,
        band_values=list(layout.values),
        band_dimensions=list(layout.dimensions),
        db_norm=db.max_residual,
        statements=statements,
        notes=notes,
    ))
