"""
🧭 Geometría Compleja Generalizada

Álgebra del fibrado doble TM ⊕ T*M:

- emparejamiento canónico ⟨X+α, Y+β⟩ = ½(α(Y) + β(X))
- corchete de Courant de secciones con jets exactos
- subespacios de Dirac L(E, ε) y sus comprobaciones (isotropía, L ∩ L̄ = 0)
- residuos de integrabilidad (dε = 0 y cerradura bajo el corchete)
- transformaciones B
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from .bihermitian import EpsilonPair, BihermitianQuadruple
from .config import ToleranceConfig
from .errors import ClosedFormError
from .jet import Jet, jet_einsum
from .patch import FieldKind, TensorField, exterior_derivative, interior, lie_bracket
from .residuals import (
    CheckSpec,
    PointMapper,
    ResidualResult,
    max_abs,
    merge_pointwise,
    sequential_map,
)


# =============================================================================
# 📦 VECTORES Y SECCIONES GENERALIZADAS
# =============================================================================

@dataclass(frozen=True)
class GeneralizedVector:
    """X + α en un punto (partes complejas permitidas)"""

    vector: np.ndarray
    form: np.ndarray

    def __post_init__(self):
        if np.shape(self.vector) != np.shape(self.form):
            raise ValueError("Parte vectorial y parte forma de dimensiones distintas")

    @property
    def dim(self) -> int:
        return len(self.vector)

    def as_array(self) -> np.ndarray:
        return np.concatenate([np.asarray(self.vector, dtype=complex), np.asarray(self.form, dtype=complex)])


def canonical_pairing(u: GeneralizedVector, v: GeneralizedVector) -> complex:
    """
    ⟨X+α, Y+β⟩ = ½(α(Y) + β(X)), bilineal simétrico.

    Raises:
        ValueError: si las dimensiones no coinciden
    """
    if u.dim != v.dim:
        raise ValueError(f"Dimensiones distintas: {u.dim} y {v.dim}")
    value = 0.5 * (np.dot(u.form, v.vector) + np.dot(v.form, u.vector))
    return complex(value) if np.iscomplexobj(value) else float(value)


def pairing_matrix(dim: int) -> np.ndarray:
    """Matriz del emparejamiento en la base (∂₁…∂ₙ, dx¹…dxⁿ)"""
    identity = np.eye(dim)
    zeros = np.zeros((dim, dim))
    return 0.5 * np.block([[zeros, identity], [identity, zeros]])


def pairing_gram(basis: np.ndarray) -> np.ndarray:
    """Gram bilineal (no hermítico) de filas [X | α]"""
    basis = np.asarray(basis)
    dim = basis.shape[1] // 2
    return basis @ pairing_matrix(dim) @ basis.T


@dataclass(frozen=True)
class GeneralizedSection:
    """Sección X + α dada por un campo vectorial y una 1-forma"""

    vector: TensorField
    form: TensorField

    def jets(self, point: Sequence[float]) -> Tuple[Jet, Jet]:
        return self.vector.at(point), self.form.at(point)

    def at(self, point: Sequence[float]) -> GeneralizedVector:
        x, alpha = self.jets(point)
        return GeneralizedVector(x.value, alpha.value)


def courant_bracket(u: GeneralizedSection, v: GeneralizedSection, point: Sequence[float]) -> GeneralizedVector:
    """
    [X+α, Y+β] = [X,Y] + L_Xβ − L_Yα − ½d(ι_Xβ − ι_Yα).

    Con Cartan, la parte forma es ι_X dβ − ι_Y dα + ½d(ι_Xβ − ι_Yα).
    """
    x, alpha = u.jets(point)
    y, beta = v.jets(point)
    vector = lie_bracket(x, y)
    contraction = jet_einsum("i,i->", x, beta) - jet_einsum("i,i->", y, alpha)
    form = (
        interior(x.value, exterior_derivative(beta))
        - interior(y.value, exterior_derivative(alpha))
        + 0.5 * exterior_derivative(contraction)
    )
    return GeneralizedVector(vector, form)


# =============================================================================
# 🧱 SUBESPACIOS DE DIRAC
# =============================================================================

@dataclass(frozen=True)
class DiracSpec:
    """Subespacio L ⊂ (TM ⊕ T*M) ⊗ ℂ en un punto, por filas [X | α]"""

    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[1] // 2

    def isotropy_residual(self) -> float:
        return max_abs(pairing_gram(self.basis))

    def stacked_rank(self, tol: float = 1e-9) -> int:
        """Rango de L + L̄ (2n exactamente cuando L ∩ L̄ = 0)"""
        stacked = np.vstack([self.basis, np.conj(self.basis)])
        singular = np.linalg.svd(stacked, compute_uv=False)
        scale = max(1.0, singular[0]) if singular.size else 1.0
        return int(np.sum(singular > tol * scale))

    def is_generalized_complex(self, tol: float = 1e-9) -> bool:
        return self.basis.shape[0] == self.dim and self.stacked_rank(tol) == 2 * self.dim

    def decompose(self, w: GeneralizedVector) -> Tuple[np.ndarray, np.ndarray]:
        """w = l + l̄' con l ∈ L, l̄' ∈ L̄ (mínimos cuadrados)"""
        stacked = np.vstack([self.basis, np.conj(self.basis)]).T
        coefficients, *_ = np.linalg.lstsq(stacked, w.as_array(), rcond=None)
        k = self.basis.shape[0]
        inside = self.basis.T @ coefficients[:k]
        transverse = np.conj(self.basis).T @ coefficients[k:]
        return inside, transverse

    def transverse_norm(self, w: GeneralizedVector) -> float:
        """Norma de la componente de w transversal a L (en L̄)"""
        return float(np.linalg.norm(self.decompose(w)[1]))

    @classmethod
    def from_subspace(cls, e_basis: np.ndarray, eps_on_e: np.ndarray, tol: float = 1e-9) -> "DiracSubspace":
        """
        L(E, ε) = {X+α | X ∈ E, α|_E = ε(X)} para E dado por filas.

        ``eps_on_e[i, j] = ε(e_i, e_j)``. Devuelve la base junto con los dos
        criterios de estructura compleja generalizada.
        """
        e_basis = np.atleast_2d(np.asarray(e_basis, dtype=complex))
        eps_on_e = np.asarray(eps_on_e, dtype=complex)
        k, n = e_basis.shape
        if eps_on_e.shape != (k, k):
            raise ValueError(f"ε sobre E debe ser {k}×{k}")
        if max_abs(eps_on_e + eps_on_e.T) > tol:
            raise ValueError("ε no es antisimétrica")
        rows = []
        for i in range(k):
            alpha, *_ = np.linalg.lstsq(e_basis, eps_on_e[i], rcond=None)
            rows.append(np.concatenate([e_basis[i], alpha]))
        for annihilator in _null_space(e_basis, tol):
            rows.append(np.concatenate([np.zeros(n, dtype=complex), annihilator]))
        spec = cls(np.array(rows))
        spanning, nondegenerate = _tangent_criterion(e_basis, eps_on_e, tol)
        return DiracSubspace(spec, spec.is_generalized_complex(tol), spanning and nondegenerate)


@dataclass(frozen=True)
class DiracSubspace:
    """L(E, ε) con ambos criterios de estructura compleja generalizada"""

    spec: DiracSpec
    # L ∩ L̄ = 0 por rango
    rank_criterion: bool
    # E + Ē = T^ℂ y Im ε no degenerada en E ∩ Ē
    tangent_criterion: bool

    @property
    def criteria_agree(self) -> bool:
        return self.rank_criterion == self.tangent_criterion


def _null_space(matrix: np.ndarray, tol: float) -> List[np.ndarray]:
    """Base del núcleo derecho (vectores v con matrix @ v = 0)"""
    _, singular, vh = np.linalg.svd(matrix)
    scale = max(1.0, singular[0]) if singular.size else 1.0
    rank = int(np.sum(singular > tol * scale))
    return [np.conj(row) for row in vh[rank:]]


def _tangent_criterion(e_basis: np.ndarray, eps_on_e: np.ndarray, tol: float) -> Tuple[bool, bool]:
    k, n = e_basis.shape
    stacked = np.vstack([e_basis, np.conj(e_basis)])
    spanning = np.linalg.matrix_rank(stacked, tol=tol) == n
    # E ∩ Ē: c·e = d·ē ⇔ [eᵀ | −ēᵀ] (c, d) = 0
    kernel = _null_space(np.hstack([e_basis.T, -np.conj(e_basis).T]), tol)
    if not kernel:
        return spanning, True
    vectors = np.array([e_basis.T @ z[:k] for z in kernel])
    # E ∩ Ē es invariante por conjugación: base real a partir de partes reales e imaginarias
    real_parts = np.vstack([vectors.real, vectors.imag])
    _, singular, vh = np.linalg.svd(real_parts)
    scale = max(1.0, singular[0]) if singular.size else 1.0
    real_basis = vh[: int(np.sum(singular > tol * scale))]
    coordinates = np.array([np.linalg.lstsq(e_basis.T, r.astype(complex), rcond=None)[0] for r in real_basis])
    restricted = np.imag(coordinates @ eps_on_e @ coordinates.T)
    nondegenerate = np.linalg.matrix_rank(restricted, tol=tol) == len(real_basis)
    return spanning, nondegenerate


def dirac_from_epsilon(eps: np.ndarray) -> DiracSpec:
    """L(T^ℂM, ε): base {∂_i + ι_{∂_i} ε}"""
    eps = np.asarray(eps, dtype=complex)
    n = eps.shape[0]
    return DiracSpec(np.hstack([np.eye(n, dtype=complex), eps]))


# =============================================================================
# 🔁 INTEGRABILIDAD
# =============================================================================

def dirac_integrability_residual(
    eps: TensorField,
    points: Sequence[np.ndarray],
    name: str = "courant.dirac_integrability",
    tol: float = 1e-8,
    mapper: PointMapper = sequential_map,
) -> ResidualResult:
    """max |dε(∂_i, ∂_j, ∂_k)| sobre los puntos (E = T^ℂM, cerradura de Lie automática)"""
    spec = CheckSpec(name, "dε = 0 (L(T^ℂM, ε) closed under the Courant bracket)", tol)
    per_point = mapper(lambda p: {name: max_abs(exterior_derivative(eps.at(p)))}, points)
    return merge_pointwise([spec], points, per_point)[name]


def frame_section(eps: TensorField, index: int, coefficients: np.ndarray) -> GeneralizedSection:
    """c(x)(∂_index + ι_{∂_index} ε) con c(x) = c₀ + Σ c_i x_i"""
    dim = eps.dim
    unit = np.eye(dim)[index]

    def scale(point: np.ndarray) -> Jet:
        return Jet(coefficients[0] + coefficients[1:] @ point, coefficients[1:].copy())

    vector = TensorField.from_callable(
        FieldKind.VECTOR, dim, lambda p: Jet.constant(unit, dim) * scale(p), f"frame{index}"
    )
    form = TensorField.from_callable(
        FieldKind.ONE_FORM, dim, lambda p: eps.at(p)[index] * scale(p), f"frame{index}_form"
    )
    return GeneralizedSection(vector, form)


def random_frame_pairs(eps: TensorField, count: int, seed: int) -> List[Tuple[GeneralizedSection, GeneralizedSection]]:
    """Pares de secciones de L(T^ℂM, ε) con coeficientes afines aleatorios"""
    rng = np.random.default_rng(seed)
    dim = eps.dim
    pairs = []
    for _ in range(count):
        i, j = rng.integers(0, dim, size=2)
        pairs.append((
            frame_section(eps, int(i), rng.normal(size=dim + 1)),
            frame_section(eps, int(j), rng.normal(size=dim + 1)),
        ))
    return pairs


def courant_closure_residual(
    eps: TensorField,
    points: Sequence[np.ndarray],
    pairs: int = 10,
    seed: int = 0,
    name: str = "courant.closure",
    tol: float = 1e-8,
    mapper: PointMapper = sequential_map,
) -> ResidualResult:
    """Máxima componente transversal a L del corchete de pares de secciones de L"""
    spec = CheckSpec(name, "[Γ(L), Γ(L)] ⊂ Γ(L) for L = L(T^ℂM, ε)", tol)
    sections = random_frame_pairs(eps, pairs, seed)

    def at(point):
        dirac = dirac_from_epsilon(eps.at(point).value)
        worst = 0.0
        for u, v in sections:
            worst = max(worst, dirac.transverse_norm(courant_bracket(u, v, point)))
        return {name: worst}

    per_point = mapper(at, points)
    return merge_pointwise([spec], points, per_point)[name]


def courant_suite(
    eps: EpsilonPair,
    points: Sequence[np.ndarray],
    tol: Optional[ToleranceConfig] = None,
    seed: int = 0,
    mapper: PointMapper = sequential_map,
) -> Dict[str, ResidualResult]:
    """Isotropía, estructura compleja generalizada, dε± = 0 y cerradura de Courant"""
    tol = tol or ToleranceConfig()
    results: Dict[str, ResidualResult] = {}
    for sign, field in ((1, eps.plus), (-1, eps.minus)):
        suffix = "plus" if sign > 0 else "minus"
        isotropy = CheckSpec(f"courant.isotropy_{suffix}", "⟨L, L⟩ = 0 for L = L(T^ℂM, ε)", tol.algebraic)
        complex_check = CheckSpec(
            f"courant.generalized_complex_{suffix}", "L ∩ conj(L) = 0 (rank of L + conj(L) is 2n)", 0.5
        )

        def algebraic(point, field=field, isotropy=isotropy, complex_check=complex_check):
            dirac = dirac_from_epsilon(field.at(point).value)
            return {
                isotropy.name: dirac.isotropy_residual(),
                complex_check.name: 0.0 if dirac.is_generalized_complex(tol.dirac_rank) else 1.0,
            }

        results.update(merge_pointwise([isotropy, complex_check], points, mapper(algebraic, points)))
        check = dirac_integrability_residual(
            field, points, f"courant.dirac_integrability_{suffix}", tol.derivative, mapper
        )
        results[check.name] = check
    closure = [
        courant_closure_residual(field, points, seed=seed + offset, name="courant.closure",
                                 tol=tol.derivative, mapper=mapper)
        for offset, field in enumerate((eps.plus, eps.minus))
    ]
    results["courant.closure"] = max(closure, key=lambda r: r.max_residual)
    return results


# =============================================================================
# 🅱️ TRANSFORMACIONES B
# =============================================================================

def shifted_field(base: TensorField, shift: TensorField, name: str = "") -> TensorField:
    """Campo suma base + shift"""
    return TensorField.from_callable(
        base.kind, base.dim, lambda p: base.at(p) + shift.at(p), name or base.name
    )


def b_field_transform(
    q: BihermitianQuadruple,
    eps: EpsilonPair,
    b_field: TensorField,
    points: Sequence[np.ndarray],
    tol: Optional[ToleranceConfig] = None,
) -> Tuple[BihermitianQuadruple, EpsilonPair]:
    """
    Aplicar la transformación B: b ↦ b + B, ε± ↦ ε± + B; g y J± no cambian.

    Raises:
        ClosedFormError: si max |dB| supera la tolerancia en los puntos dados
    """
    tol = tol or ToleranceConfig()
    worst, where = 0.0, None
    for point in points:
        value = max_abs(exterior_derivative(b_field.at(point)))
        if value > worst:
            worst, where = value, point
    if worst > tol.closed_b:
        raise ClosedFormError(f"dB ≠ 0 (residuo {worst:.3e})", where)
    logger.debug(f"🅱️ Transformación B aplicada sobre '{q.name}'")
    transformed = q.with_b(shifted_field(q.b, b_field, "b"))
    return transformed, EpsilonPair(
        shifted_field(eps.plus, b_field, "eps_plus"),
        shifted_field(eps.minus, b_field, "eps_minus"),
    )
