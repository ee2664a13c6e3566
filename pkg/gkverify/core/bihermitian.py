"""
🔀 Cuádruplas Bihermíticas

Este módulo implementa el diccionario entre datos de Kähler generalizado y
cuádruplas bihermíticas (g, b, J₊, J₋), junto con la batería de residuos de
todas las identidades de la cadena que lleva de la integrabilidad a la
estructura hiperkähler:

- validación de la cuádrupla (J±² = −Id, compatibilidad hermítica, b antisimétrica)
- Σ = J₊J₋ + J₋J₊ y la función a, las estructuras K± y los exponentes f±
- las dos-formas complejas ε± y su reconstrucción
- integrabilidad de Kähler generalizado (Nijenhuis y paralelismo respecto de ∇±)
- identidades del régimen escalar, gauge normalizado y el caso cuatridimensional
"""

import math
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from .config import ToleranceConfig
from .errors import (
    OrientationMismatchError,
    QuadrupleValidationError,
    ScalarRegimeError,
    SingularCombinationError,
)
from .jet import Jet
from .patch import (
    FieldKind,
    Patch,
    PointFrame,
    TensorField,
    act_on_form,
    almost_complex_residual,
    christoffels,
    covariant_deriv_endo,
    exterior_derivative,
    hodge_star,
    metric_sharp_flat,
    nijenhuis,
    orthonormal_frame,
    pfaffian_sign,
    wedge,
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

SIGNS = (1, -1)


def _suffix(sign: int) -> str:
    return "plus" if sign > 0 else "minus"


def _pm(sign: int) -> str:
    return "+" if sign > 0 else "−"


# =============================================================================
# 📦 TIPOS
# =============================================================================

@dataclass(frozen=True)
class BihermitianQuadruple:
    """Cuádrupla (g, b, J₊, J₋) sobre un parche"""

    patch: Patch
    g: TensorField
    b: TensorField
    j_plus: TensorField
    j_minus: TensorField
    orientation: int = 1
    name: str = ""

    @property
    def dim(self) -> int:
        return self.patch.dim

    def with_b(self, b: TensorField) -> "BihermitianQuadruple":
        return replace(self, b=b)

    def local(self, point: Sequence[float]) -> "LocalQuadruple":
        return LocalQuadruple(self, point)


class LocalQuadruple:
    """Jets de la cuádrupla y cantidades derivadas en un punto (con caché)"""

    def __init__(self, q: BihermitianQuadruple, point: Sequence[float]):
        self.q = q
        self.point = np.asarray(point, dtype=float)
        self.dim = q.dim
        self.frame = PointFrame(
            self.point, {"g": q.g, "b": q.b, "j_plus": q.j_plus, "j_minus": q.j_minus}
        )

    @property
    def _metric(self) -> Tuple[Jet, Jet]:
        return self.frame.cache("metric", lambda: metric_sharp_flat(self.frame.jet("g"), self.point))

    @property
    def g(self) -> Jet:
        return self._metric[0]

    @property
    def g_inv(self) -> Jet:
        return self._metric[1]

    @property
    def b(self) -> Jet:
        return self.frame.jet("b")

    @property
    def jp(self) -> Jet:
        return self.frame.jet("j_plus")

    @property
    def jm(self) -> Jet:
        return self.frame.jet("j_minus")

    def j(self, sign: int) -> Jet:
        return self.jp if sign > 0 else self.jm

    @property
    def gamma(self) -> np.ndarray:
        return self.frame.cache("gamma", lambda: christoffels(self.g, self.point))

    @property
    def jp_jm(self) -> Jet:
        return self.frame.cache("jp_jm", lambda: self.jp @ self.jm)

    @property
    def sigma(self) -> Jet:
        return self.frame.cache("sigma", lambda: self.jp_jm + self.jm @ self.jp)

    @property
    def a(self) -> Jet:
        """a = −tr(J₊J₋)/dim (real)"""
        return self.frame.cache("a", lambda: (-self.jp_jm.trace() / self.dim).real)

    @property
    def a_value(self) -> float:
        return float(self.a.value)

    @property
    def da(self) -> np.ndarray:
        return np.asarray(self.a.grad, dtype=float)

    @property
    def db(self) -> np.ndarray:
        return self.frame.cache("db", lambda: exterior_derivative(self.b))

    @property
    def da_wedge_b(self) -> np.ndarray:
        return self.frame.cache("da_wedge_b", lambda: wedge(self.da, self.b.value))

    def combination(self, sign: int) -> Jet:
        """J₊ + sign·J₋"""
        return self.jp + self.jm * sign

    def require_invertible(self, sign: int, tol: Optional[float] = None) -> None:
        """Comprobar que J₊ + sign·J₋ es invertible en el punto"""
        tol = ToleranceConfig().invertibility if tol is None else tol
        smallest = np.linalg.svd(self.combination(sign).value, compute_uv=False)[-1]
        if smallest < tol:
            raise SingularCombinationError(_pm(sign), self.point)

    def k(self, sign: int) -> Jet:
        """K± = (J₊ ± J₋)/√(2(1 ± a))"""
        scale = ((self.a * sign + 1) * 2).sqrt()
        return self.combination(sign) / scale

    def nabla(self, endo: Jet) -> np.ndarray:
        return covariant_deriv_endo(endo, self.g, self.point, gamma=self.gamma)


@dataclass(frozen=True)
class SigmaData:
    """Σ = J₊J₋ + J₋J₊ en un punto y la función a"""
    sigma: np.ndarray
    a_field: Jet
    a_scalar: Optional[float]
    scalar_regime: bool
    scalar_residual: float


@dataclass(frozen=True)
class KPair:
    """Estructuras K± anticonmutantes y exponentes conformes f±"""
    k_plus: Jet
    k_minus: Jet
    f_plus: float
    f_minus: float


@dataclass(frozen=True)
class EpsilonPair:
    """Dos-formas complejas ε± con L(T^ℂM, ε±)"""
    plus: TensorField
    minus: TensorField

    def get(self, sign: int) -> TensorField:
        return self.plus if sign > 0 else self.minus


@dataclass(frozen=True)
class GaugeFields:
    """b en el gauge Re ε₋ = 0 y el correspondiente Re ε₊"""
    b_gauge: TensorField
    re_eps_plus: TensorField


# =============================================================================
# ✅ VALIDACIÓN
# =============================================================================

def validation_specs(tol: ToleranceConfig) -> List[CheckSpec]:
    specs = []
    for sign in SIGNS:
        s = _pm(sign)
        specs.append(CheckSpec(f"validate.j_{_suffix(sign)}_square", f"J{s}² = −Id", tol.almost_complex))
        specs.append(CheckSpec(
            f"validate.j_{_suffix(sign)}_hermitian", f"g(J{s}X, J{s}Y) = g(X, Y)", tol.algebraic
        ))
    specs.append(CheckSpec("validate.b_antisymmetric", "b(X, Y) = −b(Y, X)", tol.algebraic))
    specs.append(CheckSpec(
        "validate.sigma_symmetric", "g(ΣX, Y) = g(X, ΣY), Σ = J₊J₋ + J₋J₊", tol.algebraic
    ))
    specs.append(CheckSpec("validate.sigma_spectrum", "spec(Σ) ⊂ [−2, 2]", 1e-9))
    return specs


def sigma_eigenvalues(sigma: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Autovalores de Σ (g-autoadjunto) en un marco g-ortonormal"""
    frame = orthonormal_frame(g)
    local = np.linalg.solve(frame, sigma @ frame)
    return np.linalg.eigvalsh(0.5 * (local + local.T))


def validation_at(q: BihermitianQuadruple, point: Sequence[float]) -> Dict[str, float]:
    """Residuos de validación en un punto"""
    loc = q.local(point)
    g = loc.g.value
    b = loc.b.value
    values: Dict[str, float] = {}
    for sign in SIGNS:
        j = np.real(loc.j(sign).value)
        values[f"validate.j_{_suffix(sign)}_square"] = almost_complex_residual(j)
        values[f"validate.j_{_suffix(sign)}_hermitian"] = max_abs(j.T @ g @ j - g)
    values["validate.b_antisymmetric"] = max_abs(b + b.T)
    sigma = np.real(loc.sigma.value)
    g_sigma = g @ sigma
    values["validate.sigma_symmetric"] = max_abs(g_sigma - g_sigma.T)
    eigenvalues = sigma_eigenvalues(sigma, g)
    values["validate.sigma_spectrum"] = max(0.0, float(np.max(np.abs(eigenvalues))) - 2.0)
    return values


def validate_quadruple(
    q: BihermitianQuadruple,
    points: Optional[Sequence[np.ndarray]] = None,
    tol: Optional[ToleranceConfig] = None,
    mapper: PointMapper = sequential_map,
) -> Dict[str, ResidualResult]:
    """Validar la cuádrupla en los puntos muestreados"""
    tol = tol or ToleranceConfig()
    points = q.patch.sample_points() if points is None else points
    per_point = mapper(lambda p: validation_at(q, p), points)
    return merge_pointwise(validation_specs(tol), points, per_point)


def ensure_valid(results: Dict[str, ResidualResult]) -> None:
    """
    Lanzar QuadrupleValidationError con el peor fallo.

    Raises:
        QuadrupleValidationError: si algún residuo supera su tolerancia
    """
    failures = [r for r in results.values() if not r.passed]
    if not failures:
        return
    worst = max(failures, key=lambda r: r.max_residual / r.tolerance)
    logger.error(f"❌ Validación fallida: {worst.name} = {worst.max_residual:.3e}")
    raise QuadrupleValidationError(worst.name, worst.max_residual, worst.argmax_point)


# =============================================================================
# Σ, a Y K±
# =============================================================================

def sigma_and_a(q: BihermitianQuadruple, point: Sequence[float], tol: float = 1e-10) -> SigmaData:
    """Σ, el campo a = −tr(J₊J₋)/dim y la bandera de régimen escalar"""
    loc = q.local(point)
    sigma = np.real(loc.sigma.value)
    a_value = loc.a_value
    residual = max_abs(sigma + 2 * a_value * np.eye(q.dim))
    scalar = residual < tol
    return SigmaData(sigma, loc.a, a_value if scalar else None, scalar, residual)


def k_pair(q: BihermitianQuadruple, point: Sequence[float]) -> KPair:
    """
    K± = (J₊ ± J₋)/√(2(1±a)), f± = −¼ log 2(1±a).

    Raises:
        ScalarRegimeError: si |a| ≥ 1 en el punto
    """
    loc = q.local(point)
    a = loc.a_value
    if abs(a) >= 1:
        raise ScalarRegimeError(f"K± no definidos con |a| = {abs(a):.6g} ≥ 1", loc.point)
    return KPair(
        loc.k(1),
        loc.k(-1),
        -0.25 * math.log(2 * (1 + a)),
        -0.25 * math.log(2 * (1 - a)),
    )


# =============================================================================
# ε± (diccionario de Kähler generalizado)
# =============================================================================

def _epsilon_jet(loc: LocalQuadruple, sign: int) -> Jet:
    """ε± con Im ε± = 2g(J₊∓J₋)⁻¹, Re ε± = b + g(J₊±J₋)(J₊∓J₋)⁻¹"""
    loc.require_invertible(-sign)
    inverse = loc.combination(-sign).inv()
    g = loc.g
    imaginary = (g @ inverse) * 2.0
    real = loc.b + g @ loc.combination(sign) @ inverse
    return real + imaginary * 1j


def epsilon_from_quadruple(
    q: BihermitianQuadruple, points: Optional[Sequence[np.ndarray]] = None
) -> EpsilonPair:
    """
    Construir los campos ε₊, ε₋.

    Raises:
        SingularCombinationError: si J₊ ∓ J₋ es singular en algún punto dado
    """
    if points is not None:
        for point in points:
            loc = q.local(point)
            loc.require_invertible(-1)
            loc.require_invertible(1)

    def field(sign: int) -> TensorField:
        return TensorField.from_callable(
            FieldKind.TWO_FORM, q.dim, lambda p: _epsilon_jet(q.local(p), sign), f"eps_{_suffix(sign)}"
        )

    return EpsilonPair(field(1), field(-1))


def recover_b(eps_plus: np.ndarray, eps_minus: np.ndarray, a: float) -> np.ndarray:
    """b a partir de (a−1)Re ε₊ − (a+1)Re ε₋ = −2b"""
    return -0.5 * ((a - 1) * np.real(eps_plus) - (a + 1) * np.real(eps_minus))


def epsilon_specs(tol: ToleranceConfig) -> List[CheckSpec]:
    specs = []
    for sign in SIGNS:
        s, t = _pm(sign), _pm(-sign)
        specs.append(CheckSpec(
            f"epsilon.reconstruction_{_suffix(sign)}",
            f"(Im ε{s})(J₊{t}J₋) = 2g, (Re ε{s})(J₊{t}J₋) = b(J₊{t}J₋) + g(J₊{s}J₋)",
            tol.algebraic,
        ))
        specs.append(CheckSpec(
            f"epsilon.scalar_form_{_suffix(sign)}",
            f"(−2{s}2a) Im ε{s} = 2g(J₊{t}J₋), (−2{s}2a) Re ε{s} = (−2{s}2a) b {t} g[J₊, J₋]",
            tol.algebraic,
        ))
    specs.append(CheckSpec(
        "epsilon.b_recovery", "(a−1) Re ε₊ − (a+1) Re ε₋ = −2b", tol.algebraic
    ))
    return specs


def epsilon_at(q: BihermitianQuadruple, point: Sequence[float], tol: ToleranceConfig) -> Dict[str, Optional[float]]:
    loc = q.local(point)
    g = loc.g.value
    b = loc.b.value
    scalar = max_abs(loc.sigma.value + 2 * loc.a_value * np.eye(q.dim)) < tol.algebraic
    a = loc.a_value
    commutator = loc.jp.value @ loc.jm.value - loc.jm.value @ loc.jp.value
    values: Dict[str, Optional[float]] = {}
    eps = {}
    for sign in SIGNS:
        eps[sign] = _epsilon_jet(loc, sign).value
        minus_combo = loc.combination(-sign).value
        plus_combo = loc.combination(sign).value
        im, re = np.imag(eps[sign]), np.real(eps[sign])
        values[f"epsilon.reconstruction_{_suffix(sign)}"] = max(
            max_abs(im @ minus_combo - 2 * g),
            max_abs(re @ minus_combo - b @ minus_combo - g @ plus_combo),
        )
        if scalar:
            factor = -2 + 2 * sign * a
            values[f"epsilon.scalar_form_{_suffix(sign)}"] = max(
                max_abs(factor * im - 2 * g @ minus_combo),
                max_abs(factor * re - factor * b + sign * g @ commutator),
            )
        else:
            values[f"epsilon.scalar_form_{_suffix(sign)}"] = None
    values["epsilon.b_recovery"] = max_abs(recover_b(eps[1], eps[-1], a) - b) if scalar else None
    return values


def epsilon_residuals(
    q: BihermitianQuadruple,
    points: Sequence[np.ndarray],
    tol: Optional[ToleranceConfig] = None,
    mapper: PointMapper = sequential_map,
) -> Dict[str, ResidualResult]:
    """Reconstrucción de ε± y sus consecuencias escalares"""
    tol = tol or ToleranceConfig()
    per_point = mapper(lambda p: epsilon_at(q, p, tol), points)
    return merge_pointwise(epsilon_specs(tol), points, per_point)


# =============================================================================
# 🧭 INTEGRABILIDAD DE KÄHLER GENERALIZADO
# =============================================================================

def gk_specs(tol: ToleranceConfig) -> List[CheckSpec]:
    specs = []
    for sign in SIGNS:
        s, t = _pm(sign), _pm(-sign)
        specs.append(CheckSpec(f"gk.nijenhuis_{_suffix(sign)}", f"N_J{s} = 0", tol.derivative))
        specs.append(CheckSpec(
            f"gk.parallel_j_{_suffix(sign)}",
            f"g((∇_X J{s})Y, Z) = {t}½[db(X, J{s}Y, Z) + db(X, Y, J{s}Z)]",
            tol.derivative,
        ))
    return specs


def parallel_j_residual(loc: LocalQuadruple, sign: int) -> float:
    """Residuo de ∇^± J± = 0 en su forma g((∇_X J)Y, Z) = ∓½[...]"""
    j = loc.j(sign)
    jv = np.real(j.value)
    h = loc.db
    lhs = np.einsum("kl,ilj->ijk", loc.g.value, loc.nabla(j))
    rhs = -sign * 0.5 * (np.einsum("imk,mj->ijk", h, jv) + np.einsum("ijm,mk->ijk", h, jv))
    return max_abs(lhs - rhs)


def gk_at(q: BihermitianQuadruple, point: Sequence[float], tol: ToleranceConfig) -> Dict[str, float]:
    loc = q.local(point)
    values = {}
    for sign in SIGNS:
        values[f"gk.nijenhuis_{_suffix(sign)}"] = max_abs(
            nijenhuis(loc.j(sign), loc.point, tol=max(tol.almost_complex, tol.nijenhuis_floor))
        )
        values[f"gk.parallel_j_{_suffix(sign)}"] = parallel_j_residual(loc, sign)
    return values


def gk_integrability_residual(
    q: BihermitianQuadruple,
    points: Optional[Sequence[np.ndarray]] = None,
    tol: Optional[ToleranceConfig] = None,
    mapper: PointMapper = sequential_map,
) -> Dict[str, ResidualResult]:
    """Nijenhuis de J± y paralelismo de J± respecto de ∇± = ∇ ± ½g⁻¹db"""
    tol = tol or ToleranceConfig()
    points = q.patch.sample_points() if points is None else points
    per_point = mapper(lambda p: gk_at(q, p, tol), points)
    return merge_pointwise(gk_specs(tol), points, per_point)


def is_generalized_kahler(results: Dict[str, ResidualResult]) -> bool:
    return all(r.passed for r in results.values())


# =============================================================================
# 🔬 IDENTIDADES DEL RÉGIMEN ESCALAR
# =============================================================================

def closed_kahler_combination(loc: LocalQuadruple, sign: int, a_value: Optional[float] = None,
                              margin: float = 1e-6) -> Optional[float]:
    """
    max |d[g(J₊ ± J₋)/(1 ± a)]|.

    Con ``a_value`` usa un valor de banda fijo en lugar del campo a.
    Devuelve None donde 1 ± a se anula.
    """
    if a_value is None:
        denominator = loc.a * sign + 1
        if abs(float(denominator.value)) < margin:
            return None
    else:
        denominator = 1 + sign * a_value
        if abs(denominator) < margin:
            return None
    omega = (loc.g @ loc.combination(sign)) / denominator
    return max_abs(exterior_derivative(omega.real))


def identity_specs(tol: ToleranceConfig) -> List[CheckSpec]:
    specs = [
        CheckSpec("identities.sigma_scalar", "J₊J₋ + J₋J₊ = −2a Id", tol.algebraic),
        CheckSpec("identities.k_anticommute", "K₊K₋ + K₋K₊ = 0", tol.algebraic),
        CheckSpec("identities.db_relation", "db = da∧b / (a − 1)", tol.derivative),
        CheckSpec(
            "identities.a_b_subtracted",
            "Σ± [(K±X)(a) g(K±Y,Z) + (K±Y)(a) g(K±X,Z)] − (K₊Z)(a) g(K₊X,Y) + (K₋Z)(a) g(K₋X,Y) "
            "− 2Z(a) g(X,Y) = 2((1−a)/(1+a))^(−½) (da∧b)(K₊X, K₋Y, Z)",
            tol.derivative,
        ),
        CheckSpec(
            "identities.a_b_subtracted_z_kplus_x",
            "contraction of the subtracted a–b relation with Z = K₊X",
            tol.derivative,
        ),
        CheckSpec(
            "identities.grad_a_quaternionic_lines",
            "grad a ⊥ complement of every quaternionic line span{v, K₊v, K₋v, K₊K₋v}",
            tol.derivative,
        ),
    ]
    for sign in SIGNS:
        s, t, name = _pm(sign), _pm(-sign), _suffix(sign)
        specs += [
            CheckSpec(f"identities.k_square_{name}", f"K{s}² = −Id", tol.algebraic),
            CheckSpec(
                f"identities.closed_kahler_combination_{name}",
                f"d[g(J₊ {s} J₋)/(1 {s} a)] = 0",
                tol.derivative,
            ),
            CheckSpec(
                f"identities.parallel_j_da_wedge_b_{name}",
                f"g((∇_X J{s})Y, Z) = {s}[(da∧b)(X, J{s}Y, Z) + (da∧b)(X, Y, J{s}Z)] / 2(1−a)",
                tol.derivative,
            ),
            CheckSpec(
                f"identities.nabla_k_{name}",
                f"g((∇_X K{s})Y, Z) = {t}X(a) g(K{s}Y, Z)/2(1{s}a) "
                f"+ ((1−a)/(1+a))^({s}½) [(da∧b)(X, K{t}Y, Z) + (da∧b)(X, Y, K{t}Z)] / 2(1−a)",
                tol.derivative,
            ),
            CheckSpec(
                f"identities.conformal_cosymplectic_{name}",
                f"g((∇_(K{s}X) K{s})Y, Z) − g((∇_X K{s})Y, K{s}Z) = {s}[(K{s}Y)(a) g(K{s}X, Z) "
                f"− (K{s}Z)(a) g(K{s}X, Y) + Y(a) g(X, Z) − Z(a) g(X, Y)] / 2(1{s}a)",
                tol.derivative,
            ),
            CheckSpec(
                f"identities.a_b_relation_{name}",
                f"(K{s}X)(a) g(K{s}Y,Z) + (K{s}Y)(a) g(K{s}X,Z) − (K{s}Z)(a) g(K{s}X,Y) − X(a) g(Y,Z) "
                f"+ Y(a) g(X,Z) − Z(a) g(X,Y) = {s}((1−a)/(1+a))^(−½) (da∧b)(K{s}X∧K{t}Y∧Z "
                f"+ K{s}X∧Y∧K{t}Z − X∧K{t}Y∧K{s}Z − X∧Y∧K{t}K{s}Z)",
                tol.derivative,
            ),
        ]
    return specs


def _w(w: np.ndarray, a: Optional[np.ndarray] = None, b: Optional[np.ndarray] = None,
       c: Optional[np.ndarray] = None) -> np.ndarray:
    """W(AX, BY, CZ) como array [i, j, k] (None = identidad en ese hueco)"""
    result = w
    if a is not None:
        result = np.einsum("mjk,mi->ijk", result, a)
    if b is not None:
        result = np.einsum("imk,mj->ijk", result, b)
    if c is not None:
        result = np.einsum("ijm,mk->ijk", result, c)
    return result


def identities_at(q: BihermitianQuadruple, point: Sequence[float], tol: ToleranceConfig,
                  margin: float) -> Dict[str, float]:
    """
    Residuos de todas las identidades del régimen escalar en un punto.

    Raises:
        ScalarRegimeError: si Σ no es escalar o |a| ≥ 1 − margin
    """
    loc = q.local(point)
    n = q.dim
    a = loc.a_value
    sigma_residual = max_abs(loc.sigma.value + 2 * a * np.eye(n))
    if sigma_residual > tol.algebraic:
        raise ScalarRegimeError(f"Σ no es escalar (residuo {sigma_residual:.3e})", loc.point)
    if abs(a) >= 1 - margin:
        raise ScalarRegimeError(f"|a| = {abs(a):.6g} fuera de (−1, 1)", loc.point)

    g = loc.g.value
    g_inv = loc.g_inv.value
    da = loc.da
    w = loc.da_wedge_b
    mu = math.sqrt((1 - a) / (1 + a))
    k_jets = {sign: loc.k(sign) for sign in SIGNS}
    kv = {sign: np.real(k_jets[sign].value) for sign in SIGNS}
    k_da = {sign: kv[sign].T @ da for sign in SIGNS}          # (KX)(a) = da(K∂_i)
    g_k = {sign: kv[sign].T @ g for sign in SIGNS}            # g(KX, Y)

    values: Dict[str, float] = {"identities.sigma_scalar": sigma_residual}
    values["identities.k_anticommute"] = max_abs(kv[1] @ kv[-1] + kv[-1] @ kv[1])
    values["identities.db_relation"] = max_abs(loc.db - w / (a - 1))

    for sign in SIGNS:
        name = _suffix(sign)
        ks, kt = kv[sign], kv[-sign]
        values[f"identities.k_square_{name}"] = almost_complex_residual(ks)
        values[f"identities.closed_kahler_combination_{name}"] = closed_kahler_combination(loc, sign)

        # ∇J± en términos de da∧b
        j = loc.j(sign)
        jv = np.real(j.value)
        lhs = np.einsum("kl,ilj->ijk", g, loc.nabla(j))
        rhs = sign / (2 * (1 - a)) * (_w(w, b=jv) + _w(w, c=jv))
        values[f"identities.parallel_j_da_wedge_b_{name}"] = max_abs(lhs - rhs)

        # ∇K±
        nabla_k = loc.nabla(k_jets[sign])
        lhs = np.einsum("kl,ilj->ijk", g, nabla_k)
        coefficient = mu ** sign / (2 * (1 - a))
        rhs = (
            -sign / (2 * (1 + sign * a)) * np.einsum("i,jk->ijk", da, g_k[sign])
            + coefficient * (_w(w, b=kt) + _w(w, c=kt))
        )
        values[f"identities.nabla_k_{name}"] = max_abs(lhs - rhs)

        # (1,2)-simplecticidad conforme de (e^{2f±} g, K±)
        lhs = (
            np.einsum("mi,kl,mlj->ijk", ks, g, nabla_k)
            - np.einsum("ln,ilj,nk->ijk", g, nabla_k, ks)
        )
        rhs = sign / (2 * (1 + sign * a)) * (
            np.einsum("j,ik->ijk", k_da[sign], g_k[sign])
            - np.einsum("k,ij->ijk", k_da[sign], g_k[sign])
            + np.einsum("j,ik->ijk", da, g)
            - np.einsum("k,ij->ijk", da, g)
        )
        values[f"identities.conformal_cosymplectic_{name}"] = max_abs(lhs - rhs)

        # relación entre a y b
        lhs = (
            np.einsum("i,jk->ijk", k_da[sign], g_k[sign])
            + np.einsum("j,ik->ijk", k_da[sign], g_k[sign])
            - np.einsum("k,ij->ijk", k_da[sign], g_k[sign])
            - np.einsum("i,jk->ijk", da, g)
            + np.einsum("j,ik->ijk", da, g)
            - np.einsum("k,ij->ijk", da, g)
        )
        rhs = sign / mu * (
            _w(w, a=ks, b=kt) + _w(w, a=ks, c=kt) - _w(w, b=kt, c=ks) - _w(w, c=kt @ ks)
        )
        values[f"identities.a_b_relation_{name}"] = max_abs(lhs - rhs)

    # relación restada
    lhs = (
        np.einsum("i,jk->ijk", k_da[1], g_k[1])
        + np.einsum("j,ik->ijk", k_da[1], g_k[1])
        - np.einsum("k,ij->ijk", k_da[1], g_k[1])
        + np.einsum("i,jk->ijk", k_da[-1], g_k[-1])
        + np.einsum("j,ik->ijk", k_da[-1], g_k[-1])
        + np.einsum("k,ij->ijk", k_da[-1], g_k[-1])
        - 2 * np.einsum("k,ij->ijk", da, g)
    )
    residual = lhs - 2 / mu * _w(w, a=kv[1], b=kv[-1])
    values["identities.a_b_subtracted"] = max_abs(residual)
    values["identities.a_b_subtracted_z_kplus_x"] = max_abs(np.einsum("ijk,ki->ij", residual, kv[1]))
    values["identities.grad_a_quaternionic_lines"] = _grad_a_off_lines(g, g_inv, da, kv[1], kv[-1])
    return values


def _grad_a_off_lines(g: np.ndarray, g_inv: np.ndarray, da: np.ndarray,
                      k_plus: np.ndarray, k_minus: np.ndarray) -> float:
    """Máxima g-norma de grad a proyectado al complemento de cada línea cuaterniónica"""
    n = g.shape[0]
    grad = g_inv @ da
    worst = 0.0
    for i in range(n):
        v = np.eye(n)[:, i]
        span = np.column_stack([v, k_plus @ v, k_minus @ v, k_plus @ k_minus @ v])
        gram = span.T @ g @ span
        projector = span @ np.linalg.solve(gram, span.T @ g)
        rest = grad - projector @ grad
        worst = max(worst, math.sqrt(max(float(rest @ g @ rest), 0.0)))
    return worst


def identity_suite_scalar_regime(
    q: BihermitianQuadruple,
    points: Optional[Sequence[np.ndarray]] = None,
    tol: Optional[ToleranceConfig] = None,
    mapper: PointMapper = sequential_map,
    use_normalized_gauge: bool = False,
) -> Dict[str, ResidualResult]:
    """
    Una comprobación por identidad de la cadena del régimen escalar.

    Con ``use_normalized_gauge`` las identidades se evalúan sobre el b del
    gauge Re ε₋ = 0 en lugar del b dado.

    Raises:
        ScalarRegimeError: si |a| ≥ 1 − margen o Σ no es escalar en algún punto
    """
    tol = tol or ToleranceConfig()
    points = q.patch.sample_points() if points is None else points
    target = q.with_b(normalized_gauge(q).b_gauge) if use_normalized_gauge else q
    per_point = mapper(lambda p: identities_at(target, p, tol, tol.a_margin), points)
    return merge_pointwise(identity_specs(tol), points, per_point)


def band_kahler_specs(band_values: Sequence[float], tol: ToleranceConfig) -> List[CheckSpec]:
    specs = []
    for index, value in enumerate(band_values):
        for sign in SIGNS:
            s = _pm(sign)
            specs.append(CheckSpec(
                f"identities.closed_kahler_combination_band{index}_{_suffix(sign)}",
                f"d[g(J₊ {s} J₋)/(1 {s} a)] = 0 at the band value a = {value:.6g}",
                tol.derivative,
            ))
    return specs


def band_kahler_combinations(
    q: BihermitianQuadruple,
    points: Sequence[np.ndarray],
    band_values: Sequence[float],
    tol: Optional[ToleranceConfig] = None,
    mapper: PointMapper = sequential_map,
) -> Dict[str, ResidualResult]:
    """Formas g(J₊ ± J₋)/(1 ± a_j) cerradas para cada valor de banda a_j fijo"""
    tol = tol or ToleranceConfig()

    def at(point):
        loc = q.local(point)
        values = {}
        for index, value in enumerate(band_values):
            for sign in SIGNS:
                values[f"identities.closed_kahler_combination_band{index}_{_suffix(sign)}"] = (
                    closed_kahler_combination(loc, sign, a_value=value, margin=tol.a_margin)
                )
        return values

    per_point = mapper(at, points)
    return merge_pointwise(band_kahler_specs(band_values, tol), points, per_point)


# =============================================================================
# 🎚️ GAUGE NORMALIZADO (Re ε₋ = 0)
# =============================================================================

def _gauge_b_jet(loc: LocalQuadruple) -> Jet:
    loc.require_invertible(1)
    return -(loc.g @ loc.combination(-1) @ loc.combination(1).inv())


def _re_eps_plus_jet(loc: LocalQuadruple) -> Jet:
    loc.require_invertible(1)
    loc.require_invertible(-1)
    plus, minus = loc.combination(1), loc.combination(-1)
    return loc.g @ (plus @ minus.inv() - minus @ plus.inv())


def normalized_gauge(q: BihermitianQuadruple) -> GaugeFields:
    """
    b = −g(J₊−J₋)(J₊+J₋)⁻¹ y Re ε₊ = g[(J₊+J₋)(J₊−J₋)⁻¹ − (J₊−J₋)(J₊+J₋)⁻¹].

    Raises:
        SingularCombinationError: al evaluar donde J₊ ± J₋ es singular
    """
    b_gauge = TensorField.from_callable(
        FieldKind.TWO_FORM, q.dim, lambda p: _gauge_b_jet(q.local(p)).real, "b_gauge"
    )
    re_eps_plus = TensorField.from_callable(
        FieldKind.TWO_FORM, q.dim, lambda p: _re_eps_plus_jet(q.local(p)).real, "re_eps_plus"
    )
    return GaugeFields(b_gauge, re_eps_plus)


def gauge_specs(tol: ToleranceConfig) -> List[CheckSpec]:
    return [
        CheckSpec("gauge.re_eps_plus_closed",
                  "d Re ε₊ = 0, Re ε₊ = g[(J₊+J₋)(J₊−J₋)⁻¹ − (J₊−J₋)(J₊+J₋)⁻¹]", tol.derivative),
        CheckSpec("gauge.re_eps_minus_vanishes",
                  "Re ε₋ = 0 for b = −g(J₊−J₋)(J₊+J₋)⁻¹", tol.algebraic),
        CheckSpec("gauge.re_eps_plus_consistent",
                  "Re ε₊ = b + g(J₊+J₋)(J₊−J₋)⁻¹ in the normalized gauge", tol.algebraic),
    ]


def gauge_at(q: BihermitianQuadruple, gauge: GaugeFields, point: Sequence[float]) -> Dict[str, float]:
    loc = q.local(point)
    re_eps_plus = gauge.re_eps_plus.at(loc.point)
    gauged = q.with_b(gauge.b_gauge).local(loc.point)
    eps_minus = _epsilon_jet(gauged, -1).value
    eps_plus = _epsilon_jet(gauged, 1).value
    return {
        "gauge.re_eps_plus_closed": max_abs(exterior_derivative(re_eps_plus)),
        "gauge.re_eps_minus_vanishes": max_abs(np.real(eps_minus)),
        "gauge.re_eps_plus_consistent": max_abs(np.real(eps_plus) - re_eps_plus.value),
    }


def normalized_gauge_residuals(
    q: BihermitianQuadruple,
    points: Optional[Sequence[np.ndarray]] = None,
    tol: Optional[ToleranceConfig] = None,
    mapper: PointMapper = sequential_map,
) -> Dict[str, ResidualResult]:
    """Cerradura de Re ε₊ y consistencia del gauge"""
    tol = tol or ToleranceConfig()
    points = q.patch.sample_points() if points is None else points
    gauge = normalized_gauge(q)
    per_point = mapper(lambda p: gauge_at(q, gauge, p), points)
    return merge_pointwise(gauge_specs(tol), points, per_point)


# =============================================================================
# 4️⃣ DIMENSIÓN CUATRO
# =============================================================================

@dataclass(frozen=True)
class FourDimData:
    """Datos puntuales en dim 4: g, J±, da, b, db y la orientación declarada"""
    g: np.ndarray
    j_plus: np.ndarray
    j_minus: np.ndarray
    da: np.ndarray
    b: np.ndarray
    db: np.ndarray
    orientation: int = 1

    @property
    def a(self) -> float:
        return float(-np.trace(self.j_plus @ self.j_minus) / 4)


@dataclass(frozen=True)
class FourDimFrame:
    """
    Objetos del caso cuatridimensional en un punto: K = K₋K₊,
    k = ((1−a)/(1+a))^½ g, u = log(1−a), y cuando du ≠ 0 el marco
    (e₁, Ke₁, e₃, Ke₃) con e₁ = grad u/|grad u| y las componentes c, α de b.
    """
    K: np.ndarray
    k_metric: np.ndarray
    conformal: float
    u: float
    du: np.ndarray
    frame: Optional[np.ndarray] = None
    c: Optional[float] = None
    alpha: Optional[np.ndarray] = None
    v_e: Optional[np.ndarray] = None
    v_f: Optional[np.ndarray] = None


def k_structure(j_plus: np.ndarray, j_minus: np.ndarray, sign: int, a: float) -> np.ndarray:
    return (j_plus + sign * j_minus) / math.sqrt(2 * (1 + sign * a))


def four_dim_objects(data: FourDimData, du_tol: float = 1e-8) -> FourDimFrame:
    """
    K, k, u y (si du ≠ 0) la descomposición de b.

    Normalización: K = K₋K₊ y k = ((1−a)/(1+a))^{1/2} g, la única para la que las
    relaciones simplificadas equivalen punto a punto a las dos relaciones de db y
    de Hodge (en 1-formas ⋆_{λg} = λ⋆_g).

    Raises:
        ScalarRegimeError: si |a| ≥ 1 (J± no linealmente independientes)
    """
    a = data.a
    if abs(a) >= 1:
        raise ScalarRegimeError(f"J± no son linealmente independientes (|a| = {abs(a):.6g})")
    g = data.g
    k_plus = k_structure(data.j_plus, data.j_minus, 1, a)
    k_minus = k_structure(data.j_plus, data.j_minus, -1, a)
    big_k = k_minus @ k_plus
    conformal = math.sqrt((1 - a) / (1 + a))
    du = -data.da / (1 - a)
    result = FourDimFrame(big_k, conformal * g, conformal, math.log(1 - a), du)
    frame = decomposition_frame(g, big_k, du, du_tol)
    if frame is None:
        return result
    components = frame.T @ data.b @ frame
    du_norm = math.sqrt(float(du @ np.linalg.solve(g, du)))
    flat = g @ frame
    v_e = conformal * wedge(flat[:, 0], flat[:, 1])
    v_f = conformal * wedge(flat[:, 2], flat[:, 3])
    return replace(
        result,
        frame=frame,
        c=float(components[0, 1] / conformal),
        alpha=np.array([components[0, 2], components[0, 3]]) / du_norm,
        v_e=v_e,
        v_f=v_f,
    )


def decomposition_frame(g: np.ndarray, big_k: np.ndarray, du: np.ndarray,
                        du_tol: float = 1e-8) -> Optional[np.ndarray]:
    """Marco g-ortonormal (e₁, Ke₁, e₃, Ke₃) con e₁ ∝ grad u; None si du ≈ 0"""
    grad_u = np.linalg.solve(g, du)
    norm = math.sqrt(max(float(du @ grad_u), 0.0))
    if norm < du_tol:
        return None
    e1 = grad_u / norm
    e2 = big_k @ e1
    best, best_norm = None, 0.0
    for i in range(4):
        v = np.eye(4)[:, i]
        v = v - (e1 @ g @ v) * e1 - (e2 @ g @ v) * e2
        length = math.sqrt(max(float(v @ g @ v), 0.0))
        if length > best_norm:
            best, best_norm = v, length
    e3 = best / best_norm
    e4 = big_k @ e3
    return np.column_stack([e1, e2, e3, e4])


def compose_decomposed_b(g: np.ndarray, frame: np.ndarray, conformal: float, du_norm: float,
                         c: float, alpha: Sequence[float]) -> np.ndarray:
    """b = c v_E + v_F + du∧α a partir de sus componentes en el marco"""
    components = np.zeros((4, 4))
    components[0, 1] = c * conformal
    components[2, 3] = conformal
    components[0, 2] = du_norm * alpha[0]
    components[0, 3] = du_norm * alpha[1]
    components = components - components.T
    coframe = g @ frame  # E⁻¹ = Eᵀ g
    return coframe @ components @ coframe.T


def four_dim_specs(tol: ToleranceConfig, equivalence_tol: float = 1e-8) -> List[CheckSpec]:
    return [
        CheckSpec("fourdim.db_relation", "db = −da∧b / (1 − a)", tol.derivative),
        CheckSpec("fourdim.hodge_relation", "*(da∧b) = [J₊, J₋](da) / 2(1 + a)", tol.algebraic),
        CheckSpec("fourdim.simplified_db", "db = du∧b, u = log(1 − a)", tol.derivative),
        CheckSpec("fourdim.simplified_hodge",
                  "du∧b = −*_k K du, K = K₋K₊, k = ((1−a)/(1+a))^½ g", tol.algebraic),
        CheckSpec("fourdim.b_decomposition",
                  "b = c v_E + v_F + du∧α with E = span{grad u, K grad u}, F = E^⊥", tol.algebraic),
        CheckSpec("fourdim.hodge_conformal", "*_k θ = ((1−a)/(1+a))^½ *θ on one-forms", tol.algebraic),
        CheckSpec("fourdim.equivalence",
                  f"both relation pairs hold or fail together (threshold {equivalence_tol:g})", 0.5),
    ]


def four_dim_pointwise(data: FourDimData, equivalence_tol: float = 1e-8,
                       du_tol: float = 1e-8) -> Dict[str, Optional[float]]:
    """Residuos cuatridimensionales de un conjunto de datos puntual"""
    objects = four_dim_objects(data, du_tol)
    g = data.g
    g_inv = np.linalg.inv(g)
    a = data.a
    w = wedge(data.da, data.b)
    commutator = data.j_plus @ data.j_minus - data.j_minus @ data.j_plus
    star_w = hodge_star(w, g, data.orientation)
    du_wedge_b = wedge(objects.du, data.b)
    k_du = act_on_form(objects.K, objects.du, g, g_inv)
    star_k_du = hodge_star(k_du, objects.k_metric, data.orientation)

    values: Dict[str, Optional[float]] = {
        "fourdim.db_relation": max_abs(data.db + w / (1 - a)),
        "fourdim.hodge_relation": max_abs(star_w - act_on_form(commutator, data.da, g, g_inv) / (2 * (1 + a))),
        "fourdim.simplified_db": max_abs(data.db - du_wedge_b),
        "fourdim.simplified_hodge": max_abs(du_wedge_b + star_k_du),
        "fourdim.hodge_conformal": max_abs(star_k_du - objects.conformal * hodge_star(k_du, g, data.orientation)),
    }
    if objects.frame is None:
        values["fourdim.b_decomposition"] = None
    else:
        components = objects.frame.T @ data.b @ objects.frame
        values["fourdim.b_decomposition"] = max(
            abs(components[2, 3] - objects.conformal),
            abs(components[1, 2]),
            abs(components[1, 3]),
        )
    original = values["fourdim.db_relation"] < equivalence_tol and values["fourdim.hodge_relation"] < equivalence_tol
    simplified = values["fourdim.simplified_db"] < equivalence_tol and values["fourdim.simplified_hodge"] < equivalence_tol
    values["fourdim.equivalence"] = 0.0 if original == simplified else 1.0
    return values


def check_orientations(loc: LocalQuadruple, declared: int) -> None:
    """
    J₊ y J₋ deben inducir la orientación declarada.

    Raises:
        OrientationMismatchError: si las orientaciones difieren
    """
    g = loc.g.value
    signs = {
        sign: pfaffian_sign(np.real(loc.j(sign).value).T @ g) for sign in SIGNS
    }
    if signs[1] != signs[-1]:
        raise OrientationMismatchError("J₊ y J₋ inducen orientaciones distintas", loc.point)
    if signs[1] != declared:
        raise OrientationMismatchError("J± no inducen la orientación declarada", loc.point)


def four_dim_suite(
    q: BihermitianQuadruple,
    points: Optional[Sequence[np.ndarray]] = None,
    tol: Optional[ToleranceConfig] = None,
    mapper: PointMapper = sequential_map,
) -> Dict[str, ResidualResult]:
    """
    Relaciones cuatridimensionales evaluadas en el gauge normalizado.

    Raises:
        OrientationMismatchError: si J± no inducen la misma orientación
        ScalarRegimeError: si J± no son linealmente independientes
    """
    if q.dim != 4:
        raise ValueError("four_dim_suite requiere dim = 4")
    tol = tol or ToleranceConfig()
    points = q.patch.sample_points() if points is None else points
    gauge = normalized_gauge(q)
    gauged = q.with_b(gauge.b_gauge)

    def at(point):
        loc = gauged.local(point)
        check_orientations(loc, q.orientation)
        data = FourDimData(
            g=loc.g.value,
            j_plus=np.real(loc.jp.value),
            j_minus=np.real(loc.jm.value),
            da=loc.da,
            b=loc.b.value,
            db=loc.db,
            orientation=q.orientation,
        )
        return four_dim_pointwise(data)

    per_point = mapper(at, points)
    results = merge_pointwise(four_dim_specs(tol), points, per_point)
    for result in results.values():
        result.notes.append("evaluated in the normalized gauge Re ε₋ = 0")
    return results


def four_dim_sampled(
    samples: Sequence[FourDimData],
    tol: Optional[ToleranceConfig] = None,
    mapper: PointMapper = sequential_map,
    mode: str = "decomposed",
    violation_threshold: float = 1e-3,
) -> Dict[str, ResidualResult]:
    """
    Relaciones cuatridimensionales sobre datos puntuales sintéticos.

    El punto de máximo es el índice de la muestra. En modo ``generic`` las
    relaciones de Hodge no se exigen: se informa la fracción de muestras que
    las violan por encima de ``violation_threshold``.
    """
    tol = tol or ToleranceConfig()
    indices = [np.array([float(i)]) for i in range(len(samples))]
    per_point = mapper(lambda index: four_dim_pointwise(samples[int(index[0])]), indices)
    specs = four_dim_specs(tol)
    if mode == "decomposed":
        return merge_pointwise(specs, indices, per_point)
    hodge = {"fourdim.hodge_relation", "fourdim.simplified_hodge", "fourdim.b_decomposition"}
    results = merge_pointwise([s for s in specs if s.name not in hodge], indices, per_point)
    violated = sum(1 for values in per_point if values["fourdim.simplified_hodge"] > violation_threshold)
    results["fourdim.generic_violation_fraction"] = single_result(
        CheckSpec(
            "fourdim.generic_violation_fraction",
            f"fraction of generic b with |du∧b + *_k K du| > {violation_threshold:g}",
            0.99,
            lower_bound=True,
        ),
        violated / max(len(samples), 1),
    )
    return results
