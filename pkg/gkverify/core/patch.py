"""
📐 Cálculo tensorial en un parche de coordenadas

Este módulo contiene el parche (caja de coordenadas más plan de muestreo),
los campos tensoriales definidos por expresiones y las operaciones puntuales
con primeras derivadas: métrica y su inversa, derivada exterior, corchete de
Lie, símbolos de Christoffel, derivada covariante de endomorfismos, tensor de
Nijenhuis, estrella de Hodge, producto exterior y contracción.

Convenciones de índices:

- endomorfismo ``J[k, j] = J^k_j``; dos-forma ``β[i, j] = β(∂_i, ∂_j)``
- ``(βA)(X, Y) = β(X, AY)`` es el producto matricial ``β @ A``
- formas como arrays antisimétricos completos; ``(dα)_ij = ∂_iα_j − ∂_jα_i``
- ``ι_X`` contrae el primer índice
"""

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, TypeVar, Union

import numpy as np
from loguru import logger

from .errors import (
    AlmostComplexError,
    DegenerateMetricError,
    UnsupportedDegreeError,
)
from .expr import Expr
from .jet import Jet, jet_einsum
from .models import SamplePlan

FieldOrJet = Union["TensorField", Jet]


# =============================================================================
# 🗺️ PARCHE Y MUESTREO
# =============================================================================

@dataclass(frozen=True)
class Patch:
    """Carta de coordenadas con dominio caja y plan de muestreo"""

    dim: int
    coords: Tuple[str, ...]
    domain: Tuple[Tuple[float, float], ...]
    sample_plan: SamplePlan = field(default_factory=SamplePlan)

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("El parche necesita dim ≥ 2")
        if len(self.coords) != self.dim or len(self.domain) != self.dim:
            raise ValueError("coords y domain deben tener longitud dim")
        for lo, hi in self.domain:
            if not lo < hi:
                raise ValueError(f"Dominio vacío: [{lo}, {hi}]")

    @classmethod
    def box(cls, domain: Sequence[Tuple[float, float]], coords: Optional[Sequence[str]] = None,
            plan: Optional[SamplePlan] = None) -> "Patch":
        dim = len(domain)
        coords = tuple(coords) if coords else tuple(f"x{i + 1}" for i in range(dim))
        return cls(dim, coords, tuple((float(lo), float(hi)) for lo, hi in domain), plan or SamplePlan())

    @property
    def center(self) -> np.ndarray:
        return np.array([(lo + hi) / 2 for lo, hi in self.domain])

    def contains(self, point: Sequence[float]) -> bool:
        return all(lo <= x <= hi for x, (lo, hi) in zip(point, self.domain))

    def axis_nodes(self, count: int, offset: float) -> List[np.ndarray]:
        """Nodos interiores por eje, separados del borde una fracción offset"""
        nodes = []
        for lo, hi in self.domain:
            width = hi - lo
            a, b = lo + offset * width, hi - offset * width
            nodes.append(np.array([(a + b) / 2]) if count == 1 else np.linspace(a, b, count))
        return nodes

    def grid_points(self, count: int, offset: float, max_points: int) -> np.ndarray:
        """
        Malla interior: producto tensorial completo si cabe en max_points,
        si no, la "estrella de ejes" (centro más nodos a lo largo de cada eje).
        """
        nodes = self.axis_nodes(count, offset)
        if count ** self.dim <= max_points:
            return np.array(list(itertools.product(*nodes)), dtype=float)
        center = self.center
        points = [center]
        for axis, axis_nodes in enumerate(nodes):
            for x in axis_nodes:
                p = center.copy()
                p[axis] = x
                if not np.allclose(p, center):
                    points.append(p)
        return np.array(points)

    def random_points(self, count: int, seed: int, offset: float) -> np.ndarray:
        rng = np.random.default_rng(seed)
        lo = np.array([a + offset * (b - a) for a, b in self.domain])
        hi = np.array([b - offset * (b - a) for a, b in self.domain])
        return lo + (hi - lo) * rng.random((count, self.dim))

    def sample_points(self, plan: Optional[SamplePlan] = None) -> np.ndarray:
        """Puntos del plan: malla interior más aleatorios con semilla"""
        plan = plan or self.sample_plan
        grid = self.grid_points(plan.grid, plan.interior_offset, plan.max_grid_points)
        points = grid
        if plan.random:
            extra = self.random_points(plan.random, plan.seed, plan.interior_offset)
            points = np.vstack([grid, extra])
        logger.debug(f"🎯 {len(points)} puntos de muestreo ({len(grid)} de malla, semilla {plan.seed})")
        return points

    def pregrid(self, count: int, max_points: int) -> np.ndarray:
        """Pre-malla gruesa para los invariantes de carga"""
        return self.grid_points(count, 0.0, max_points)


# =============================================================================
# 🧩 CAMPOS TENSORIALES
# =============================================================================

class FieldKind(str, Enum):
    """Tipos de campo tensorial"""
    SCALAR = "scalar"
    VECTOR = "vector"
    ONE_FORM = "one_form"
    TWO_FORM = "two_form"
    METRIC = "metric"
    ENDO = "endo"


_RANK = {
    FieldKind.SCALAR: 0,
    FieldKind.VECTOR: 1,
    FieldKind.ONE_FORM: 1,
    FieldKind.TWO_FORM: 2,
    FieldKind.METRIC: 2,
    FieldKind.ENDO: 2,
}


@dataclass(frozen=True)
class TensorField:
    """Campo tensorial: evaluador puntual que devuelve un Jet"""

    kind: FieldKind
    dim: int
    evaluator: Callable[[np.ndarray], Jet] = field(compare=False)
    name: str = ""

    def at(self, point: Sequence[float]) -> Jet:
        jet = self.evaluator(np.asarray(point, dtype=float))
        expected = (self.dim,) * _RANK[self.kind]
        if jet.shape != expected:
            raise ValueError(f"Campo '{self.name}' devolvió forma {jet.shape}, se esperaba {expected}")
        return jet

    @classmethod
    def from_expressions(cls, kind: FieldKind, entries, dim: int, imag=None, name: str = "") -> "TensorField":
        """
        Construir un campo desde arrays anidados de Expr.

        Las entradas constantes se evalúan una sola vez. ``imag`` (opcional)
        aporta la parte imaginaria de un campo complejo.
        """
        real = _CompiledArray(entries, dim)
        imaginary = _CompiledArray(imag, dim) if imag is not None else None

        def evaluate(point: np.ndarray) -> Jet:
            jet = real.evaluate(point)
            if imaginary is None:
                return jet
            im = imaginary.evaluate(point)
            return Jet(jet.value + 1j * im.value, jet.grad + 1j * im.grad)

        return cls(kind, dim, evaluate, name)

    @classmethod
    def constant(cls, kind: FieldKind, value, name: str = "") -> "TensorField":
        value = np.asarray(value)
        if value.ndim == 0:
            raise ValueError("Use from_callable para campos escalares")
        dim = value.shape[0]
        return cls(kind, dim, lambda point: Jet.constant(value, dim), name)

    @classmethod
    def from_callable(cls, kind: FieldKind, dim: int, fn: Callable[[np.ndarray], Jet], name: str = "") -> "TensorField":
        return cls(kind, dim, fn, name)


class _CompiledArray:
    """Array de Expr con las entradas constantes precalculadas"""

    def __init__(self, entries, dim: int):
        self.dim = dim
        array = np.empty(_nested_shape(entries), dtype=object)
        for index in np.ndindex(array.shape):
            array[index] = _entry(entries, index)
        self.shape = array.shape
        self.base = np.zeros(self.shape)
        self.variable: List[Tuple[Tuple[int, ...], Expr]] = []
        for index in np.ndindex(self.shape):
            expr: Expr = array[index]
            if expr.is_constant():
                self.base[index] = expr.value(())
            else:
                self.variable.append((index, expr))

    def evaluate(self, point: np.ndarray) -> Jet:
        value = self.base.copy()
        grad = np.zeros(self.shape + (self.dim,))
        for index, expr in self.variable:
            jet = expr.jet(point)
            value[index] = jet.value
            grad[index] = jet.grad
        return Jet(value, grad)


def _nested_shape(entries) -> Tuple[int, ...]:
    shape = []
    item = entries
    while isinstance(item, (list, tuple)):
        shape.append(len(item))
        item = item[0] if item else None
    return tuple(shape)


def _entry(entries, index):
    item = entries
    for i in index:
        item = item[i]
    return item


_T = TypeVar("_T")


class PointFrame:
    """Jets de los campos en un punto y cantidades derivadas, con caché"""

    def __init__(self, point: Sequence[float], fields: Optional[Dict[str, TensorField]] = None):
        self.point = np.asarray(point, dtype=float)
        self.fields: Dict[str, TensorField] = dict(fields or {})
        self._cache: Dict[str, Any] = {}

    def jet(self, name: str) -> Jet:
        if name not in self._cache:
            self._cache[name] = self.fields[name].at(self.point)
        return self._cache[name]

    def cache(self, name: str, compute: Callable[[], _T]) -> _T:
        """Memorizar una cantidad derivada (métrica inversa, Christoffel, Σ...)"""
        if name not in self._cache:
            self._cache[name] = compute()
        return self._cache[name]

    def __contains__(self, name: str) -> bool:
        return name in self.fields or name in self._cache


def _maybe_point(point):
    return None if point is None or len(point) == 0 else point


def as_point_jet(obj: FieldOrJet, point: Sequence[float]) -> Jet:
    """Evaluar un campo en el punto o devolver el Jet tal cual"""
    return obj if isinstance(obj, Jet) else obj.at(point)


# =============================================================================
# 📏 MÉTRICA
# =============================================================================

def metric_sharp_flat(g: FieldOrJet, point: Sequence[float] = ()) -> Tuple[Jet, Jet]:
    """
    Obtener (g, g⁻¹) como Jets.

    Raises:
        DegenerateMetricError: si g no es simétrica definida positiva en el punto
    """
    g_jet = as_point_jet(g, point)
    check_metric(g_jet.value, point)
    return g_jet, g_jet.inv()


def check_metric(g: np.ndarray, point: Sequence[float] = (), tol: float = 1e-10) -> None:
    scale = max(1.0, max_abs_value(g))
    if np.max(np.abs(g - g.T)) > tol * scale:
        raise DegenerateMetricError("La métrica no es simétrica", _maybe_point(point))
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        raise DegenerateMetricError("La métrica no es definida positiva", _maybe_point(point)) from None


def max_abs_value(array) -> float:
    array = np.asarray(array)
    return float(np.max(np.abs(array))) if array.size else 0.0


def flat(g: np.ndarray, vector: np.ndarray) -> np.ndarray:
    return g @ vector


def sharp(g_inv: np.ndarray, form: np.ndarray) -> np.ndarray:
    return g_inv @ form


def act_on_form(endo: np.ndarray, form: np.ndarray, g: np.ndarray, g_inv: np.ndarray) -> np.ndarray:
    """Acción de un endomorfismo sobre una 1-forma vía la métrica: (A θ♯)♭"""
    return g @ (endo @ (g_inv @ form))


# =============================================================================
# 🔁 DERIVADAS
# =============================================================================

def exterior_derivative(w: FieldOrJet, point: Sequence[float] = ()) -> np.ndarray:
    """
    Derivada exterior de una k-forma (k ∈ {0, 1, 2}) con sus jets.

    Returns:
        Array antisimétrico completo de grado k+1
    """
    jet = as_point_jet(w, point)
    grad = jet.grad
    degree = jet.ndim
    if degree == 0:
        return np.array(grad)
    if degree == 1:
        # grad[j, i] = ∂_i w_j
        return grad.T - grad
    if degree == 2:
        return (
            np.einsum("jki->ijk", grad)
            + np.einsum("kij->ijk", grad)
            + np.einsum("ijk->ijk", grad)
        )
    raise UnsupportedDegreeError(f"Derivada exterior de grado {degree} no soportada")


def lie_bracket(x: FieldOrJet, y: FieldOrJet, point: Sequence[float] = ()) -> np.ndarray:
    """[X, Y]^i = X^j ∂_j Y^i − Y^j ∂_j X^i"""
    xj = as_point_jet(x, point)
    yj = as_point_jet(y, point)
    return np.einsum("j,ij->i", xj.value, yj.grad) - np.einsum("j,ij->i", yj.value, xj.grad)


def christoffels(g: FieldOrJet, point: Sequence[float] = ()) -> np.ndarray:
    """Γ[k, i, j] = Γ^k_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij)"""
    g_jet, g_inv = metric_sharp_flat(g, point)
    dg = g_jet.grad  # dg[a, b, c] = ∂_c g_ab
    lowered = (
        np.einsum("jli->ijl", dg)
        + np.einsum("ilj->ijl", dg)
        - np.einsum("ijl->ijl", dg)
    )
    return 0.5 * np.einsum("kl,ijl->kij", g_inv.value, lowered)


def covariant_deriv_endo(j: FieldOrJet, g: FieldOrJet, point: Sequence[float] = (),
                         gamma: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Derivada covariante de Levi-Civita de un endomorfismo.

    Returns:
        ``nabla[i, k, j] = (∇_i J)^k_j = ∂_i J^k_j + Γ^k_il J^l_j − Γ^l_ij J^k_l``
    """
    j_jet = as_point_jet(j, point)
    if gamma is None:
        gamma = christoffels(g, point)
    jv = j_jet.value
    return (
        np.einsum("kji->ikj", j_jet.grad)
        + np.einsum("kil,lj->ikj", gamma, jv)
        - np.einsum("lij,kl->ikj", gamma, jv)
    )


def covariant_deriv_metric(g: FieldOrJet, point: Sequence[float] = ()) -> np.ndarray:
    """(∇_i g)_jk = ∂_i g_jk − Γ^l_ij g_lk − Γ^l_ik g_jl (se anula para Levi-Civita)"""
    g_jet = as_point_jet(g, point)
    gamma = christoffels(g_jet, point)
    gv = g_jet.value
    return (
        np.einsum("jki->ijk", g_jet.grad)
        - np.einsum("lij,lk->ijk", gamma, gv)
        - np.einsum("lik,jl->ijk", gamma, gv)
    )


def almost_complex_residual(j: np.ndarray) -> float:
    """∥J² + Id∥ (máximo de componentes)"""
    return max_abs_value(j @ j + np.eye(j.shape[0]))


def nijenhuis(j: FieldOrJet, point: Sequence[float] = (), tol: float = 1e-10) -> np.ndarray:
    """
    Tensor de Nijenhuis sobre campos coordenados.

    Returns:
        ``N[l, i, j] = N(∂_i, ∂_j)^l`` con
        ``N(X,Y) = [JX,JY] − J[JX,Y] − J[X,JY] − [X,Y]``

    Raises:
        AlmostComplexError: si J² ≠ −Id en el punto
    """
    j_jet = as_point_jet(j, point)
    jv = j_jet.value
    residual = almost_complex_residual(jv)
    if residual > tol:
        raise AlmostComplexError(f"J² ≠ −Id (residuo {residual:.3e})", _maybe_point(point))
    d = j_jet.grad  # d[l, j, m] = ∂_m J^l_j
    return (
        np.einsum("mi,ljm->lij", jv, d)
        - np.einsum("mj,lim->lij", jv, d)
        + np.einsum("lm,mij->lij", jv, d)
        - np.einsum("lm,mji->lij", jv, d)
    )


# =============================================================================
# ∧ FORMAS: PRODUCTO EXTERIOR, CONTRACCIÓN, HODGE
# =============================================================================

@dataclass(frozen=True)
class TopForm:
    """Forma de grado máximo representada por su coeficiente en dx¹∧…∧dxⁿ"""
    coefficient: float
    dim: int


def _permutation_sign(perm: Sequence[int]) -> int:
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def levi_civita(dim: int) -> np.ndarray:
    """Símbolo de Levi-Civita como array denso (dim ≤ 6)"""
    if dim > 6:
        raise UnsupportedDegreeError(f"Símbolo de Levi-Civita denso no soportado en dim {dim}")
    eps = np.zeros((dim,) * dim)
    for perm in itertools.permutations(range(dim)):
        eps[perm] = _permutation_sign(perm)
    return eps


def wedge(a, b, max_degree: int = 3) -> np.ndarray:
    """
    Producto exterior de formas como arrays antisimétricos completos.

    Para 1-formas: (α∧β)_ij = α_iβ_j − α_jβ_i.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    p, q = a.ndim, b.ndim
    if p == 0 or q == 0:
        return a * b
    if p + q > max_degree:
        raise UnsupportedDegreeError(f"Producto exterior de grado {p + q} > {max_degree}")
    tensor = np.multiply.outer(a, b)
    result = np.zeros_like(tensor)
    for perm in itertools.permutations(range(p + q)):
        result = result + _permutation_sign(perm) * np.transpose(tensor, perm)
    return result / (math.factorial(p) * math.factorial(q))


def interior(x, w) -> np.ndarray:
    """ι_X w: contracción en el primer índice"""
    return np.tensordot(np.asarray(x), np.asarray(w), axes=(0, 0))


def raise_all(w: np.ndarray, g_inv: np.ndarray) -> np.ndarray:
    """Subir todos los índices de un tensor covariante"""
    result = np.asarray(w)
    for axis in range(result.ndim):
        result = np.moveaxis(np.tensordot(g_inv, result, axes=(1, axis)), 0, axis)
    return result


def form_norm(w, g_inv: np.ndarray) -> float:
    """Norma métrica de una k-forma: |w|² = (1/k!) w_{i…} w^{i…}"""
    if isinstance(w, TopForm):
        raise UnsupportedDegreeError("Use top_form_norm para TopForm")
    w = np.asarray(w)
    k = w.ndim
    value = np.sum(w * raise_all(w, g_inv)) / math.factorial(k)
    return math.sqrt(max(float(np.real(value)), 0.0))


def tensor_norm(t, g: np.ndarray, g_inv: np.ndarray, covariant: Sequence[bool]) -> float:
    """Norma métrica de un tensor mixto (covariant[i] indica índice abajo)"""
    t = np.asarray(t)
    contracted = t
    for axis, down in enumerate(covariant):
        metric = g_inv if down else g
        contracted = np.moveaxis(np.tensordot(metric, contracted, axes=(1, axis)), 0, axis)
    return math.sqrt(max(float(np.real(np.sum(np.conj(t) * contracted))), 0.0))


def volume_coefficient(g: np.ndarray, orientation: int) -> float:
    return orientation * math.sqrt(np.linalg.det(g))


def hodge_star(w, g: np.ndarray, orientation: int = 1, degree: Optional[int] = None):
    """
    Estrella de Hodge riemanniana.

    Soporta todo grado en dim ≤ 4 (arrays completos) y los grados 0 y n en
    cualquier dimensión, donde la forma de grado máximo es un TopForm.

    Raises:
        UnsupportedDegreeError: para pares (dim, grado) no soportados
    """
    g = np.asarray(g, dtype=float)
    n = g.shape[0]
    vol = volume_coefficient(g, orientation)
    if isinstance(w, TopForm):
        return w.coefficient / vol
    w = np.asarray(w)
    k = w.ndim if degree is None else degree
    if k == 0:
        if n <= 4:
            return float(w) * vol * levi_civita(n)
        return TopForm(float(w) * vol, n)
    if n > 4:
        raise UnsupportedDegreeError(f"Estrella de Hodge de grado {k} no soportada en dim {n}")
    if k == n:
        # w = c·dx¹∧…∧dxⁿ ⇒ *w = c / vol
        coefficient = w[tuple(range(n))]
        return coefficient / vol
    raised = raise_all(w, np.linalg.inv(g))
    eps = levi_civita(n)
    axes = (list(range(k)), list(range(k)))
    return vol * np.tensordot(raised, eps, axes=axes) / math.factorial(k)


def pfaffian_sign(omega: np.ndarray) -> int:
    """Signo del pfaffiano de una dos-forma en dim 4 (orientación inducida)"""
    if omega.shape != (4, 4):
        raise UnsupportedDegreeError("pfaffian_sign solo en dim 4")
    pf = omega[0, 1] * omega[2, 3] - omega[0, 2] * omega[1, 3] + omega[0, 3] * omega[1, 2]
    return 1 if pf > 0 else -1


def kahler_form(g: Jet, j: Jet) -> Jet:
    """ω = g(J·,·): ω_ij = g_kj J^k_i"""
    return jet_einsum("ki,kj->ij", j, g)



def orthonormal_frame(g: np.ndarray) -> np.ndarray:
    """Marco g-ortonormal E (columnas) con Eᵀ g E = Id, vía Cholesky"""
    lower = np.linalg.cholesky(g)
    return np.linalg.inv(lower).T
