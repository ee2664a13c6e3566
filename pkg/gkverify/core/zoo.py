"""
🦓 Zoológico de Ejemplos

Generadores de especificaciones de ejemplo:

- Z1: ℝ⁴ⁿ plano (n = 1, 2) con J₊ = I y J₋ = αI + βJ + γK
- Z2: producto de dos superficies de Riemann con métricas conformes
- Z3: producto de dos bloques tipo Z1 de dimensión 8 con a₁ ≠ a₂
- Z4: Z3 (o Z1) con b += x₁ dx₂∧dx₃ (control negativo, db ≠ 0)
- Z5: muestreador puntual cuatridimensional (no es una variedad)
"""

import math
from typing import Callable, Dict, List, Mapping, Optional, Union

import numpy as np
from loguru import logger

from .bihermitian import FourDimData, compose_decomposed_b, decomposition_frame, k_structure
from .errors import UnknownZooExampleError
from .models import ManifoldSpec, SamplePlan, SamplerSpec
from .patch import orthonormal_frame, wedge

ParamValue = Union[float, str]

# Multiplicación a izquierda por i, j, k sobre ℍ ≅ ℝ⁴
QUATERNION_I = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], dtype=float)
QUATERNION_J = np.array([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]], dtype=float)
QUATERNION_K = np.array([[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]], dtype=float)


# =============================================================================
# 🧱 BLOQUES DE EXPRESIONES
# =============================================================================

def _zeros(n: int) -> List[List[str]]:
    return [["0"] * n for _ in range(n)]


def _identity(n: int, diagonal: Optional[List[str]] = None) -> List[List[str]]:
    matrix = _zeros(n)
    for i in range(n):
        matrix[i][i] = diagonal[i] if diagonal else "1"
    return matrix


def _place(target: List[List[str]], block: List[List[str]], offset: int) -> None:
    for i, row in enumerate(block):
        for j, entry in enumerate(row):
            target[offset + i][offset + j] = entry


def _quaternion_i() -> List[List[str]]:
    return [["0", "-1", "0", "0"], ["1", "0", "0", "0"], ["0", "0", "0", "-1"], ["0", "0", "1", "0"]]


def _quaternion_combination(alpha: str, beta: str, gamma: str) -> List[List[str]]:
    """αI + βJ + γK como matriz de expresiones"""
    return [
        ["0", f"-{alpha}", f"-{beta}", f"-{gamma}"],
        [alpha, "0", f"-{gamma}", beta],
        [beta, gamma, "0", f"-{alpha}"],
        [gamma, f"-{beta}", alpha, "0"],
    ]


def _block_diagonal(blocks: List[List[List[str]]]) -> List[List[str]]:
    n = sum(len(b) for b in blocks)
    matrix = _zeros(n)
    offset = 0
    for block in blocks:
        _place(matrix, block, offset)
        offset += len(block)
    return matrix


def _coords(n: int) -> List[str]:
    return [f"x{i + 1}" for i in range(n)]


def _float(params: Mapping[str, ParamValue], key: str, default: float) -> float:
    value = params.get(key, default)
    try:
        return float(value)
    except (TypeError, ValueError):
        raise UnknownZooExampleError(f"Parámetro '{key}' no numérico: {value!r}") from None


# =============================================================================
# 🦓 EJEMPLOS
# =============================================================================

def z1(params: Mapping[str, ParamValue]) -> ManifoldSpec:
    """ℝ⁴ⁿ plano, b = 0, J₊ = I, J₋ = αI + βJ + γK (a ≡ α)"""
    alpha = _float(params, "alpha", 0.6)
    beta = _float(params, "beta", 0.8)
    gamma = _float(params, "gamma", 0.0)
    n = int(_float(params, "n", 1))
    if n not in (1, 2):
        raise UnknownZooExampleError(f"Z1 admite n = 1 o 2, no {n}")
    norm = alpha ** 2 + beta ** 2 + gamma ** 2
    if abs(norm - 1) > 1e-9:
        raise UnknownZooExampleError(f"Z1 requiere α² + β² + γ² = 1 (es {norm:.12g})")
    dim = 4 * n
    return ManifoldSpec(
        name=f"Z1(n={n}, α={alpha:g}, β={beta:g}, γ={gamma:g})",
        dim=dim,
        coords=_coords(dim),
        parameters={"alpha": alpha, "beta": beta, "gamma": gamma},
        metric=_identity(dim),
        b=_zeros(dim),
        jplus=_block_diagonal([_quaternion_i()] * n),
        jminus=_block_diagonal([_quaternion_combination("alpha", "beta", "gamma")] * n),
        domain=[(-1.0, 1.0)] * dim,
        orientation=1,
        declared_scenarios=["all"],
    )


def z2(params: Mapping[str, ParamValue]) -> ManifoldSpec:
    """Producto de superficies con métricas e^{2φ}δ, J₊ = (J_A, J_B), J₋ = (J_A, −J_B)"""
    ca = _float(params, "ca", 0.3)
    cb = _float(params, "cb", 0.2)
    conformal_a = "exp(2 * ca * sin(x1) * cos(x2))"
    conformal_b = "exp(2 * cb * x3 * x4)"
    complex_structure = [["0", "-1"], ["1", "0"]]
    conjugate = [["0", "1"], ["-1", "0"]]
    return ManifoldSpec(
        name=f"Z2(ca={ca:g}, cb={cb:g})",
        dim=4,
        coords=_coords(4),
        parameters={"ca": ca, "cb": cb},
        metric=_identity(4, [conformal_a, conformal_a, conformal_b, conformal_b]),
        b=_zeros(4),
        jplus=_block_diagonal([complex_structure, complex_structure]),
        jminus=_block_diagonal([complex_structure, conjugate]),
        domain=[(-1.0, 1.0)] * 4,
        orientation=1,
        declared_scenarios=["validate", "gk", "eigendist", "theorem"],
    )


def z3(params: Mapping[str, ParamValue]) -> ManifoldSpec:
    """Dos bloques planos de dimensión 8 con a₁ ≠ a₂: dos eigendistribuciones de dimensión 8"""
    a1 = _float(params, "a1", 0.0)
    a2 = _float(params, "a2", 0.5)
    for name, value in (("a1", a1), ("a2", a2)):
        if not -1 < value < 1:
            raise UnknownZooExampleError(f"Z3 requiere |{name}| < 1 (es {value:g})")
    if abs(a1 - a2) < 1e-6:
        raise UnknownZooExampleError("Z3 requiere a1 ≠ a2")
    blocks_minus = [
        _quaternion_combination("a1", "sqrt(1 - a1^2)", "0"),
        _quaternion_combination("a1", "sqrt(1 - a1^2)", "0"),
        _quaternion_combination("a2", "sqrt(1 - a2^2)", "0"),
        _quaternion_combination("a2", "sqrt(1 - a2^2)", "0"),
    ]
    return ManifoldSpec(
        name=f"Z3(a1={a1:g}, a2={a2:g})",
        dim=16,
        coords=_coords(16),
        parameters={"a1": a1, "a2": a2},
        metric=_identity(16),
        b=_zeros(16),
        jplus=_block_diagonal([_quaternion_i()] * 4),
        jminus=_block_diagonal(blocks_minus),
        domain=[(-1.0, 1.0)] * 16,
        orientation=1,
        declared_scenarios=["validate", "gk", "eigendist", "theorem", "courant", "gauge"],
    )


def z4(params: Mapping[str, ParamValue]) -> ManifoldSpec:
    """Control negativo: base (Z3 o Z1) con b += x₁ dx₂∧dx₃"""
    base_name = str(params.get("base", "Z3")).upper()
    rest = {k: v for k, v in params.items() if k != "base"}
    if base_name == "Z3":
        base = z3(rest)
    elif base_name == "Z1":
        base = z1(rest)
    else:
        raise UnknownZooExampleError(f"Z4 admite base Z3 o Z1, no {base_name}")
    b = [row[:] for row in base.b]
    b[1][2] = "x1"
    b[2][1] = "-x1"
    return base.model_copy(update={
        "name": f"Z4(base={base.name})",
        "b": b,
        "declared_scenarios": ["gk", "theorem"],
    })


def z5(params: Mapping[str, ParamValue]) -> ManifoldSpec:
    """Muestreador puntual cuatridimensional (modos decomposed / generic)"""
    mode = str(params.get("mode", "decomposed"))
    if mode not in ("decomposed", "generic"):
        raise UnknownZooExampleError(f"Z5 admite mode decomposed o generic, no {mode}")
    samples = int(_float(params, "samples", 1000))
    seed = int(_float(params, "seed", 0))
    return ManifoldSpec(
        name=f"Z5(mode={mode})",
        dim=4,
        coords=_coords(4),
        domain=[(-1.0, 1.0)] * 4,
        sample_plan=SamplePlan(seed=seed),
        sampler=SamplerSpec(samples=samples, mode=mode),
        declared_scenarios=["fourdim"],
    )


ZOO: Dict[str, Callable[[Mapping[str, ParamValue]], ManifoldSpec]] = {
    "Z1": z1,
    "Z2": z2,
    "Z3": z3,
    "Z4": z4,
    "Z5": z5,
}


def zoo_generate(name: str, params: Optional[Mapping[str, ParamValue]] = None) -> ManifoldSpec:
    """
    Generar la especificación de un ejemplo del zoológico.

    Raises:
        UnknownZooExampleError: nombre desconocido o parámetros inválidos
    """
    key = name.upper()
    if key not in ZOO:
        raise UnknownZooExampleError(f"Ejemplo desconocido '{name}' (disponibles: {', '.join(ZOO)})")
    spec = ZOO[key](dict(params or {}))
    logger.debug(f"🦓 Generado {spec.name}")
    return spec


# =============================================================================
# 🎲 MUESTREADOR PUNTUAL 4D
# =============================================================================

def random_four_dim_data(rng: np.random.Generator, mode: str = "decomposed") -> FourDimData:
    """
    Datos puntuales (g, J±, da, b, db) con J± de la misma orientación,
    linealmente independientes, y db = du∧b.

    En modo ``decomposed`` b = c v_E + v_F + du∧α; en modo ``generic`` b es
    una dos-forma aleatoria.
    """
    a_matrix = rng.normal(size=(4, 4))
    g = a_matrix @ a_matrix.T / 4 + np.eye(4)
    frame = orthonormal_frame(g)
    coframe = frame.T @ g
    a = rng.uniform(-0.8, 0.8)
    angle = rng.uniform(0, 2 * math.pi)
    radius = math.sqrt(1 - a ** 2)
    j_minus_local = a * QUATERNION_I + radius * (math.cos(angle) * QUATERNION_J + math.sin(angle) * QUATERNION_K)
    j_plus = frame @ QUATERNION_I @ coframe
    j_minus = frame @ j_minus_local @ coframe
    da = rng.normal(size=4)
    du = -da / (1 - a)
    if mode == "decomposed":
        k_plus = k_structure(j_plus, j_minus, 1, a)
        k_minus = k_structure(j_plus, j_minus, -1, a)
        basis = decomposition_frame(g, k_minus @ k_plus, du)
        conformal = math.sqrt((1 - a) / (1 + a))
        du_norm = math.sqrt(float(du @ np.linalg.solve(g, du)))
        b = compose_decomposed_b(g, basis, conformal, du_norm, rng.normal(), rng.normal(size=2))
    elif mode == "generic":
        raw = rng.normal(size=(4, 4))
        b = raw - raw.T
    else:
        raise ValueError(f"Modo desconocido: {mode}")
    return FourDimData(g=g, j_plus=j_plus, j_minus=j_minus, da=da, b=b, db=wedge(du, b), orientation=1)


def sample_four_dim_points(count: int, seed: int = 0, mode: str = "decomposed") -> List[FourDimData]:
    """Conjunto reproducible de datos puntuales cuatridimensionales"""
    rng = np.random.default_rng(seed)
    return [random_four_dim_data(rng, mode) for _ in range(count)]
