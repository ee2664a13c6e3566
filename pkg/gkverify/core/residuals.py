"""
📏 Residuos

Registros de residuos por comprobación y la fusión de resultados puntuales
(máximo sobre puntos, con el punto donde se alcanza).
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, TypeVar

import numpy as np

T = TypeVar("T")
PointMapper = Callable[[Callable[[np.ndarray], T], Sequence[np.ndarray]], List[T]]


def sequential_map(fn: Callable[[np.ndarray], T], points: Sequence[np.ndarray]) -> List[T]:
    """Evaluación secuencial en orden"""
    return [fn(p) for p in points]


@dataclass(frozen=True)
class CheckSpec:
    """Nombre, identidad evaluada y tolerancia de una comprobación"""
    name: str
    reference: str
    tolerance: float
    # Comprobaciones de cota inferior: pasan si el residuo es >= tolerancia
    lower_bound: bool = False


@dataclass
class ResidualResult:
    """Máximo de un residuo sobre los puntos muestreados"""
    name: str
    reference: str
    max_residual: float
    argmax_point: Optional[Tuple[float, ...]]
    tolerance: float
    lower_bound: bool = False
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        if math.isnan(self.max_residual):
            return False
        if self.lower_bound:
            return self.max_residual >= self.tolerance
        return self.max_residual <= self.tolerance


def max_abs(array) -> float:
    """Máximo valor absoluto de las componentes (0 para arrays vacíos)"""
    array = np.asarray(array)
    if array.size == 0:
        return 0.0
    return float(np.max(np.abs(array)))


def merge_pointwise(
    specs: Sequence[CheckSpec],
    points: Sequence[np.ndarray],
    per_point: Iterable[Mapping[str, Optional[float]]],
) -> Dict[str, ResidualResult]:
    """
    Fusionar residuos puntuales en un resultado por comprobación.

    Un valor None en un punto significa "no aplica en este punto" y se cuenta
    en las notas. Empates: gana el primer punto en el orden de muestreo.
    """
    best: Dict[str, Tuple[float, Optional[Tuple[float, ...]]]] = {
        s.name: (-math.inf, None) for s in specs
    }
    skipped: Dict[str, int] = {s.name: 0 for s in specs}
    for point, values in zip(points, per_point):
        for spec in specs:
            value = values.get(spec.name)
            if value is None:
                skipped[spec.name] += 1
                continue
            if math.isnan(value) or value > best[spec.name][0]:
                if not math.isnan(best[spec.name][0]):
                    best[spec.name] = (float(value), tuple(float(x) for x in point))

    results: Dict[str, ResidualResult] = {}
    for spec in specs:
        value, argmax = best[spec.name]
        notes = []
        if skipped[spec.name]:
            notes.append(f"omitido en {skipped[spec.name]} punto(s)")
        if value == -math.inf:
            value = 0.0
            notes.append("sin puntos evaluables")
        results[spec.name] = ResidualResult(
            spec.name, spec.reference, value, argmax, spec.tolerance, spec.lower_bound, notes
        )
    return results


def single_result(spec: CheckSpec, value: float, point=None, notes: Optional[List[str]] = None) -> ResidualResult:
    """Resultado de una comprobación global (no puntual)"""
    return ResidualResult(
        spec.name,
        spec.reference,
        float(value),
        tuple(float(x) for x in point) if point is not None else None,
        spec.tolerance,
        spec.lower_bound,
        list(notes or []),
    )
