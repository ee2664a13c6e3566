"""
🚨 Errores del Verificador

Jerarquía de excepciones del toolkit. Cada excepción lleva el código de
salida que la CLI devuelve cuando la excepción llega hasta ella:

- 2: error de especificación o de uso (incluye métrica degenerada)
- 3: agrupamiento ambiguo de autovalores

Los fallos de residuo NO son excepciones: se registran en el reporte.
"""

from typing import Optional, Sequence, Tuple


def _format_point(point: Optional[Sequence[float]]) -> str:
    if point is None:
        return "-"
    return "(" + ", ".join(f"{float(x):.6g}" for x in point) + ")"


class GKVError(Exception):
    """Error base del verificador"""

    exit_code = 2

    def __init__(self, message: str, point: Optional[Sequence[float]] = None):
        self.point: Optional[Tuple[float, ...]] = (
            tuple(float(x) for x in point) if point is not None else None
        )
        if self.point is not None:
            message = f"{message} en el punto {_format_point(self.point)}"
        super().__init__(message)


# =============================================================================
# 📝 ERRORES DE ESPECIFICACIÓN Y EXPRESIONES
# =============================================================================

class SpecError(GKVError):
    """Archivo de especificación inválido"""


class SpecShapeError(SpecError):
    """Forma de matriz incompatible con la dimensión"""


class SpecDomainError(SpecError):
    """Invariante de carga violado en la pre-malla"""


class ExprError(SpecError):
    """Error base de expresiones"""


class ExprSyntaxError(ExprError):
    """Error de sintaxis con desplazamiento en bytes"""

    def __init__(self, message: str, text: str, offset: int):
        self.text = text
        self.offset = offset
        super().__init__(f"{message} (byte {offset} en {text!r})")


class UnknownIdentifierError(ExprError):
    """Identificador que no es coordenada, parámetro ni función"""

    def __init__(self, name: str, text: str, offset: int):
        self.name = name
        self.offset = offset
        super().__init__(f"Identificador desconocido '{name}' (byte {offset} en {text!r})")


class ArityError(ExprError):
    """Número de argumentos incorrecto en una llamada a función"""

    def __init__(self, name: str, expected: int, got: int, offset: int):
        self.name = name
        self.expected = expected
        self.got = got
        self.offset = offset
        super().__init__(
            f"La función '{name}' espera {expected} argumento(s), recibió {got} (byte {offset})"
        )


class ExprDomainError(GKVError):
    """Evaluación fuera del dominio (log/sqrt de no positivo, división por cero)"""


class UnknownZooExampleError(SpecError):
    """Ejemplo del zoológico inexistente o parámetros inválidos"""


class SuiteNotApplicableError(SpecError):
    """Suite solicitada explícitamente sobre una entrada que no la admite"""


# =============================================================================
# 📐 ERRORES GEOMÉTRICOS
# =============================================================================

class DegenerateMetricError(GKVError):
    """La métrica no es definida positiva (Cholesky falla)"""


class AlmostComplexError(GKVError):
    """El endomorfismo no cumple J² = −Id"""


class UnsupportedDegreeError(GKVError):
    """Grado de forma o par (dimensión, grado) no soportado"""


class SingularCombinationError(GKVError):
    """J₊ ∓ J₋ singular (lugar a = ±1)"""

    def __init__(self, sign: str, point: Optional[Sequence[float]] = None):
        self.sign = sign
        super().__init__(f"J₊ {sign} J₋ es singular", point)


class ScalarRegimeError(GKVError):
    """|a| ≥ 1 − margen o Σ no escalar donde se exige el régimen escalar"""


class OrientationMismatchError(GKVError):
    """J₊ y J₋ (o la orientación declarada) inducen orientaciones distintas"""


class ClosedFormError(GKVError):
    """La dos-forma B de una transformación no es cerrada"""


class QuadrupleValidationError(GKVError):
    """La cuádrupla no pasa la validación; lleva el peor punto"""

    def __init__(self, check: str, residual: float, point: Optional[Sequence[float]] = None):
        self.check = check
        self.residual = residual
        super().__init__(f"Validación '{check}' fallida (residuo {residual:.3e})", point)


class RankJumpError(GKVError):
    """El rango de una distribución cambia dentro del parche"""


class NonIntegrableError(GKVError):
    """Operación que exige una distribución integrable"""


class AmbiguousClusteringError(GKVError):
    """Dos autovalores en la banda de guarda (clusterTol, 3·clusterTol]"""

    exit_code = 3
