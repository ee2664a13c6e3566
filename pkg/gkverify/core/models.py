"""
📋 Modelos de Datos del Verificador

Esquemas pydantic de los archivos que el toolkit lee y escribe: archivos de
especificación de variedades, archivos de secciones para ``gkv courant`` y
reportes JSON. Todos usan alias camelCase en disco.
"""

from enum import Enum
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .config import SamplingDefaults

_SAMPLING = SamplingDefaults()


class SuiteName(str, Enum):
    """Suites ejecutables"""
    VALIDATE = "validate"
    GK = "gk"
    IDENTITIES = "identities"
    GAUGE = "gauge"
    EIGENDIST = "eigendist"
    THEOREM = "theorem"
    FOURDIM = "fourdim"
    COURANT = "courant"
    ALL = "all"


class ExitCode(int, Enum):
    """Códigos de salida de la CLI"""
    PASS = 0
    RESIDUAL_FAILURE = 1
    SPEC_ERROR = 2
    AMBIGUOUS_CLUSTERING = 3


class VerdictKind(str, Enum):
    """Veredictos de escenario del teorema de integrabilidad"""
    CONSISTENT = "consistent"
    INCONSISTENT = "inconsistent"
    HYPOTHESIS_NOT_SATISFIED = "hypothesis_not_satisfied"
    OUT_OF_SCOPE = "out_of_scope"


class _CamelModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid")


# =============================================================================
# 📄 ARCHIVO DE ESPECIFICACIÓN
# =============================================================================

class SamplePlan(_CamelModel):
    """Plan de muestreo: malla interior más puntos aleatorios con semilla"""

    grid: int = Field(default=_SAMPLING.grid, ge=1, description="Puntos por eje")
    random: int = Field(default=_SAMPLING.random, ge=0, description="Puntos aleatorios adicionales")
    seed: int = Field(default=0, ge=0)
    interior_offset: float = Field(default=_SAMPLING.interior_offset, ge=0, lt=0.5, alias="interiorOffset")
    max_grid_points: int = Field(default=_SAMPLING.max_grid_points, ge=1, alias="maxGridPoints")


class SamplerSpec(_CamelModel):
    """Muestreador puntual (no variedad) para identidades cuatridimensionales"""

    kind: Literal["four_dim_pointwise"] = "four_dim_pointwise"
    samples: int = Field(default=1000, ge=1)
    mode: Literal["decomposed", "generic"] = "decomposed"


Matrix = List[List[str]]


class ManifoldSpec(_CamelModel):
    """Especificación de una variedad en un parche de coordenadas"""

    name: str = ""
    dim: int = Field(..., ge=2)
    coords: List[str]
    parameters: Dict[str, float] = Field(default_factory=dict)
    metric: Optional[Matrix] = None
    b: Optional[Matrix] = None
    jplus: Optional[Matrix] = None
    jminus: Optional[Matrix] = None
    domain: List[Tuple[float, float]]
    sample_plan: SamplePlan = Field(default_factory=SamplePlan, alias="samplePlan")
    orientation: int = 1
    declared_scenarios: List[str] = Field(default_factory=list, alias="declaredScenarios")
    sampler: Optional[SamplerSpec] = None

    @field_validator("orientation")
    @classmethod
    def validate_orientation(cls, v):
        if v not in (1, -1):
            raise ValueError("orientation debe ser 1 o -1")
        return v

    @field_validator("declared_scenarios")
    @classmethod
    def validate_scenarios(cls, v):
        known = {s.value for s in SuiteName}
        unknown = [s for s in v if s not in known]
        if unknown:
            raise ValueError(f"Suites desconocidas: {unknown}")
        return v

    @model_validator(mode="after")
    def validate_shapes(self):
        if len(self.coords) != self.dim:
            raise ValueError(f"coords tiene {len(self.coords)} nombres, dim es {self.dim}")
        if len(set(self.coords)) != self.dim:
            raise ValueError("nombres de coordenadas repetidos")
        if len(self.domain) != self.dim:
            raise ValueError(f"domain tiene {len(self.domain)} intervalos, dim es {self.dim}")
        for i, (lo, hi) in enumerate(self.domain):
            if not lo < hi:
                raise ValueError(f"intervalo vacío en el eje {i}: [{lo}, {hi}]")
        fields = {"metric": self.metric, "b": self.b, "jplus": self.jplus, "jminus": self.jminus}
        if self.sampler is None:
            missing = [name for name, value in fields.items() if value is None]
            if missing:
                raise ValueError(f"faltan campos: {missing}")
        for name, matrix in fields.items():
            if matrix is None:
                continue
            rows = len(matrix)
            cols = {len(row) for row in matrix}
            if rows != self.dim or cols != {self.dim}:
                shape = f"{rows}×{'/'.join(str(c) for c in sorted(cols)) or 0}"
                raise ValueError(f"{name} tiene forma {shape}, se esperaba {self.dim}×{self.dim}")
        return self


# =============================================================================
# 🧭 ARCHIVO DE SECCIONES (gkv courant)
# =============================================================================

class SectionSpec(_CamelModel):
    """Sección generalizada X + α por expresiones"""

    vector: List[str]
    form: List[str]
    vector_imag: Optional[List[str]] = Field(default=None, alias="vectorImag")
    form_imag: Optional[List[str]] = Field(default=None, alias="formImag")


class SectionPair(_CamelModel):
    u: SectionSpec
    v: SectionSpec


class SectionsFile(_CamelModel):
    pairs: List[SectionPair] = Field(..., min_length=1)


# =============================================================================
# 📊 REPORTES
# =============================================================================

class CheckRecord(_CamelModel):
    """Registro de una comprobación ejecutada"""

    check_name: str = Field(..., alias="checkName")
    reference: str = Field(..., description="Identidad evaluada")
    max_residual: float = Field(..., alias="maxResidual")
    argmax_point: Optional[List[float]] = Field(default=None, alias="argmaxPoint")
    tolerance: float
    passed: bool = Field(..., alias="pass")
    notes: List[str] = Field(default_factory=list)


class StatementOutcome(_CamelModel):
    """Evaluación de un enunciado (teorema o corolario) sobre el ejemplo"""

    statement: Literal["theorem", "corollary"]
    hypotheses_met: bool = Field(..., alias="hypothesesMet")
    condition_i: bool = Field(..., alias="conditionI")
    condition_ii: bool = Field(..., alias="conditionII")
    agrees: bool


class ScenarioVerdict(_CamelModel):
    """Veredicto del escenario de integrabilidad de eigendistribuciones"""

    verdict: VerdictKind
    generalized_kahler: bool = Field(..., alias="generalizedKahler")
    hypotheses: Dict[str, bool]
    band_values: List[float] = Field(..., alias="bandValues")
    band_dimensions: List[int] = Field(..., alias="bandDimensions")
    db_norm: float = Field(..., alias="dbNorm")
    statements: List[StatementOutcome] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)


class SkippedSuite(_CamelModel):
    suite: str
    reason: str


class RunMetadata(_CamelModel):
    spec_name: str = Field(default="", alias="specName")
    suite: str
    seed: int
    grid: int
    random: int
    sample_count: int = Field(..., alias="sampleCount")
    toolkit_version: str = Field(..., alias="toolkitVersion")
    timestamp: str


class Report(_CamelModel):
    """Reporte de una ejecución de suite"""

    checks: List[CheckRecord] = Field(default_factory=list)
    verdicts: List[ScenarioVerdict] = Field(default_factory=list)
    skipped: List[SkippedSuite] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)
    metadata: RunMetadata

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failing(self) -> List[CheckRecord]:
        return [c for c in self.checks if not c.passed]

    def check(self, name: str) -> CheckRecord:
        """Obtener un registro por nombre"""
        for record in self.checks:
            if record.check_name == name:
                return record
        raise KeyError(name)

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, indent=2)


class BracketRecord(_CamelModel):
    """Corchete de Courant de un par de secciones en un punto"""

    pair: int
    point: List[float]
    vector_real: List[float] = Field(..., alias="vectorReal")
    vector_imag: List[float] = Field(..., alias="vectorImag")
    form_real: List[float] = Field(..., alias="formReal")
    form_imag: List[float] = Field(..., alias="formImag")
    transverse_norm_plus: Optional[float] = Field(default=None, alias="transverseNormPlus")


class CourantReport(_CamelModel):
    spec_name: str = Field(default="", alias="specName")
    brackets: List[BracketRecord]
    max_transverse_norm: Optional[float] = Field(default=None, alias="maxTransverseNorm")
    toolkit_version: str = Field(..., alias="toolkitVersion")
