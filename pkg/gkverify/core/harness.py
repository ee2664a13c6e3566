"""
🧪 Arnés de Verificación

Este módulo orquesta las verificaciones:

- carga y validación de archivos de especificación (con invariantes de carga)
- construcción de la cuádrupla desde las expresiones
- pool acotado de evaluación puntual (asyncio + hilos)
- ejecución de suites y ensamblado de reportes deterministas
- corchetes de Courant de secciones dadas por archivo
"""

import asyncio
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, TypeVar, Union

import numpy as np
from loguru import logger
from pydantic import ValidationError

from .. import __version__
from .bihermitian import (
    BihermitianQuadruple,
    ensure_valid,
    epsilon_from_quadruple,
    epsilon_residuals,
    four_dim_sampled,
    four_dim_suite,
    gk_integrability_residual,
    identity_suite_scalar_regime,
    normalized_gauge_residuals,
    validate_quadruple,
)
from .config import ToleranceConfig, get_config
from .eigendist import eigendist_suite, theorem_scenario
from .errors import (
    ExprDomainError,
    ExprError,
    SingularCombinationError,
    SpecDomainError,
    SpecError,
    SpecShapeError,
    SuiteNotApplicableError,
)
from .expr import parse_expr
from .gencomplex import (
    GeneralizedSection,
    courant_bracket,
    courant_suite,
    dirac_from_epsilon,
)
from .models import (
    BracketRecord,
    CheckRecord,
    CourantReport,
    ManifoldSpec,
    Report,
    RunMetadata,
    SamplePlan,
    ScenarioVerdict,
    SectionsFile,
    SectionSpec,
    SkippedSuite,
    SuiteName,
)
from .patch import FieldKind, Patch, TensorField
from .residuals import ResidualResult, sequential_map
from .zoo import sample_four_dim_points

T = TypeVar("T")

SUITE_ORDER = (
    SuiteName.VALIDATE,
    SuiteName.GK,
    SuiteName.IDENTITIES,
    SuiteName.GAUGE,
    SuiteName.EIGENDIST,
    SuiteName.THEOREM,
    SuiteName.FOURDIM,
    SuiteName.COURANT,
)


# =============================================================================
# 🧵 POOL DE EVALUACIÓN PUNTUAL
# =============================================================================

class PointPool:
    """Evaluación puntual concurrente con orden de entrada preservado"""

    def __init__(self, workers: Optional[int] = None):
        self.workers = workers or get_config().workers

    async def _gather(self, fn: Callable[[np.ndarray], T], points: Sequence[np.ndarray]) -> List[T]:
        semaphore = asyncio.Semaphore(self.workers)

        async def run(point: np.ndarray) -> T:
            async with semaphore:
                return await asyncio.to_thread(fn, point)

        return list(await asyncio.gather(*(run(p) for p in points)))

    def map(self, fn: Callable[[np.ndarray], T], points: Sequence[np.ndarray]) -> List[T]:
        if self.workers <= 1 or len(points) <= 1:
            return sequential_map(fn, points)
        return asyncio.run(self._gather(fn, points))

    __call__ = map


# =============================================================================
# 📄 CARGA DE ESPECIFICACIONES
# =============================================================================

def parse_spec(text: str) -> ManifoldSpec:
    """
    Validar el JSON de una especificación.

    Raises:
        SpecShapeError: JSON inválido, campos faltantes o formas incompatibles
    """
    try:
        return ManifoldSpec.model_validate_json(text)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first.get("loc", ())) or "<raíz>"
        raise SpecShapeError(f"Especificación inválida en '{location}': {first.get('msg')}") from None


def load_spec(path: Union[str, Path]) -> ManifoldSpec:
    """
    Cargar y validar un archivo de especificación.

    Las expresiones se analizan y los invariantes de carga (dominio de las
    expresiones y validación de la cuádrupla) se comprueban en una pre-malla.

    Raises:
        SpecError: archivo ilegible, errores de análisis o de forma
        SpecDomainError: expresión fuera de dominio en la pre-malla
        QuadrupleValidationError: la cuádrupla no valida en la pre-malla
        DegenerateMetricError: métrica no definida positiva
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise SpecError(f"No se puede leer '{path}': {e}") from None
    spec = parse_spec(text)
    if spec.sampler is None:
        check_load_invariants(spec, build_quadruple(spec))
    logger.info(f"📄 Especificación '{spec.name or path.name}' cargada (dim {spec.dim})")
    return spec


def _compile(spec: ManifoldSpec, kind: FieldKind, name: str, matrix: List[List[str]]) -> TensorField:
    try:
        entries = [[parse_expr(text, spec.coords, spec.parameters) for text in row] for row in matrix]
    except ExprError:
        logger.error(f"❌ Error de expresión en el campo '{name}'")
        raise
    try:
        return TensorField.from_expressions(kind, entries, spec.dim, name=name)
    except ExprDomainError as e:
        raise SpecDomainError(f"Campo '{name}': {e}") from None


def build_patch(spec: ManifoldSpec, plan: Optional[SamplePlan] = None) -> Patch:
    return Patch(spec.dim, tuple(spec.coords), tuple(tuple(i) for i in spec.domain), plan or spec.sample_plan)


def build_quadruple(spec: ManifoldSpec, plan: Optional[SamplePlan] = None) -> BihermitianQuadruple:
    """Construir la cuádrupla (g, b, J₊, J₋) desde las expresiones"""
    if spec.sampler is not None:
        raise SuiteNotApplicableError("La especificación es un muestreador puntual, no una variedad")
    return BihermitianQuadruple(
        patch=build_patch(spec, plan),
        g=_compile(spec, FieldKind.METRIC, "metric", spec.metric),
        b=_compile(spec, FieldKind.TWO_FORM, "b", spec.b),
        j_plus=_compile(spec, FieldKind.ENDO, "jplus", spec.jplus),
        j_minus=_compile(spec, FieldKind.ENDO, "jminus", spec.jminus),
        orientation=spec.orientation,
        name=spec.name,
    )


def check_load_invariants(spec: ManifoldSpec, q: BihermitianQuadruple, pregrid: Optional[int] = None) -> None:
    """Evaluar todos los campos y validar la cuádrupla en la pre-malla"""
    sampling = get_config().sampling
    points = q.patch.pregrid(pregrid or sampling.pregrid, sampling.pregrid_max_points)
    for point in points:
        for tensor_field in (q.g, q.b, q.j_plus, q.j_minus):
            try:
                tensor_field.at(point)
            except ExprDomainError as e:
                raise SpecDomainError(f"Campo '{tensor_field.name}' fuera de dominio: {e}") from None
    ensure_valid(validate_quadruple(q, points))
    logger.debug(f"✅ Invariantes de carga verificados en {len(points)} puntos")


# =============================================================================
# 🏃 EJECUCIÓN DE SUITES
# =============================================================================

@dataclass(frozen=True)
class PointRegime:
    """Régimen de la cuádrupla en un punto"""
    scalar: bool
    a_value: float
    plus_invertible: bool
    minus_invertible: bool


class SuiteRunner:
    """Ejecuta suites sobre una especificación con un plan de muestreo fijo"""

    def __init__(self, spec: ManifoldSpec, tol: ToleranceConfig, plan: SamplePlan, pool: PointPool):
        self.spec = spec
        self.tol = tol
        self.plan = plan
        self.pool = pool
        self._regimes: Optional[List[PointRegime]] = None
        if spec.sampler is None:
            self.quadruple: Optional[BihermitianQuadruple] = build_quadruple(spec, plan)
            self.points = self.quadruple.patch.sample_points(plan)
        else:
            self.quadruple = None
            self.points = np.zeros((spec.sampler.samples, 0))

    # =========================================================================
    # 🔎 APLICABILIDAD
    # =========================================================================

    def regimes(self) -> List[PointRegime]:
        if self._regimes is None:
            q = self.quadruple
            tol = self.tol

            def regime(point):
                loc = q.local(point)
                a = loc.a_value
                residual = np.max(np.abs(np.real(loc.sigma.value) + 2 * a * np.eye(q.dim)))
                singular = {
                    sign: np.linalg.svd(np.real(loc.combination(sign).value), compute_uv=False)[-1]
                    for sign in (1, -1)
                }
                return PointRegime(residual <= tol.algebraic, a, singular[1] > tol.invertibility,
                                   singular[-1] > tol.invertibility)

            self._regimes = self.pool(regime, self.points)
        return self._regimes

    def not_applicable(self, suite: SuiteName) -> Optional[str]:
        """Motivo por el que la suite no se aplica, o None"""
        if self.spec.sampler is not None:
            return None if suite == SuiteName.FOURDIM else "muestreador puntual: solo admite la suite fourdim"
        invertible = all(r.plus_invertible and r.minus_invertible for r in self.regimes()) \
            if suite in (SuiteName.GAUGE, SuiteName.COURANT, SuiteName.FOURDIM, SuiteName.IDENTITIES) else True
        if suite == SuiteName.IDENTITIES:
            margin = 1 - self.tol.a_margin
            if not all(r.scalar and abs(r.a_value) < margin for r in self.regimes()):
                return "Σ no es escalar con |a| < 1 en todos los puntos"
        if suite == SuiteName.FOURDIM and self.spec.dim != 4:
            return f"requiere dim 4 (dim {self.spec.dim})"
        if not invertible:
            return "J₊ + J₋ o J₊ − J₋ singular en algún punto"
        return None

    # =========================================================================
    # ▶️ EJECUCIÓN
    # =========================================================================

    def execute(self, suite: SuiteName) -> Tuple[Dict[str, ResidualResult], List[ScenarioVerdict]]:
        q, points, tol, pool = self.quadruple, self.points, self.tol, self.pool
        logger.info(f"🧪 Suite '{suite.value}': {len(points)} puntos")
        if suite == SuiteName.VALIDATE:
            return validate_quadruple(q, points, tol, pool), []
        if suite == SuiteName.GK:
            return gk_integrability_residual(q, points, tol, pool), []
        if suite == SuiteName.IDENTITIES:
            results = epsilon_residuals(q, points, tol, pool)
            results.update(identity_suite_scalar_regime(q, points, tol, pool))
            return results, []
        if suite == SuiteName.GAUGE:
            return normalized_gauge_residuals(q, points, tol, pool), []
        if suite == SuiteName.EIGENDIST:
            results, _ = eigendist_suite(q, points, tol, pool)
            return results, []
        if suite == SuiteName.THEOREM:
            scenario = theorem_scenario(q, points, tol, pool)
            return scenario.checks, [scenario.verdict]
        if suite == SuiteName.FOURDIM:
            if self.spec.sampler is not None:
                sampler = self.spec.sampler
                samples = sample_four_dim_points(sampler.samples, self.plan.seed, sampler.mode)
                return four_dim_sampled(samples, tol, pool, mode=sampler.mode), []
            return four_dim_suite(q, points, tol, pool), []
        if suite == SuiteName.COURANT:
            eps = epsilon_from_quadruple(q, points)
            return courant_suite(eps, points, tol, seed=self.plan.seed, mapper=pool), []
        raise SuiteNotApplicableError(f"Suite desconocida: {suite.value}")

    def declared_suites(self) -> Tuple[SuiteName, ...]:
        """Suites declaradas por la especificación en orden canónico (todas si no declara ninguna)"""
        declared = {SuiteName(name) for name in self.spec.declared_scenarios}
        if not declared or SuiteName.ALL in declared:
            return SUITE_ORDER
        return tuple(s for s in SUITE_ORDER if s in declared)

    def run(self, suite: Optional[SuiteName] = SuiteName.ALL) -> Report:
        """
        Ejecutar una suite, todas, o las declaradas (``suite=None``) y ensamblar el reporte.

        Con 'all' o las declaradas, las suites no aplicables se omiten y se listan.

        Raises:
            SuiteNotApplicableError: suite pedida explícitamente que no se aplica
        """
        checks: Dict[str, ResidualResult] = {}
        verdicts: List[ScenarioVerdict] = []
        skipped: List[SkippedSuite] = []
        notes: List[str] = []
        if suite is None:
            order = self.declared_suites()
            label = SuiteName.ALL.value if order == SUITE_ORDER else ",".join(s.value for s in order)
            explicit = False
        else:
            order = SUITE_ORDER if suite == SuiteName.ALL else (suite,)
            label = suite.value
            explicit = suite != SuiteName.ALL
        for name in order:
            reason = self.not_applicable(name)
            if reason is not None:
                if explicit:
                    raise SuiteNotApplicableError(f"Suite '{name.value}' no aplicable: {reason}")
                logger.info(f"⏭️ Suite '{name.value}' omitida: {reason}")
                skipped.append(SkippedSuite(suite=name.value, reason=reason))
                continue
            results, suite_verdicts = self.execute(name)
            for key, result in results.items():
                checks.setdefault(key, result)
            verdicts.extend(suite_verdicts)
            failed = [r.name for r in results.values() if not r.passed]
            if failed:
                logger.warning(f"❌ Suite '{name.value}': {len(failed)} comprobación(es) fallida(s)")
            else:
                logger.info(f"✅ Suite '{name.value}': {len(results)} comprobaciones superadas")
        if self.spec.sampler is not None:
            notes.append("argmaxPoint contiene el índice de muestra en ejecuciones del muestreador puntual")
        return Report(
            checks=[to_record(r) for r in checks.values()],
            verdicts=verdicts,
            skipped=skipped,
            notes=notes,
            metadata=RunMetadata(
                spec_name=self.spec.name,
                suite=label,
                seed=self.plan.seed,
                grid=self.plan.grid,
                random=self.plan.random,
                sample_count=len(self.points),
                toolkit_version=__version__,
                timestamp=datetime.now(timezone.utc).isoformat(),
            ),
        )


def to_record(result: ResidualResult) -> CheckRecord:
    return CheckRecord(
        check_name=result.name,
        reference=result.reference,
        max_residual=result.max_residual,
        argmax_point=list(result.argmax_point) if result.argmax_point is not None else None,
        tolerance=result.tolerance,
        passed=result.passed,
        notes=list(result.notes),
    )


def sample_plan(spec: ManifoldSpec, seed: Optional[int] = None, grid: Optional[int] = None) -> SamplePlan:
    """Plan de la especificación con las sobrescrituras de la CLI"""
    update = {}
    if seed is not None:
        update["seed"] = seed
    if grid is not None:
        update["grid"] = grid
    return spec.sample_plan.model_copy(update=update)


def run_suite(
    spec: ManifoldSpec,
    suite: Union[SuiteName, str, None] = SuiteName.ALL,
    tol: Optional[ToleranceConfig] = None,
    seed: Optional[int] = None,
    grid: Optional[int] = None,
    workers: Optional[int] = None,
) -> Report:
    """
    Ejecutar una suite sobre la especificación.

    Args:
        spec: especificación validada
        suite: nombre de la suite, 'all', o None para las suites declaradas
        tol: configuración de tolerancias
        seed: semilla de los puntos aleatorios (sobrescribe el plan)
        grid: puntos por eje (sobrescribe el plan)
        workers: tamaño del pool (por defecto GKV_WORKERS)

    Returns:
        Reporte con una entrada por comprobación ejecutada
    """
    runner = SuiteRunner(spec, tol or ToleranceConfig(), sample_plan(spec, seed, grid), PointPool(workers))
    return runner.run(None if suite is None else SuiteName(suite))


# =============================================================================
# 🧭 CORCHETES DE COURANT DESDE ARCHIVO
# =============================================================================

def load_sections(path: Union[str, Path]) -> SectionsFile:
    """
    Cargar un archivo de pares de secciones.

    Raises:
        SpecError: archivo ilegible o con forma inválida
    """
    path = Path(path)
    try:
        return SectionsFile.model_validate_json(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise SpecError(f"No se puede leer '{path}': {e}") from None
    except ValidationError as e:
        raise SpecShapeError(f"Archivo de secciones inválido: {e.errors()[0].get('msg')}") from None


def build_section(spec: ManifoldSpec, section: SectionSpec, name: str) -> GeneralizedSection:
    """Sección X + α desde sus expresiones (partes imaginarias opcionales)"""
    for label, entries in (("vector", section.vector), ("form", section.form),
                           ("vectorImag", section.vector_imag), ("formImag", section.form_imag)):
        if entries is not None and len(entries) != spec.dim:
            raise SpecShapeError(f"Sección '{name}.{label}' tiene {len(entries)} componentes, dim es {spec.dim}")

    def compile_entries(entries: Optional[List[str]]):
        if entries is None:
            return None
        return [parse_expr(text, spec.coords, spec.parameters) for text in entries]

    return GeneralizedSection(
        TensorField.from_expressions(FieldKind.VECTOR, compile_entries(section.vector), spec.dim,
                                     imag=compile_entries(section.vector_imag), name=f"{name}.vector"),
        TensorField.from_expressions(FieldKind.ONE_FORM, compile_entries(section.form), spec.dim,
                                     imag=compile_entries(section.form_imag), name=f"{name}.form"),
    )


def run_courant(spec: ManifoldSpec, sections: SectionsFile, seed: Optional[int] = None,
                grid: Optional[int] = None) -> CourantReport:
    """
    Corchetes de Courant de cada par en los puntos de muestreo.

    Si J₊ − J₋ es invertible en todos los puntos se informa además la norma
    de la componente transversal a L(T^ℂM, ε₊).
    """
    plan = sample_plan(spec, seed, grid)
    patch = build_patch(spec, plan)
    points = patch.sample_points(plan)
    pairs = [
        (build_section(spec, pair.u, f"pairs[{i}].u"), build_section(spec, pair.v, f"pairs[{i}].v"))
        for i, pair in enumerate(sections.pairs)
    ]
    eps_plus = None
    if spec.sampler is None:
        try:
            eps_plus = epsilon_from_quadruple(build_quadruple(spec, plan), points).plus
        except SingularCombinationError as e:
            logger.info(f"⏭️ Sin componente transversal: {e}")
    records: List[BracketRecord] = []
    worst: Optional[float] = None
    for index, (u, v) in enumerate(pairs):
        for point in points:
            bracket = courant_bracket(u, v, point)
            transverse = None
            if eps_plus is not None:
                transverse = dirac_from_epsilon(eps_plus.at(point).value).transverse_norm(bracket)
                worst = transverse if worst is None else max(worst, transverse)
            records.append(BracketRecord(
                pair=index,
                point=[float(x) for x in point],
                vector_real=np.real(bracket.vector).tolist(),
                vector_imag=np.imag(bracket.vector).tolist(),
                form_real=np.real(bracket.form).tolist(),
                form_imag=np.imag(bracket.form).tolist(),
                transverse_norm_plus=transverse,
            ))
    logger.info(f"🧭 {len(records)} corchetes evaluados")
    return CourantReport(
        spec_name=spec.name,
        brackets=records,
        max_transverse_norm=worst,
        toolkit_version=__version__,
    )
