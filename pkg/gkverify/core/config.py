"""
⚙️ Configuración del Verificador

Este módulo maneja la configuración del toolkit: parámetros de ejecución
leídos del entorno (solo GKV_WORKERS), tolerancias centralizadas y el plan
de muestreo por defecto.
"""

import os
from typing import Any, Dict, Optional

from dotenv import load_dotenv
from pydantic import AliasChoices, BaseModel, ConfigDict, Field
from pydantic_settings import BaseSettings, SettingsConfigDict

# Cargar variables de entorno
load_dotenv()


class ToleranceConfig(BaseModel):
    """Tolerancias centralizadas de todas las comprobaciones"""

    model_config = ConfigDict(populate_by_name=True, frozen=True)

    algebraic: float = Field(default=1e-10, gt=0, description="Identidades puramente algebraicas")
    derivative: float = Field(default=1e-8, gt=0, description="Identidades con derivadas")
    cluster_tol: float = Field(default=1e-6, gt=0, alias="clusterTol",
                               description="Ancho de agrupamiento de autovalores")
    frame_drop: float = Field(default=1e-6, gt=0, alias="frameDrop",
                              description="Umbral para descartar vectores casi nulos")
    a_margin: float = Field(default=1e-6, gt=0, alias="aMargin",
                            description="Margen de |a| < 1 en el régimen escalar")
    almost_complex: float = Field(default=1e-10, gt=0, alias="almostComplex")
    dirac_rank: float = Field(default=1e-9, gt=0, alias="diracRank")
    closed_b: float = Field(default=1e-10, gt=0, alias="closedB",
                            description="Tolerancia de dB en transformaciones B")
    invertibility: float = Field(default=1e-9, gt=0,
                                 description="Valor singular mínimo de J₊ ± J₋ para tratarla como invertible")
    nijenhuis_floor: float = Field(default=1e-8, gt=0, alias="nijenhuisFloor",
                                   description="Cota inferior de la tolerancia J² = −1 al evaluar Nijenhuis")
    implication_parallel: float = Field(default=1e-8, gt=0, alias="implicationParallel",
                                        description="Residuo ∇P bajo el cual una banda cuenta como paralela")
    implication_foliation: float = Field(default=1e-7, gt=0, alias="implicationFoliation",
                                         description="Residuo máximo de Frobenius y foliación exigido a bandas paralelas")

    def with_override(self, tol: Optional[float]) -> "ToleranceConfig":
        """Aplicar --tol a las tolerancias de residuos"""
        if tol is None:
            return self
        return self.model_copy(update={"algebraic": tol, "derivative": tol})


class SamplingDefaults(BaseModel):
    """Plan de muestreo por defecto"""

    model_config = ConfigDict(frozen=True)

    grid: int = Field(default=5, ge=1)
    random: int = Field(default=64, ge=0)
    interior_offset: float = Field(default=0.05, ge=0, lt=0.5)
    max_grid_points: int = Field(default=4096, ge=1)
    pregrid: int = Field(default=3, ge=1, description="Puntos por eje de la pre-malla de carga")
    pregrid_max_points: int = Field(default=729, ge=1, description="Tope de puntos de la pre-malla")


class VerifierSettings(BaseSettings):
    """Configuración de ejecución (entorno y .env); solo lee GKV_WORKERS"""

    model_config = SettingsConfigDict(env_file=".env", extra="ignore", populate_by_name=True)

    # =============================================================================
    # 🧵 POOL DE TRABAJO
    # =============================================================================
    workers: int = Field(
        default_factory=lambda: min(8, os.cpu_count() or 1),
        ge=1,
        validation_alias=AliasChoices("GKV_WORKERS", "workers"),
    )

    @property
    def sampling(self) -> SamplingDefaults:
        """Plan de muestreo por defecto (no se lee del entorno)"""
        return SamplingDefaults()

    def get_system_info(self) -> Dict[str, Any]:
        """Obtener información de la configuración"""
        return {
            "workers": self.workers,
            "tolerances": ToleranceConfig().model_dump(by_alias=True),
            "sampling": self.sampling.model_dump(),
        }


# Instancia global de configuración
_config: Optional[VerifierSettings] = None


def get_config() -> VerifierSettings:
    """Obtener configuración global"""
    global _config
    if _config is None:
        _config = VerifierSettings()
    return _config


def reload_config() -> VerifierSettings:
    """Recargar configuración"""
    global _config
    _config = VerifierSettings()
    return _config
