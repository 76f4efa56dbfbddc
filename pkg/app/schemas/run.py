"""
Schemas Pydantic pour les runs
Configuration d'un ensemble et manifeste des fichiers produits
"""

import enum
from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel, Field, field_validator

from app.core.config import settings


class Observable(str, enum.Enum):
    """Observables enregistrées par réplique"""
    COLUMNS = "columns"
    DISTANCE = "distance"
    EXPONENTS = "exponents"
    SPECTRUM = "spectrum"
    PERRON = "perron"
    CURVE = "curve"


# ===== Configuration =====
class RunConfig(BaseModel):
    """Configuration d'un ensemble de répliques"""
    n: int = Field(..., ge=2, le=256, description="Dimension")
    a: float = Field(..., gt=0, description="Concentration de Dirichlet")
    t_values: list[int] = Field(..., min_length=1, description="Temps observés")
    replicas: int = Field(default=settings.DEFAULT_REPLICAS, ge=1, description="Nombre de répliques")
    master_seed: int = Field(default=settings.DEFAULT_SEED, ge=0, lt=2**64, description="Graine maître")
    observables: list[Observable] = Field(
        default_factory=lambda: [Observable.COLUMNS], min_length=1, description="Observables"
    )
    bins: Optional[int] = Field(None, ge=1, description="Nombre de classes des histogrammes")
    eps_real: float = Field(default=settings.EPS_REAL, gt=0, description="Demi-largeur de la bande réelle")
    output_dir: Path = Field(default=settings.OUTPUT_DIR, description="Répertoire de sortie")
    emit_svg: bool = Field(default=settings.EMIT_SVG, description="Produire les SVG")
    renormalize_columns: bool = Field(default=settings.RENORMALIZE_COLUMNS, description="Renormaliser à chaque pas")
    homogeneous: bool = Field(default=False, description="Chaîne homogène M^t")
    workers: int = Field(default=settings.WORKERS, ge=1, description="Processus")

    @field_validator("t_values")
    @classmethod
    def validate_t_values(cls, v: list[int]) -> list[int]:
        """Temps >= 1 strictement croissants"""
        if any(t < 1 for t in v):
            raise ValueError("les temps doivent être >= 1")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("les temps doivent être strictement croissants")
        return v

    @field_validator("observables")
    @classmethod
    def validate_observables(cls, v: list[Observable]) -> list[Observable]:
        """Ordre canonique sans doublons"""
        order = list(Observable)
        return sorted(set(v), key=order.index)

    def wants(self, observable: Observable) -> bool:
        return observable in self.observables


# ===== Manifeste =====
class ArtifactEntry(BaseModel):
    """Fichier produit et son empreinte"""
    path: str = Field(..., description="Chemin relatif au répertoire de sortie")
    sha256: str = Field(..., min_length=64, max_length=64)
    bytes: int = Field(..., ge=0)


class RunManifest(BaseModel):
    """Manifeste d'un run (configuration, fichiers, exclusions, résumés)"""
    config: RunConfig
    figure: Optional[str] = None
    extra_configs: list[RunConfig] = Field(default_factory=list)
    artifacts: list[ArtifactEntry] = Field(default_factory=list)
    excluded: dict[str, int] = Field(default_factory=dict)
    wall_clock_seconds: float = Field(default=0.0, ge=0.0)
    library_version: str = settings.APP_VERSION
    settings_echo: dict[str, Any] = Field(default_factory=dict)
    summaries: dict[str, Any] = Field(default_factory=dict)
