"""
Configuration centrale de l'application
Gestion des variables d'environnement avec Pydantic Settings
"""

from pathlib import Path
from typing import Literal
from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Configuration globale de la simulation
    Charge automatiquement les variables depuis .env
    """

    # ===== Application =====
    APP_NAME: str = "Random Stochastic Products"
    APP_VERSION: str = "1.0.0"
    ENVIRONMENT: str = "development"
    DEBUG: bool = False

    # ===== Ensembles =====
    DEFAULT_REPLICAS: int = 100_000
    DEFAULT_SEED: int = 20_190_101
    WORKERS: int = 1
    CHUNK_SIZE: int = 2_000
    FACTOR_BATCH: int = 1_024
    FIG5_DIMENSION: int = 5

    # ===== Matrices stochastiques =====
    STOCHASTIC_TOL: float = 1e-12
    RENORMALIZE_COLUMNS: bool = False
    POWER_ITER_TOL: float = 1e-13
    POWER_ITER_MAX: int = 10_000

    # ===== Spectre =====
    LINALG_BACKEND: Literal["builtin", "numpy"] = "builtin"
    QR_SWEEPS_PER_DIM: int = 30
    JACOBI_TOL: float = 1e-15
    JACOBI_MAX_SWEEPS: int = 60
    DEGENERATE_FLOOR: float = 1e-280
    EPS_REAL: float = 0.01
    REAL_FRACTION_EXCLUDE_PERRON: bool = True
    REAL_FRACTION_ON_RESCALED: bool = True

    # ===== Quadrature =====
    QUAD_ABS_TOL: float = 1e-10
    QUAD_REL_TOL: float = 1e-10
    QUAD_MAX_SUBDIVISIONS: int = 2_000
    QUAD_SUBSTITUTION_POWER: float = 4.0
    QUAD_ORDER: int = 10
    CHECK_GRID_SIZE: int = 99
    TRANSFER_NODES: int = 2_000
    REFERENCE_NODES: int = 400

    # ===== Ajustements =====
    MLE_MAX_ITER: int = 200
    MLE_TOL: float = 1e-12
    MIN_FIT_SAMPLES: int = 10

    # ===== Sorties =====
    OUTPUT_DIR: Path = Path("results")
    EMIT_SVG: bool = False

    # ===== Logging =====
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: Literal["console", "json"] = "console"
    LOG_FILE: str | None = None

    @field_validator(
        "WORKERS", "CHUNK_SIZE", "FACTOR_BATCH", "DEFAULT_REPLICAS", "FIG5_DIMENSION", "REFERENCE_NODES"
    )
    @classmethod
    def validate_positive_int(cls, v: int) -> int:
        """Les tailles et nombres de processus sont strictement positifs"""
        if v < 1:
            raise ValueError("la valeur doit être >= 1")
        return v

    @field_validator("DEGENERATE_FLOOR", "EPS_REAL", "QUAD_ABS_TOL", "QUAD_REL_TOL", "STOCHASTIC_TOL")
    @classmethod
    def validate_positive_float(cls, v: float) -> float:
        """Les tolérances sont strictement positives"""
        if v <= 0:
            raise ValueError("la tolérance doit être > 0")
        return v

    @field_validator("LOG_LEVEL")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Niveau de log reconnu par le module logging"""
        level = v.upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"niveau de log inconnu: {v}")
        return level

    # Configuration Pydantic
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore"
    )

    @property
    def use_numpy_linalg(self) -> bool:
        """Délègue les noyaux denses à LAPACK via numpy.linalg"""
        return self.LINALG_BACKEND == "numpy"


# Instance globale des settings
settings = Settings()
