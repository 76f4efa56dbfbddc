"""
Module schemas - Schemas Pydantic
"""

from app.schemas.fit import FitFamily, FitResult
from app.schemas.run import ArtifactEntry, Observable, RunConfig, RunManifest


__all__ = [
    "FitFamily",
    "FitResult",
    "ArtifactEntry",
    "Observable",
    "RunConfig",
    "RunManifest",
]
