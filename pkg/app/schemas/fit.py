"""
Schemas Pydantic pour les ajustements
Famille, paramètres et qualité d'ajustement
"""

from typing import Literal

from pydantic import BaseModel, Field


FitFamily = Literal["gamma", "beta", "gaussian"]


class FitResult(BaseModel):
    """Loi ajustée et statistique de Kolmogorov-Smirnov associée"""
    family: FitFamily = Field(..., description="Famille de loi")
    parameters: dict[str, float] = Field(..., description="Paramètres ajustés")
    log_likelihood: float = Field(..., description="Log-vraisemblance au maximum")
    ks_statistic: float = Field(..., ge=0.0, le=1.0, description="Statistique D de KS")
    p_value: float = Field(..., ge=0.0, le=1.0, description="p-valeur asymptotique")
    sample_count: int = Field(..., ge=0, description="Échantillons utilisés")
    excluded_count: int = Field(default=0, ge=0, description="Échantillons dégénérés exclus")
    method: Literal["mle", "moments"] = Field(default="mle", description="Méthode d'estimation")
    fallback: bool = Field(default=False, description="Repli sur les moments après échec de Newton")

    def param(self, name: str) -> float:
        return self.parameters[name]
