"""
Densités sur [0, 1] (ou [0, ∞)) et spécification de quadrature
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from app.core.config import settings
from app.core.exceptions import InvalidParameterError


DensityCallable = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class DensityFn:
    """
    Densité évaluable, étiquetée par sa famille et ses paramètres

    Attributes:
        family: Étiquette ("beta", "p2", "gamma", "tabulated"...)
        params: Paramètres déclarés
        pdf: Fonction vectorisée
        cdf: Fonction de répartition, si connue
        support: Bornes du support
    """

    family: str
    params: tuple[float, ...]
    pdf: DensityCallable = field(repr=False)
    cdf: Optional[DensityCallable] = field(default=None, repr=False)
    support: tuple[float, float] = (0.0, 1.0)

    def __call__(self, x):
        values = self.pdf(np.asarray(x, dtype=float))
        return float(values) if np.ndim(values) == 0 else values


@dataclass(frozen=True)
class QuadratureSpec:
    """
    Paramètres de la quadrature adaptative

    Attributes:
        abs_tol: Tolérance absolue (> 0)
        rel_tol: Tolérance relative (> 0)
        max_subdivisions: Nombre maximal de subdivisions
        substitution: Substitution en puissance près des extrémités
        power: Exposant de la substitution
        order: Ordre de la règle de Gauss
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000
    substitution: bool = False
    power: float = 4.0
    order: int = 10

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise InvalidParameterError("les tolérances de quadrature doivent être > 0")
        if self.max_subdivisions < 1:
            raise InvalidParameterError("max_subdivisions doit être >= 1")
        if not self.power >= 1.0:
            raise InvalidParameterError("l'exposant de substitution doit être >= 1")

    @classmethod
    def from_settings(cls, substitution: bool = False) -> "QuadratureSpec":
        return cls(
            abs_tol=settings.QUAD_ABS_TOL,
            rel_tol=settings.QUAD_REL_TOL,
            max_subdivisions=settings.QUAD_MAX_SUBDIVISIONS,
            substitution=substitution,
            power=settings.QUAD_SUBSTITUTION_POWER,
            order=settings.QUAD_ORDER,
        )

    def with_substitution(self) -> "QuadratureSpec":
        return QuadratureSpec(
            abs_tol=self.abs_tol,
            rel_tol=self.rel_tol,
            max_subdivisions=self.max_subdivisions,
            substitution=True,
            power=self.power,
            order=self.order,
        )
