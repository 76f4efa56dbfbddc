"""
Description d'une figure statique (barres, courbes, nuages de points)
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from app.core.exceptions import InvalidArgumentError
from app.models.histogram import Histogram


@dataclass(frozen=True)
class Series:
    """Série nommée de points (x, y)"""

    label: str
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.shape != y.shape:
            raise InvalidArgumentError(f"série {self.label}: x et y de formes différentes")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)


@dataclass(frozen=True)
class PlotSpec:
    """
    Attributes:
        title: Titre
        xlabel: Légende de l'axe x
        ylabel: Légende de l'axe y
        bars: Histogramme tracé en barres
        lines: Courbes superposées
        points: Nuages de points
        unit_circle: Tracer le cercle unité (plans complexes)
    """

    title: str
    xlabel: str
    ylabel: str
    bars: Optional[Histogram] = None
    lines: tuple[Series, ...] = field(default_factory=tuple)
    points: tuple[Series, ...] = field(default_factory=tuple)
    unit_circle: bool = False
