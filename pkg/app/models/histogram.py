"""
Histogramme normalisé en densité
"""

from dataclasses import dataclass

import numpy as np

from app.core.exceptions import InvalidArgumentError


@dataclass(frozen=True)
class Histogram:
    """
    Attributes:
        edges: Bornes des classes, strictement croissantes
        densities: Densité par classe (Σ densité·largeur = 1)
        count: Nombre d'échantillons
    """

    edges: np.ndarray
    densities: np.ndarray
    count: int

    def __post_init__(self):
        if self.edges.ndim != 1 or self.edges.size < 2 or np.any(np.diff(self.edges) <= 0):
            raise InvalidArgumentError("bornes de classes non strictement croissantes")
        if self.densities.shape != (self.edges.size - 1,):
            raise InvalidArgumentError("une densité par classe attendue")

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def mass(self) -> float:
        return float(np.sum(self.densities * self.widths))
