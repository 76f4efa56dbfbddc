"""
Spectres, valeurs singulières et échantillons d'exposants
"""

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Spectrum:
    """
    Valeurs propres complexes triées par module décroissant

    Égalités départagées par partie réelle puis partie imaginaire décroissantes.
    """

    eigenvalues: np.ndarray

    def __len__(self) -> int:
        return len(self.eigenvalues)

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.eigenvalues)

    @property
    def leading(self) -> complex:
        """λ₀, la valeur propre de Perron pour une matrice stochastique"""
        return complex(self.eigenvalues[0])

    @property
    def subleading(self) -> complex:
        """λ₁, la deuxième valeur propre en module"""
        return complex(self.eigenvalues[1])


@dataclass(frozen=True)
class SingularValues:
    """Valeurs singulières décroissantes"""

    values: np.ndarray

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class ExponentSample:
    """
    Exposants de stabilité (θ) et de Lyapunov (ϑ) d'une réplique

    Un exposant dégénéré (|λ₁| ou z₁ sous le plancher) vaut nan
    et son drapeau est levé.
    """

    theta: float
    vartheta: float
    t: int
    n: int
    replica_index: int
    theta_degenerate: bool = False
    vartheta_degenerate: bool = False

    @property
    def degenerate(self) -> bool:
        return self.theta_degenerate or self.vartheta_degenerate

    @property
    def finite(self) -> bool:
        return math.isfinite(self.theta) and math.isfinite(self.vartheta)
