"""
Observations d'un ensemble à un instant t, empilées par réplique
"""

from dataclasses import dataclass, fields
from typing import Optional, Sequence

import numpy as np


@dataclass
class TimeSlice:
    """
    Observables de toutes les répliques au temps t

    Les lignes sont dans l'ordre des indices de réplique. Une valeur
    dégénérée ou un calcul non convergé est représenté par nan.

    Attributes:
        t: Temps
        replicas: Indices de réplique
        columns: Produits U(t), forme (R, n, n)
        distance: d₁₂, forme (R,)
        theta: Exposants de stabilité
        vartheta: Exposants de Lyapunov
        spectra: Spectres bruts, forme (R, n), complexes
        lambda1: |λ₁|
        perron: Vecteurs de Perron, forme (R, n)
        violations: Échantillons d'exposants non dégénérés <= 0
    """

    t: int
    replicas: np.ndarray
    columns: Optional[np.ndarray] = None
    distance: Optional[np.ndarray] = None
    theta: Optional[np.ndarray] = None
    vartheta: Optional[np.ndarray] = None
    spectra: Optional[np.ndarray] = None
    lambda1: Optional[np.ndarray] = None
    perron: Optional[np.ndarray] = None
    violations: int = 0

    def __len__(self) -> int:
        return int(self.replicas.size)

    @classmethod
    def concat(cls, parts: Sequence["TimeSlice"]) -> "TimeSlice":
        """Concaténation dans l'ordre des morceaux"""
        first = parts[0]
        merged = {}
        for spec in fields(cls):
            name = spec.name
            if name == "t":
                merged[name] = first.t
            elif name == "violations":
                merged[name] = sum(part.violations for part in parts)
            elif getattr(first, name) is None:
                merged[name] = None
            else:
                merged[name] = np.concatenate([getattr(part, name) for part in parts])
        return cls(**merged)

    @property
    def u11(self) -> Optional[np.ndarray]:
        return None if self.columns is None else self.columns[:, 0, 0]
