"""
Paramètres d'échantillonnage
Concentration/dimension de Dirichlet et dérivation des graines
"""

import enum
from dataclasses import dataclass

from app.core.exceptions import InvalidParameterError


class StreamLabel(int, enum.Enum):
    """Flux aléatoires indépendants d'une même réplique"""
    FACTORS = 0
    INITIAL_STATE = 1
    HOMOGENEOUS = 2


@dataclass(frozen=True)
class DirichletParams:
    """
    Paramètres de Dirichlet symétriques (tous les aᵢ égaux à a)

    Attributes:
        a: Concentration commune (> 0)
        n: Dimension (>= 2)
    """

    a: float
    n: int

    def __post_init__(self):
        if not (self.a > 0.0) or self.a == float("inf"):
            raise InvalidParameterError(f"a doit être > 0 (reçu {self.a})")
        if int(self.n) != self.n or self.n < 2:
            raise InvalidParameterError(f"n doit être un entier >= 2 (reçu {self.n})")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "n", int(self.n))

    @property
    def a0(self) -> float:
        """Concentration totale a₀ = n·a"""
        return self.n * self.a


@dataclass(frozen=True)
class SeedSpec:
    """
    Spécification d'un flux aléatoire

    Attributes:
        master_seed: Graine maître (entier 64 bits)
        replica_index: Indice de réplique (>= 0)
        stream_label: Étiquette du flux dans la réplique
    """

    master_seed: int
    replica_index: int = 0
    stream_label: int = StreamLabel.FACTORS

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**64:
            raise InvalidParameterError(f"master_seed hors de [0, 2^64) (reçu {self.master_seed})")
        if self.replica_index < 0:
            raise InvalidParameterError(f"replica_index doit être >= 0 (reçu {self.replica_index})")
        if self.stream_label < 0:
            raise InvalidParameterError(f"stream_label doit être >= 0 (reçu {self.stream_label})")
