"""
Validateurs réutilisables
Vérification des domaines de paramètres avant les calculs
"""

import math
from typing import Sequence

import numpy as np

from app.core.exceptions import InvalidArgumentError, InvalidParameterError


def require_positive(value: float, name: str) -> float:
    """
    Vérifie qu'un paramètre réel est strictement positif et fini

    Args:
        value: Valeur à vérifier
        name: Nom du paramètre (pour le message d'erreur)

    Returns:
        La valeur convertie en float

    Raises:
        InvalidParameterError: Si la valeur est <= 0 ou non finie
    """
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise InvalidParameterError(f"{name} doit être > 0 (reçu {value})")
    return value


def require_unit_interval(value: float, name: str, open_interval: bool = False) -> float:
    """Vérifie que value est dans [0, 1] (ou ]0, 1[)"""
    value = float(value)
    if open_interval:
        if not 0.0 < value < 1.0:
            raise InvalidParameterError(f"{name} doit être dans ]0, 1[ (reçu {value})")
    elif not 0.0 <= value <= 1.0:
        raise InvalidParameterError(f"{name} doit être dans [0, 1] (reçu {value})")
    return value


def require_dimension(n: int, minimum: int = 2) -> int:
    """Vérifie une dimension entière >= minimum"""
    if int(n) != n or n < minimum:
        raise InvalidParameterError(f"la dimension doit être un entier >= {minimum} (reçu {n})")
    return int(n)


def require_time(t: int, minimum: int = 1) -> int:
    """Vérifie un temps entier >= minimum"""
    if int(t) != t or t < minimum:
        raise InvalidParameterError(f"t doit être un entier >= {minimum} (reçu {t})")
    return int(t)


def require_square(matrix: np.ndarray) -> np.ndarray:
    """Vérifie une matrice carrée réelle à entrées finies"""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] < 1:
        raise InvalidArgumentError(f"matrice carrée attendue (forme {matrix.shape})")
    if not np.all(np.isfinite(matrix)):
        raise InvalidArgumentError("la matrice contient des valeurs non finies")
    return matrix


def require_samples(samples: Sequence[float], minimum: int = 1, name: str = "samples") -> np.ndarray:
    """
    Convertit un échantillon en tableau 1D fini

    Raises:
        InvalidArgumentError: Échantillon trop court ou valeurs non finies
    """
    values = np.asarray(samples, dtype=float).ravel()
    if values.size < minimum:
        raise InvalidArgumentError(f"{name}: au moins {minimum} valeurs requises (reçu {values.size})")
    if not np.all(np.isfinite(values)):
        raise InvalidArgumentError(f"{name}: valeurs non finies")
    return values
