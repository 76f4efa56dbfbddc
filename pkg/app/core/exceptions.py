"""
Exceptions de l'application
Chaque erreur porte un message (detail) et le code de sortie de la CLI
"""

from pathlib import Path
from typing import Optional


class SimulationError(Exception):
    """Classe de base de toutes les erreurs métier"""

    exit_code: int = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class InvalidParameterError(SimulationError, ValueError):
    """Paramètre hors de son domaine (a <= 0, n < 2, forme <= 0...)"""

    exit_code = 2


class InvalidArgumentError(SimulationError, ValueError):
    """Argument mal formé (dimensions, indices, échantillons dégénérés)"""

    exit_code = 2


class UsageError(SimulationError):
    """Configuration de run invalide ou figure inconnue"""

    exit_code = 2


class NumericalFailureError(SimulationError):
    """
    Échec de convergence d'un algorithme itératif

    Attributes:
        residual: Résidu ou estimation d'erreur atteint au moment de l'échec
    """

    exit_code = 3

    def __init__(self, detail: str, residual: Optional[float] = None):
        super().__init__(detail)
        self.residual = residual


class QuadratureError(NumericalFailureError):
    """Échec de la quadrature adaptative"""

    def __init__(self, detail: str, error_estimate: Optional[float] = None):
        super().__init__(detail, residual=error_estimate)
        self.error_estimate = error_estimate


class OutputError(SimulationError):
    """Erreur d'entrée/sortie sur un fichier produit"""

    exit_code = 4

    def __init__(self, detail: str, path: Optional[Path] = None):
        super().__init__(f"{detail} ({path})" if path is not None else detail)
        self.path = path
