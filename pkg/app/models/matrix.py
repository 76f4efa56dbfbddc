"""
Matrices stochastiques, vecteurs de probabilité et enregistrements de chaîne
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from app.core.exceptions import InvalidArgumentError
from app.utils.linalg import householder_basis


# Tolérance de base, multipliée par max(1, t) pour un produit de t facteurs
BASE_TOL = 1e-12


def deflate_stack(entries: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    c = Qᵀ M e et B = Qᵀ (M - M[:, 0]·1ᵀ) Q pour une pile (K, n, n)

    Returns:
        (c de forme (K, n-1), B de forme (K, n-1, n-1))
    """
    n = entries.shape[-1]
    basis = householder_basis(n)
    e = basis[:, 0]
    q = basis[:, 1:]
    differences = entries - entries[:, :, :1]
    c = (entries @ e) @ q
    block = q.T @ differences @ q
    return c, block


@dataclass(frozen=True)
class DeflatedForm:
    """
    Forme de M dans la base H = [e, Q] (e = 1/√n)

    Toute matrice stochastique vérifie 1ᵀM = 1ᵀ, donc Hᵀ M H = [[1, 0], [c, B]].
    B est l'action de M sur le sous-espace de somme nulle; c'est lui qui
    porte les quantités qui décroissent exponentiellement dans U(t).
    """

    c: np.ndarray
    block: np.ndarray

    @classmethod
    def of(cls, entries: np.ndarray) -> "DeflatedForm":
        """
        B est calculé sur les différences de colonnes M - M[:, 0]·1ᵀ

        Qᵀ1 = 0 rend les deux écritures égales en arithmétique exacte; avec
        les différences, des colonnes identiques donnent B = 0 exactement.
        """
        c, block = deflate_stack(np.asarray(entries, dtype=float)[np.newaxis])
        return cls(c=c[0], block=block[0])

    @classmethod
    def stack(cls, entries: np.ndarray) -> tuple["DeflatedForm", ...]:
        """Formes déflatées d'une pile (K, n, n) de matrices"""
        c, block = deflate_stack(entries)
        return tuple(cls(c=ci, block=bi) for ci, bi in zip(c, block))

    def compose(self, right: "DeflatedForm") -> "DeflatedForm":
        """Forme du produit self · right"""
        return DeflatedForm(c=self.c + self.block @ right.c, block=self.block @ right.block)

    def full(self) -> np.ndarray:
        """Matrice [[1, 0], [c, B]] complète"""
        m = self.block.shape[0] + 1
        out = np.zeros((m, m))
        out[0, 0] = 1.0
        out[1:, 0] = self.c
        out[1:, 1:] = self.block
        return out

    def entries(self) -> np.ndarray:
        """Reconstruction H · [[1, 0], [c, B]] · Hᵀ"""
        basis = householder_basis(self.block.shape[0] + 1)
        return basis @ self.full() @ basis.T


@dataclass(frozen=True)
class StochasticMatrix:
    """
    Matrice stochastique par colonnes

    entries[i, j] est la probabilité de transition j -> i. steps est le
    nombre de facteurs du produit (tolérance 1e-12·max(1, steps)).

    Attributes:
        entries: Tableau n×n
        deflated: Forme déflatée optionnelle (voir DeflatedForm)
        steps: Nombre de facteurs
    """

    entries: np.ndarray
    deflated: Optional[DeflatedForm] = None
    steps: int = 1

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise InvalidArgumentError(f"matrice carrée attendue (forme {entries.shape})")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def tolerance(self) -> float:
        return BASE_TOL * max(1, self.steps)

    def column_sum_error(self) -> float:
        """Écart maximal des sommes de colonnes à 1"""
        return float(np.max(np.abs(self.entries.sum(axis=0) - 1.0)))

    def is_valid(self) -> bool:
        tol = self.tolerance
        return (
            bool(np.all(np.isfinite(self.entries)))
            and bool(np.all(self.entries >= -tol))
            and bool(np.all(self.entries <= 1.0 + tol))
            and self.column_sum_error() <= tol
        )

    def validate(self) -> "StochasticMatrix":
        """
        Raises:
            InvalidArgumentError: Entrées hors de [0, 1] ou colonnes non normalisées
        """
        if not self.is_valid():
            raise InvalidArgumentError(
                f"matrice non stochastique (écart des colonnes {self.column_sum_error():.3e}, "
                f"tolérance {self.tolerance:.1e})"
            )
        return self

    @classmethod
    def from_entries(cls, entries: np.ndarray, steps: int = 1, deflate: bool = True) -> "StochasticMatrix":
        """Construit la matrice et, si demandé, sa forme déflatée"""
        entries = np.asarray(entries, dtype=float)
        deflated = DeflatedForm.of(entries) if deflate else None
        return cls(entries=entries, deflated=deflated, steps=steps)


@dataclass(frozen=True)
class ProbVector:
    """Vecteur de probabilité (entrées >= 0, somme 1 à 1e-12 près)"""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise InvalidArgumentError("vecteur 1D attendu")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def validate(self, tol: float = BASE_TOL) -> "ProbVector":
        if np.any(self.values < -tol) or abs(float(self.values.sum()) - 1.0) > tol:
            raise InvalidArgumentError(
                f"vecteur de probabilité invalide (somme {float(self.values.sum())!r})"
            )
        return self


@dataclass(frozen=True)
class ChainRecord:
    """
    Produit U(t) = M_t ··· M_1 d'une chaîne

    Attributes:
        t: Nombre de facteurs (0 pour la chaîne vide)
        product: U(t)
        snapshots: Facteurs M_1..M_t dans l'ordre, si conservés
    """

    t: int
    product: StochasticMatrix
    snapshots: Optional[tuple[StochasticMatrix, ...]] = field(default=None)
