"""
Quadrature adaptative
Règle de Gauss-Legendre d'ordre fixe par cellule, subdivision de la cellule
la plus mauvaise, substitution en puissance près des extrémités singulières
"""

import heapq
import logging
import math
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from app.core.exceptions import InvalidParameterError, QuadratureError


logger = logging.getLogger(__name__)

Integrand = Callable[[np.ndarray], np.ndarray]


class QuadratureResult(NamedTuple):
    """Valeur de l'intégrale, estimation d'erreur et nombre de subdivisions"""
    value: float
    error: float
    subdivisions: int


@lru_cache(maxsize=32)
def gauss_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Nœuds et poids de Gauss-Legendre sur [0, 1]

    Args:
        order: Nombre de nœuds

    Returns:
        (nœuds, poids), poids de somme 1
    """
    if order < 1:
        raise InvalidParameterError(f"ordre de Gauss invalide: {order}")
    nodes, weights = leggauss(order)
    nodes = 0.5 * (nodes + 1.0)
    weights = 0.5 * weights
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def power_substitution(f: Integrand, lo: float, hi: float, power: float) -> list[Integrand]:
    """
    Découpe [lo, hi] au milieu et remplace x par lo + h·u^p (resp. hi - h·u^p)

    Chaque moitié devient une intégrale sur u ∈ [0, 1] dont l'intégrande
    s'annule comme u^(p-1) à l'extrémité d'origine, ce qui absorbe
    les singularités intégrables en puissance.

    Returns:
        Deux intégrandes sur [0, 1] dont la somme des intégrales vaut ∫ f
    """
    h = 0.5 * (hi - lo)

    def left(u: np.ndarray) -> np.ndarray:
        return f(lo + h * u**power) * (h * power * u ** (power - 1.0))

    def right(u: np.ndarray) -> np.ndarray:
        return f(hi - h * u**power) * (h * power * u ** (power - 1.0))

    return [left, right]


def adaptive_gauss(
    f: Integrand,
    lo: float,
    hi: float,
    abs_tol: float = 1e-10,
    rel_tol: float = 1e-10,
    max_subdivisions: int = 2000,
    substitution: bool = False,
    power: float = 4.0,
    order: int = 10,
) -> QuadratureResult:
    """
    Intègre f (vectorisée) sur [lo, hi]

    Chaque cellule est estimée par la somme des règles de Gauss sur ses deux
    moitiés; l'écart avec la règle sur la cellule entière sert d'estimation
    d'erreur. La cellule de plus grande erreur est subdivisée jusqu'à ce que
    l'erreur totale passe sous max(abs_tol, rel_tol·|I|).

    Args:
        f: Fonction vectorisée (ndarray -> ndarray)
        lo: Borne inférieure
        hi: Borne supérieure
        abs_tol: Tolérance absolue
        rel_tol: Tolérance relative
        max_subdivisions: Nombre maximal de subdivisions
        substitution: Substitution en puissance aux deux extrémités
        power: Exposant de la substitution
        order: Ordre de la règle de Gauss

    Returns:
        QuadratureResult

    Raises:
        QuadratureError: Tolérance non atteinte après max_subdivisions
    """
    if abs_tol <= 0 or rel_tol <= 0:
        raise InvalidParameterError("les tolérances de quadrature doivent être > 0")
    if hi == lo:
        return QuadratureResult(0.0, 0.0, 0)
    if hi < lo:
        result = adaptive_gauss(f, hi, lo, abs_tol, rel_tol, max_subdivisions, substitution, power, order)
        return QuadratureResult(-result.value, result.error, result.subdivisions)

    nodes, weights = gauss_rule(order)

    def rule(g: Integrand, a: float, b: float) -> float:
        width = b - a
        return float(width * np.dot(weights, g(a + width * nodes)))

    def split(g: Integrand, a: float, b: float, whole: float) -> tuple[float, float, float, float]:
        mid = 0.5 * (a + b)
        left = rule(g, a, mid)
        right = rule(g, mid, b)
        return left, right, left + right, abs(whole - left - right)

    if substitution:
        pieces = [(g, 0.0, 1.0) for g in power_substitution(f, lo, hi, power)]
    else:
        pieces = [(f, lo, hi)]

    # Tas (−erreur, compteur, intégrande, a, b, gauche, droite)
    heap: list = []
    counter = 0
    total = 0.0
    total_error = 0.0
    for g, a, b in pieces:
        left, right, value, error = split(g, a, b, rule(g, a, b))
        heapq.heappush(heap, (-error, counter, g, a, b, left, right))
        counter += 1
        total += value
        total_error += error

    subdivisions = 0
    while total_error > max(abs_tol, rel_tol * abs(total)):
        if subdivisions >= max_subdivisions:
            raise QuadratureError(
                f"quadrature non convergée sur [{lo}, {hi}] après {subdivisions} subdivisions "
                f"(erreur estimée {total_error:.3e})",
                error_estimate=total_error,
            )
        neg_error, _, g, a, b, left_whole, right_whole = heapq.heappop(heap)
        total -= left_whole + right_whole
        total_error += neg_error

        mid = 0.5 * (a + b)
        for (ca, cb, whole) in ((a, mid, left_whole), (mid, b, right_whole)):
            left, right, value, error = split(g, ca, cb, whole)
            heapq.heappush(heap, (-error, counter, g, ca, cb, left, right))
            counter += 1
            total += value
            total_error += error
        subdivisions += 1

    # Somme finale recalculée pour éviter la dérive des mises à jour incrémentales
    value = math.fsum(entry[5] + entry[6] for entry in heap)
    logger.debug("quadrature [%s, %s]: %d subdivisions, erreur %.3e", lo, hi, subdivisions, total_error)
    return QuadratureResult(value, total_error, subdivisions)


def fixed_gauss(f: Integrand, lo: np.ndarray, hi: np.ndarray, order: int) -> np.ndarray:
    """
    Règle de Gauss d'ordre fixe sur des intervalles en tableau

    f reçoit un tableau de forme lo.shape + (order,) et doit renvoyer
    un tableau de même forme.

    Returns:
        Intégrales, de forme lo.shape
    """
    nodes, weights = gauss_rule(order)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    width = (hi - lo)[..., None]
    x = lo[..., None] + width * nodes
    return np.sum(f(x) * weights, axis=-1) * (hi - lo)
