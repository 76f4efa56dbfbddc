"""
Service d'échantillonnage
Variables Gamma, colonnes de Dirichlet et matrices stochastiques aléatoires
"""

import logging
from typing import Iterator

import numpy as np

from app.core.config import settings
from app.core.exceptions import InvalidParameterError
from app.models.matrix import DeflatedForm, ProbVector, StochasticMatrix
from app.models.params import DirichletParams, SeedSpec, StreamLabel


logger = logging.getLogger(__name__)

# Constante du test de compression de Marsaglia-Tsang
_SQUEEZE = 0.0331


def derive_generator(spec: SeedSpec) -> np.random.Generator:
    """
    Générateur reproductible d'un flux (graine, réplique, étiquette)

    SeedSequence mélange la graine maître et la clé (réplique, étiquette)
    par hachage: des clés distinctes donnent des flux indépendants.

    Args:
        spec: Spécification du flux

    Returns:
        Générateur PCG64 initialisé
    """
    sequence = np.random.SeedSequence(
        entropy=spec.master_seed,
        spawn_key=(spec.replica_index, int(spec.stream_label)),
    )
    return np.random.Generator(np.random.PCG64(sequence))


def replica_generator(master_seed: int, replica_index: int, label: StreamLabel = StreamLabel.FACTORS) -> np.random.Generator:
    """Raccourci de derive_generator pour une réplique"""
    return derive_generator(SeedSpec(master_seed, replica_index, label))


def gamma_variates(shape: float, size: int, gen: np.random.Generator) -> np.ndarray:
    """
    Tirages Gamma(shape, 1) par compression/rejet (Marsaglia-Tsang)

    Pour shape < 1 on tire Gamma(shape + 1) puis on multiplie par U^(1/shape).
    Les emplacements rejetés sont retirés sur place, si bien que le
    résultat ne dépend que de l'état du générateur.

    Args:
        shape: Paramètre de forme (> 0)
        size: Nombre de tirages
        gen: Générateur

    Returns:
        Tableau de size tirages

    Raises:
        InvalidParameterError: Si shape <= 0
    """
    if not shape > 0.0 or not np.isfinite(shape):
        raise InvalidParameterError(f"forme Gamma invalide: {shape}")

    boost = shape < 1.0
    alpha = shape + 1.0 if boost else shape
    d = alpha - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)

    out = np.empty(size)
    pending = np.arange(size)
    while pending.size:
        x = gen.standard_normal(pending.size)
        u = gen.random(pending.size)
        v = (1.0 + c * x) ** 3
        positive = v > 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            log_v = np.log(np.where(positive, v, 1.0))
            accept = positive & (
                (u < 1.0 - _SQUEEZE * x**4)
                | (np.log(u) < 0.5 * x * x + d * (1.0 - v + log_v))
            )
        out[pending[accept]] = d * v[accept]
        pending = pending[~accept]

    if boost:
        out *= gen.random(size) ** (1.0 / shape)
    return out


def gamma_sample(shape: float, gen: np.random.Generator) -> float:
    """Un tirage Gamma(shape, 1)"""
    return float(gamma_variates(shape, 1, gen)[0])


def dirichlet_column(params: DirichletParams, gen: np.random.Generator) -> np.ndarray:
    """
    Vecteur de probabilité de loi Dirichlet(a, ..., a)

    n tirages Gamma(a) normalisés par leur somme, puis renormalisés pour que
    la somme vaille 1 à la précision machine. Une somme nulle (possible
    pour a très petit) provoque un nouveau tirage.
    """
    while True:
        draws = gamma_variates(params.a, params.n, gen)
        total = draws.sum()
        if total > 0.0:
            break
        logger.debug("somme Gamma nulle, nouveau tirage de colonne")
    column = draws / total
    return column / column.sum()


def random_stochastic_matrices(
    params: DirichletParams,
    count: int,
    gen: np.random.Generator,
    deflate: bool = True,
) -> tuple[StochasticMatrix, ...]:
    """
    count matrices stochastiques à colonnes de Dirichlet indépendantes

    Les count·n² tirages Gamma sont faits en un seul lot; la colonne j de
    la matrice k reçoit les tirages (k·n + j)·n .. (k·n + j + 1)·n - 1.
    Les formes déflatées sont calculées sur toute la pile à la fois.

    Args:
        params: Paramètres de Dirichlet
        count: Nombre de matrices (>= 1)
        gen: Générateur
        deflate: Calculer aussi les formes déflatées

    Returns:
        Tuple de StochasticMatrix dans l'ordre des tirages

    Raises:
        InvalidParameterError: Si count < 1
    """
    if count < 1:
        raise InvalidParameterError(f"nombre de matrices invalide: {count}")
    n = params.n
    entries = gamma_variates(params.a, count * n * n, gen).reshape(count, n, n).transpose(0, 2, 1).copy()
    totals = entries.sum(axis=1)
    for k, j in zip(*np.nonzero(totals <= 0.0)):
        entries[k, :, j] = dirichlet_column(params, gen)
        totals[k, j] = 1.0
    entries /= totals[:, np.newaxis, :]
    entries /= entries.sum(axis=1)[:, np.newaxis, :]
    if not deflate:
        return tuple(StochasticMatrix(entries=m, steps=1) for m in entries)
    forms = DeflatedForm.stack(entries)
    return tuple(StochasticMatrix(entries=m, deflated=form, steps=1) for m, form in zip(entries, forms))


def random_stochastic_matrix(
    params: DirichletParams,
    gen: np.random.Generator,
    deflate: bool = True,
) -> StochasticMatrix:
    """
    Matrice stochastique à colonnes de Dirichlet indépendantes

    Les n² tirages Gamma sont faits en un seul lot; la colonne j reçoit les
    tirages j·n .. (j+1)·n - 1.
    """
    return random_stochastic_matrices(params, 1, gen, deflate=deflate)[0]


def factor_batch_size(n: int) -> int:
    """Nombre de matrices tirées par lot (settings.FACTOR_BATCH variables Gamma)"""
    return max(1, settings.FACTOR_BATCH // (n * n))


def iter_random_matrices(
    params: DirichletParams,
    gen: np.random.Generator,
    deflate: bool = True,
) -> Iterator[StochasticMatrix]:
    """
    Suite infinie de facteurs, tirés par lots de factor_batch_size(n)

    La taille des lots ne dépend que de n: la suite produite par un
    générateur donné ne dépend pas du nombre de facteurs consommés.
    """
    count = factor_batch_size(params.n)
    while True:
        yield from random_stochastic_matrices(params, count, gen, deflate=deflate)


def random_probability_vector(n: int, gen: np.random.Generator) -> ProbVector:
    """État initial uniforme sur le simplexe (Dirichlet a = 1)"""
    return ProbVector(dirichlet_column(DirichletParams(a=1.0, n=n), gen))
