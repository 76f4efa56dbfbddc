"""
Service des chaînes
Produits U(t) = M_t ··· M_1, évolution d'une population, distance entre
colonnes et vecteur de Perron
"""

import logging
from itertools import islice
from typing import Iterator, Optional, Sequence

import numpy as np

from app.core.config import settings
from app.core.exceptions import InvalidArgumentError, NumericalFailureError
from app.models.matrix import ChainRecord, DeflatedForm, ProbVector, StochasticMatrix
from app.models.params import DirichletParams
from app.services.sampler import iter_random_matrices, random_stochastic_matrix
from app.utils.linalg import householder_basis
from app.utils.validators import require_time


logger = logging.getLogger(__name__)


def identity(n: int) -> StochasticMatrix:
    """Matrice identité (produit vide, t = 0)"""
    deflated = DeflatedForm(c=np.zeros(n - 1), block=np.eye(n - 1))
    return StochasticMatrix(entries=np.eye(n), deflated=deflated, steps=0)


def multiply(left: StochasticMatrix, right: StochasticMatrix) -> StochasticMatrix:
    """
    Produit left · right

    Les formes déflatées sont composées par blocs quand les deux
    opérandes en portent une.

    Raises:
        InvalidArgumentError: Dimensions différentes
    """
    if left.n != right.n:
        raise InvalidArgumentError(f"dimensions incompatibles: {left.n} et {right.n}")
    deflated = None
    if left.deflated is not None and right.deflated is not None:
        deflated = left.deflated.compose(right.deflated)
    return StochasticMatrix(
        entries=left.entries @ right.entries,
        deflated=deflated,
        steps=left.steps + right.steps,
    )


def _renormalized(matrix: StochasticMatrix) -> StochasticMatrix:
    """Colonnes ramenées à une somme 1; la forme déflatée est recalculée sur les nouvelles entrées"""
    entries = matrix.entries / matrix.entries.sum(axis=0)
    return StochasticMatrix.from_entries(entries, steps=matrix.steps, deflate=matrix.deflated is not None)


def iter_chain(
    params: DirichletParams,
    gen: np.random.Generator,
    keep_snapshots: bool = False,
    renormalize: Optional[bool] = None,
    deflate: bool = True,
) -> Iterator[ChainRecord]:
    """
    Chaîne paresseuse: produit successivement U(1), U(2), ...

    Chaque nouveau facteur multiplie à gauche. Les facteurs sont tirés par
    lots (iter_random_matrices); le k-ième élément est identique à
    chain_product(params, k, gen) pour un même générateur.

    Args:
        params: Paramètres de Dirichlet
        gen: Générateur (consommé)
        keep_snapshots: Conserver les facteurs
        renormalize: Renormaliser les colonnes à chaque pas
            (défaut: settings.RENORMALIZE_COLUMNS)
        deflate: Propager la forme déflatée
    """
    renormalize = settings.RENORMALIZE_COLUMNS if renormalize is None else renormalize
    product = identity(params.n)
    factors: list[StochasticMatrix] = []
    t = 0
    for factor in iter_random_matrices(params, gen, deflate=deflate):
        product = multiply(factor, product) if t else factor
        if renormalize:
            product = _renormalized(product)
        t += 1
        if keep_snapshots:
            factors.append(factor)
        yield ChainRecord(t=t, product=product, snapshots=tuple(factors) if keep_snapshots else None)


def chain_product(
    params: DirichletParams,
    t: int,
    gen: np.random.Generator,
    keep_snapshots: bool = False,
    renormalize: Optional[bool] = None,
) -> ChainRecord:
    """
    U(t) = M_t ··· M_2 M_1 avec des facteurs indépendants

    Args:
        params: Paramètres de Dirichlet
        t: Nombre de facteurs (>= 1)
        gen: Générateur
        keep_snapshots: Conserver les facteurs M_1..M_t
        renormalize: Renormalisation des colonnes à chaque pas

    Returns:
        ChainRecord
    """
    t = require_time(t)
    chain = iter_chain(params, gen, keep_snapshots=keep_snapshots, renormalize=renormalize)
    return next(islice(chain, t - 1, None))


def homogeneous_chain(
    params: DirichletParams,
    t: int,
    gen: np.random.Generator,
) -> ChainRecord:
    """Chaîne homogène U(t) = M^t avec un seul tirage M"""
    t = require_time(t)
    factor = random_stochastic_matrix(params, gen)
    product = factor
    for _ in range(t - 1):
        product = multiply(factor, product)
    return ChainRecord(t=t, product=product)


def iter_homogeneous_chain(params: DirichletParams, gen: np.random.Generator) -> Iterator[ChainRecord]:
    """Version paresseuse de homogeneous_chain: M, M², M³..."""
    factor = random_stochastic_matrix(params, gen)
    product = factor
    t = 1
    while True:
        yield ChainRecord(t=t, product=product)
        product = multiply(factor, product)
        t += 1


def fold_snapshots(snapshots: Sequence[StochasticMatrix]) -> StochasticMatrix:
    """
    Repli à gauche des facteurs: M_1 d'abord, chaque suivant à gauche

    Raises:
        InvalidArgumentError: Liste vide
    """
    if not snapshots:
        raise InvalidArgumentError("aucun facteur à replier")
    product = snapshots[0]
    for factor in snapshots[1:]:
        product = multiply(factor, product)
    return product


def evolve(p0: ProbVector, record: ChainRecord) -> ProbVector:
    """
    p(t) = U(t) · p(0)

    Raises:
        InvalidArgumentError: Dimensions différentes
    """
    if p0.n != record.product.n:
        raise InvalidArgumentError(f"dimensions incompatibles: {p0.n} et {record.product.n}")
    if record.t == 0:
        return p0
    return ProbVector(record.product.entries @ p0.values)


def column_distance(matrix: StochasticMatrix, i: int, j: int) -> float:
    """
    d_ij = |U_{1,i} - U_{1,j}|

    Avec la forme déflatée, d_ij = |Q₁ · B (Q_i - Q_j)| où Q_k est la ligne k
    de la base du sous-espace de somme nulle: la différence est calculée
    avec une précision relative même quand elle est très petite.

    Raises:
        InvalidArgumentError: Indice hors de [0, n)
    """
    n = matrix.n
    for index in (i, j):
        if not 0 <= index < n:
            raise InvalidArgumentError(f"indice de colonne hors limites: {index} (n={n})")
    if i == j:
        return 0.0
    if matrix.deflated is None:
        return abs(float(matrix.entries[0, i] - matrix.entries[0, j]))
    q = householder_basis(n)[:, 1:]
    return abs(float(q[0] @ (matrix.deflated.block @ (q[i] - q[j]))))


def perron_vector(
    matrix: StochasticMatrix,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> ProbVector:
    """
    Vecteur stationnaire par itération de la puissance

    v ← U v depuis le vecteur uniforme, normalisé par sa somme, jusqu'à
    ‖U v - v‖∞ < tol.

    Raises:
        NumericalFailureError: Pas de convergence après max_iter itérations
    """
    tol = settings.POWER_ITER_TOL if tol is None else tol
    max_iter = settings.POWER_ITER_MAX if max_iter is None else max_iter
    u = matrix.entries
    v = np.full(matrix.n, 1.0 / matrix.n)
    residual = float("inf")
    for _ in range(max_iter):
        w = u @ v
        residual = float(np.max(np.abs(w - v)))
        if residual < tol:
            return ProbVector(w / w.sum())
        v = w / w.sum()
    logger.warning("itération de la puissance non convergée (résidu %.3e)", residual)
    raise NumericalFailureError(
        f"vecteur de Perron non convergé après {max_iter} itérations (résidu {residual:.3e})",
        residual=residual,
    )
