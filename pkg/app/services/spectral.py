"""
Service spectral
Valeurs propres et singulières, exposants de stabilité et de Lyapunov,
remise à l'échelle du spectre et fraction réelle
"""

import logging
import math
from typing import Iterable, Optional

import numpy as np

from app.core.config import settings
from app.core.exceptions import NumericalFailureError
from app.models.matrix import DeflatedForm, StochasticMatrix
from app.models.spectrum import ExponentSample, SingularValues, Spectrum
from app.utils.linalg import dense_eigenvalues, jacobi_singular_values, lu_determinant, sort_spectrum
from app.utils.validators import require_positive, require_square, require_time


logger = logging.getLogger(__name__)


__all__ = [
    "eigenvalues",
    "singular_values",
    "spectrum",
    "chain_singular_values",
    "stability_exponent",
    "lyapunov_exponent",
    "exponent_sample",
    "rescale_spectrum",
    "real_fraction",
    "exponent_positivity_violations",
    "lu_determinant",
]


# ===== Noyaux denses =====
def eigenvalues(matrix: np.ndarray) -> Spectrum:
    """
    Valeurs propres d'une matrice réelle carrée

    Équilibrage, Hessenberg et QR à double décalage (forme fermée pour
    n = 2), ou numpy.linalg si LINALG_BACKEND = "numpy".

    Raises:
        InvalidArgumentError: Matrice non carrée ou non finie
        NumericalFailureError: QR non convergé après 30·n itérations
    """
    matrix = require_square(matrix)
    if settings.use_numpy_linalg:
        values = sort_spectrum(np.linalg.eigvals(matrix))
    else:
        values = dense_eigenvalues(matrix, sweeps_per_dim=settings.QR_SWEEPS_PER_DIM)
    return Spectrum(values)


def singular_values(matrix: np.ndarray) -> SingularValues:
    """Valeurs singulières par Jacobi unilatéral (ou numpy.linalg)"""
    matrix = require_square(matrix)
    if settings.use_numpy_linalg:
        values = np.linalg.svd(matrix, compute_uv=False)
    else:
        values = jacobi_singular_values(matrix, tol=settings.JACOBI_TOL, max_sweeps=settings.JACOBI_MAX_SWEEPS)
    return SingularValues(np.asarray(values, dtype=float))


# ===== Matrices stochastiques =====
def _deflated(matrix: StochasticMatrix) -> DeflatedForm:
    return matrix.deflated if matrix.deflated is not None else DeflatedForm.of(matrix.entries)


def spectrum(matrix: StochasticMatrix) -> Spectrum:
    """
    Spectre d'une matrice stochastique, {1} ∪ spec(B)

    Passer par la forme déflatée garde la précision relative des petites
    valeurs propres; une matrice de rang 1 donne exactement {1, 0, …, 0}.
    """
    block = eigenvalues(_deflated(matrix).block).eigenvalues
    return Spectrum(sort_spectrum(np.concatenate(([1.0 + 0.0j], block))))


def chain_singular_values(matrix: StochasticMatrix) -> SingularValues:
    """Valeurs singulières, calculées sur [[1, 0], [c, B]]"""
    return singular_values(_deflated(matrix).full())


# ===== Exposants =====
def stability_exponent(spec: Spectrum, t: int) -> float:
    """
    θ = -(1/t) ln|λ₁|

    Returns:
        θ, ou nan si |λ₁| est sous le plancher de dégénérescence
    """
    t = require_time(t)
    modulus = abs(spec.subleading)
    if modulus < settings.DEGENERATE_FLOOR:
        return math.nan
    return -math.log(modulus) / t


def lyapunov_exponent(sv: SingularValues, t: int) -> float:
    """
    ϑ = -(1/t) ln z₁, z₁ = σ₂² deuxième valeur propre de UᵀU

    Calculé comme -(2/t) ln σ₂ pour éviter le débordement de σ₂². Pour
    n = 2, ϑ = (2/t)(ln σ₁ - ln|det U|).

    Returns:
        ϑ, ou nan si σ₂ est sous le plancher de dégénérescence
    """
    t = require_time(t)
    sigma2 = float(sv.values[1])
    if sigma2 < settings.DEGENERATE_FLOOR:
        return math.nan
    return -2.0 * math.log(sigma2) / t


def exponent_sample(
    matrix: StochasticMatrix,
    t: int,
    replica_index: int = 0,
    spec: Optional[Spectrum] = None,
) -> ExponentSample:
    """
    Exposants θ et ϑ d'une réplique; ne lève jamais d'exception

    Un échec du QR marque θ comme dégénéré.
    """
    theta = math.nan
    try:
        spec = spec if spec is not None else spectrum(matrix)
        theta = stability_exponent(spec, t)
    except NumericalFailureError as exc:
        logger.warning("réplique %d, t=%d: %s", replica_index, t, exc.detail)
    vartheta = lyapunov_exponent(chain_singular_values(matrix), t)
    return ExponentSample(
        theta=theta,
        vartheta=vartheta,
        t=t,
        n=matrix.n,
        replica_index=replica_index,
        theta_degenerate=math.isnan(theta),
        vartheta_degenerate=math.isnan(vartheta),
    )


def exponent_positivity_violations(samples: Iterable[ExponentSample]) -> int:
    """Nombre d'échantillons non dégénérés avec θ <= 0 ou ϑ <= 0"""
    count = 0
    for sample in samples:
        if not sample.theta_degenerate and sample.theta <= 0.0:
            count += 1
        elif not sample.vartheta_degenerate and sample.vartheta <= 0.0:
            count += 1
    return count


# ===== Spectre remis à l'échelle =====
def rescale_spectrum(spec: Spectrum, t: int) -> Spectrum:
    """
    λ → λ·|λ|^(1/t - 1): le module devient |λ|^(1/t), l'argument est conservé
    """
    t = require_time(t)
    values = spec.eigenvalues
    moduli = np.abs(values)
    with np.errstate(divide="ignore"):
        factor = np.where(moduli > 0.0, moduli ** (1.0 / t - 1.0), 0.0)
    return Spectrum(values * factor)


def real_fraction(spec: Spectrum, eps: float, exclude_perron: Optional[bool] = None) -> float:
    """
    Fraction des valeurs propres avec |Im λ| < eps

    La valeur propre de Perron (en tête du spectre) est exclue du numérateur
    et du dénominateur par défaut (settings.REAL_FRACTION_EXCLUDE_PERRON).
    """
    eps = require_positive(eps, "eps")
    exclude_perron = settings.REAL_FRACTION_EXCLUDE_PERRON if exclude_perron is None else exclude_perron
    values = spec.eigenvalues[1:] if exclude_perron else spec.eigenvalues
    if values.size == 0:
        return 1.0
    return float(np.mean(np.abs(values.imag) < eps))
