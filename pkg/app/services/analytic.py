"""
Service des références analytiques
Densités et fonctions de répartition exactes, opérateur de transfert
du cas n = 2 et vérification du point fixe par quadrature
"""

import logging
import math
from functools import lru_cache
from typing import Literal, NamedTuple, Optional

import numpy as np

from app.core.config import settings
from app.core.exceptions import InvalidArgumentError, InvalidParameterError, QuadratureError
from app.models.density import DensityFn, QuadratureSpec
from app.utils.quadrature import adaptive_gauss, fixed_gauss
from app.utils.special import (
    digamma,
    lgamma,
    log_beta,
    reg_inc_beta,
    reg_inc_gamma,
    trigamma,
)
from app.utils.validators import require_dimension, require_positive, require_unit_interval


logger = logging.getLogger(__name__)

Region = Literal["i", "ii"]

__all__ = [
    "lgamma",
    "digamma",
    "trigamma",
    "reg_inc_beta",
    "reg_inc_gamma",
    "beta_pdf",
    "beta_marginal_pdf",
    "p2_density",
    "fixed_point_density",
    "gamma_pdf",
    "beta_cdf",
    "gamma_cdf",
    "uniform_cdf",
    "p2_cdf",
    "fixed_point_cdf",
    "normal_cdf",
    "uniform_density",
    "beta_density",
    "p2_density_fn",
    "fixed_point_density_fn",
    "marginal_density_fn",
    "gamma_density_fn",
    "tabulated_density",
    "integrate_density",
    "transfer_kernel",
    "transfer_region",
    "transfer_apply",
    "FixedPointCheck",
    "verify_fixed_point",
    "fixed_point_grid",
    "iterate_transfer",
    "mean_abs_lambda_n2",
    "GaussianLimit",
    "gaussian_limit",
]

# Ordre de la règle de Gauss du noyau (intégrale intérieure en ρ)
_KERNEL_ORDER = 24
_KERNEL_ORDER_NYSTROM = 16
# Marge aux bords de [0, 1] pour les densités singulières
_EDGE = 1e-15


# ===== Densités =====
def beta_pdf(x, p: float, q: float):
    """
    Densité Beta(p, q), calculée en espace logarithmique

    Aux bords: +inf si l'exposant correspondant est négatif, la constante
    de normalisation s'il est nul, 0 sinon. Nulle hors de [0, 1].
    """
    p = require_positive(p, "p")
    q = require_positive(q, "q")
    values = np.asarray(x, dtype=float)
    scalar = values.ndim == 0
    values = np.atleast_1d(values)
    log_norm = -log_beta(p, q)

    out = np.zeros_like(values)
    inner = (values > 0.0) & (values < 1.0)
    xs = values[inner]
    out[inner] = np.exp(log_norm + (p - 1.0) * np.log(xs) + (q - 1.0) * np.log1p(-xs))
    out[values == 0.0] = _edge_value(p, log_norm)
    out[values == 1.0] = _edge_value(q, log_norm)
    return float(out[0]) if scalar else out


def _edge_value(exponent: float, log_norm: float) -> float:
    if exponent < 1.0:
        return math.inf
    if exponent == 1.0:
        return math.exp(log_norm)
    return 0.0


def beta_marginal_pdf(v, a: float, n: int):
    """Densité marginale d'un élément d'une colonne: Beta(a, (n-1)a)"""
    n = require_dimension(n)
    return beta_pdf(v, a, (n - 1) * a)


def p2_density(z):
    """
    Densité de U₁₁ à t = 2 (n = 2, a = 1): -2z ln z - 2(1-z) ln(1-z)

    Vaut 0 aux bords (limite) et hors de [0, 1], symétrique autour de 1/2.
    """
    raw = np.asarray(z, dtype=float)
    values = np.clip(raw, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        left = np.where(values > 0.0, values * np.log(np.where(values > 0.0, values, 1.0)), 0.0)
        right_arg = 1.0 - values
        right = np.where(right_arg > 0.0, right_arg * np.log(np.where(right_arg > 0.0, right_arg, 1.0)), 0.0)
    out = np.where((raw >= 0.0) & (raw <= 1.0), -2.0 * left - 2.0 * right, 0.0)
    return float(out) if out.ndim == 0 else out


def fixed_point_density(z, a: float, n: int):
    """Densité limite conjecturée Beta(na, n(n-1)a); exacte pour n = 2"""
    n = require_dimension(n)
    a = require_positive(a, "a")
    return beta_pdf(z, n * a, n * (n - 1) * a)


def gamma_pdf(x, alpha: float, beta: float):
    """Densité Gamma β^α/Γ(α) x^(α-1) e^(-βx), nulle pour x < 0"""
    alpha = require_positive(alpha, "alpha")
    beta = require_positive(beta, "beta")
    values = np.asarray(x, dtype=float)
    scalar = values.ndim == 0
    values = np.atleast_1d(values)
    log_norm = alpha * math.log(beta) - lgamma(alpha)

    out = np.zeros_like(values)
    positive = values > 0.0
    xs = values[positive]
    out[positive] = np.exp(log_norm + (alpha - 1.0) * np.log(xs) - beta * xs)
    out[values == 0.0] = _edge_value(alpha, log_norm)
    return float(out[0]) if scalar else out


# ===== Fonctions de répartition =====
def beta_cdf(x, p: float, q: float):
    """F(x) = I_x(p, q)"""
    return reg_inc_beta(np.clip(x, 0.0, 1.0), p, q)


def gamma_cdf(x, alpha: float, beta: float):
    """F(x) = P(α, βx)"""
    return reg_inc_gamma(np.maximum(np.asarray(x, dtype=float) * beta, 0.0), alpha)


def uniform_cdf(x):
    out = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def p2_cdf(z):
    """
    Primitive de p2_density:
    F(z) = -z² ln z + z²/2 + (1-z)² ln(1-z) - (1-z)²/2 + 1/2
    """
    values = np.clip(np.asarray(z, dtype=float), 0.0, 1.0)
    w = 1.0 - values
    with np.errstate(divide="ignore", invalid="ignore"):
        left = np.where(values > 0.0, values**2 * np.log(np.where(values > 0.0, values, 1.0)), 0.0)
        right = np.where(w > 0.0, w**2 * np.log(np.where(w > 0.0, w, 1.0)), 0.0)
    out = -left + 0.5 * values**2 + right - 0.5 * w**2 + 0.5
    out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def fixed_point_cdf(z, a: float, n: int):
    n = require_dimension(n)
    return beta_cdf(z, n * a, n * (n - 1) * a)


def normal_cdf(x, mu: float = 0.0, sigma: float = 1.0):
    """Φ((x - μ)/σ) via P(1/2, y²/2)"""
    sigma = require_positive(sigma, "sigma")
    y = (np.asarray(x, dtype=float) - mu) / sigma
    out = 0.5 + 0.5 * np.sign(y) * reg_inc_gamma(0.5 * y * y, 0.5)
    return float(out) if np.ndim(out) == 0 else out


# ===== Constructeurs de DensityFn =====
def uniform_density() -> DensityFn:
    return DensityFn(
        family="uniform",
        params=(),
        pdf=lambda x: np.where((x >= 0.0) & (x <= 1.0), 1.0, 0.0),
        cdf=uniform_cdf,
    )


def beta_density(p: float, q: float) -> DensityFn:
    require_positive(p, "p")
    require_positive(q, "q")
    return DensityFn(
        family="beta",
        params=(float(p), float(q)),
        pdf=lambda x: beta_pdf(x, p, q),
        cdf=lambda x: beta_cdf(x, p, q),
    )


def p2_density_fn() -> DensityFn:
    return DensityFn(family="p2", params=(), pdf=p2_density, cdf=p2_cdf)


def fixed_point_density_fn(a: float, n: int) -> DensityFn:
    n = require_dimension(n)
    a = require_positive(a, "a")
    density = beta_density(n * a, n * (n - 1) * a)
    return DensityFn(family="fixed_point", params=(a, float(n)), pdf=density.pdf, cdf=density.cdf)


def marginal_density_fn(a: float, n: int) -> DensityFn:
    n = require_dimension(n)
    a = require_positive(a, "a")
    density = beta_density(a, (n - 1) * a)
    return DensityFn(family="marginal", params=(a, float(n)), pdf=density.pdf, cdf=density.cdf)


def gamma_density_fn(alpha: float, beta: float) -> DensityFn:
    require_positive(alpha, "alpha")
    require_positive(beta, "beta")
    return DensityFn(
        family="gamma",
        params=(float(alpha), float(beta)),
        pdf=lambda x: gamma_pdf(x, alpha, beta),
        cdf=lambda x: gamma_cdf(x, alpha, beta),
        support=(0.0, math.inf),
    )


def tabulated_density(grid: np.ndarray, values: np.ndarray) -> DensityFn:
    """
    Densité interpolée linéairement sur une grille croissante de [0, 1]

    Raises:
        InvalidArgumentError: Grille non croissante ou valeurs invalides
    """
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    if grid.ndim != 1 or grid.shape != values.shape or grid.size < 2:
        raise InvalidArgumentError("grille et valeurs de même longueur (>= 2) attendues")
    if np.any(np.diff(grid) <= 0):
        raise InvalidArgumentError("grille non strictement croissante")
    if not np.all(np.isfinite(values)):
        raise InvalidArgumentError("valeurs tabulées non finies")
    grid = grid.copy()
    values = values.copy()

    # Primitive exacte de l'interpolant linéaire
    cumulative = np.concatenate(([0.0], np.cumsum(0.5 * (values[1:] + values[:-1]) * np.diff(grid))))

    def pdf(x):
        return np.interp(x, grid, values, left=0.0, right=0.0)

    def cdf(x):
        x = np.clip(np.asarray(x, dtype=float), grid[0], grid[-1])
        index = np.clip(np.searchsorted(grid, x, side="right") - 1, 0, grid.size - 2)
        h = x - grid[index]
        slope = (values[index + 1] - values[index]) / (grid[index + 1] - grid[index])
        return cumulative[index] + values[index] * h + 0.5 * slope * h * h

    return DensityFn(family="tabulated", params=(float(grid.size),), pdf=pdf, cdf=cdf)


def integrate_density(density: DensityFn, quad: Optional[QuadratureSpec] = None) -> float:
    """Masse totale d'une densité sur son support (quadrature adaptative)"""
    quad = quad or QuadratureSpec.from_settings(substitution=True)
    lo, hi = density.support
    if math.isinf(hi):
        # x = u/(1-u) envoie [0, 1[ sur [0, ∞[
        def integrand(u):
            return density.pdf(u / (1.0 - u)) / (1.0 - u) ** 2

        lo, hi = 0.0, 1.0 - 1e-12
    else:
        integrand = density.pdf
    return _integrate(integrand, lo, hi, quad).value


def _integrate(f, lo: float, hi: float, quad: QuadratureSpec):
    return adaptive_gauss(
        f,
        lo,
        hi,
        abs_tol=quad.abs_tol,
        rel_tol=quad.rel_tol,
        max_subdivisions=quad.max_subdivisions,
        substitution=quad.substitution,
        power=quad.power,
        order=quad.order,
    )


# ===== Opérateur de transfert (n = 2) =====
def _safe_ratio(num, den):
    """num/den avec 0 si num <= 0 et +inf si den <= 0"""
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0), math.inf)
    return np.where(num <= 0.0, 0.0, ratio)


def transfer_kernel(phi, z, a: float, region: Region, order: int = _KERNEL_ORDER) -> np.ndarray:
    """
    Noyau K(φ; z) en coordonnées polaires de coin

    Dans la région ii (s <= z <= r) on pose r = z + ρ(1-φ), s = z - ρφ;
    dans la région i (r <= z <= s), r = z - ρ(1-φ), s = z + ρφ. Le jacobien ρ
    compense le facteur 1/|r - s| et φ est la valeur w de l'élément au pas
    précédent:

        K(φ; z) = ∫₀^ρmax P₁(r) P₁(s) dρ,  P₁ = Beta(a, a)

    Args:
        phi: Valeurs de φ (tableau)
        z: Valeur(s) de z, diffusées avec phi
        a: Concentration
        region: "i" ou "ii"
        order: Ordre de la règle de Gauss en ρ

    Returns:
        K, de la forme diffusée de (phi, z)
    """
    phi, z = np.broadcast_arrays(np.asarray(phi, dtype=float), np.asarray(z, dtype=float))
    if region == "ii":
        rho_max = np.minimum(_safe_ratio(1.0 - z, 1.0 - phi), _safe_ratio(z, phi))
        sign = 1.0
    elif region == "i":
        rho_max = np.minimum(_safe_ratio(z, 1.0 - phi), _safe_ratio(1.0 - z, phi))
        sign = -1.0
    else:
        raise InvalidArgumentError(f"région inconnue: {region}")

    if a == 1.0:
        return rho_max

    def integrand(rho):
        r = np.clip(z[..., None] + sign * rho * (1.0 - phi[..., None]), _EDGE, 1.0 - _EDGE)
        s = np.clip(z[..., None] - sign * rho * phi[..., None], _EDGE, 1.0 - _EDGE)
        return beta_pdf(r, a, a) * beta_pdf(s, a, a)

    if a >= 1.0:
        return fixed_gauss(integrand, np.zeros_like(rho_max), rho_max, order)

    # Singularité intégrable en ρ = ρmax: ρ = ρmax(1 - u^4)
    power = settings.QUAD_SUBSTITUTION_POWER

    def substituted(u):
        rho = rho_max[..., None] * (1.0 - u**power)
        return integrand(rho) * rho_max[..., None] * power * u ** (power - 1.0)

    return fixed_gauss(substituted, np.zeros_like(rho_max), np.ones_like(rho_max), order)


def transfer_region(
    p: DensityFn,
    a: float,
    z: float,
    region: Region,
    quad: Optional[QuadratureSpec] = None,
) -> float:
    """
    Contribution d'une région: ∫₀¹ P(φ) K(φ; z) dφ

    L'intégrale extérieure est coupée au coude du noyau (φ = z pour la
    région ii, φ = 1 - z pour la région i).

    Raises:
        QuadratureError: Tolérance non atteinte
    """
    quad = quad or QuadratureSpec.from_settings()
    kink = z if region == "ii" else 1.0 - z

    def integrand(phi):
        return p.pdf(phi) * transfer_kernel(phi, z, a, region)

    total = 0.0
    for lo, hi in ((0.0, kink), (kink, 1.0)):
        if hi > lo:
            total += _integrate(integrand, lo, hi, quad).value
    return total


def transfer_apply(
    p: DensityFn,
    a: float,
    z: float,
    quad: Optional[QuadratureSpec] = None,
) -> float:
    """
    Densité au temps t de U₁₁ (n = 2) à partir de celle du temps t - 1

    Intégrale triple sur (w, r, s) dont le delta est éliminé analytiquement:
    w = (z - s)/(r - s) avec jacobien 1/|r - s|, puis passage en coordonnées
    polaires de coin dans chacune des deux régions.

    Args:
        p: Densité au temps t - 1
        a: Concentration des facteurs
        z: Point d'évaluation dans [0, 1]
        quad: Spécification de quadrature

    Returns:
        P_t(z)

    Raises:
        QuadratureError: Avec l'estimation d'erreur atteinte
    """
    a = require_positive(a, "a")
    z = require_unit_interval(z, "z")
    quad = quad or QuadratureSpec.from_settings()
    return transfer_region(p, a, z, "i", quad) + transfer_region(p, a, z, "ii", quad)


class FixedPointCheck(NamedTuple):
    """Contributions des deux régions au point fixe en z"""
    z: float
    region_i: float
    region_ii: float
    target: float
    residual: float


def verify_fixed_point(
    a: float,
    z: float,
    quad: Optional[QuadratureSpec] = None,
) -> FixedPointCheck:
    """
    Vérifie P∞ = T(P∞) pour n = 2 région par région

    Région i: s ∈ [z, 1], r ∈ [0, z]; région ii: s ∈ [0, z], r ∈ [z, 1].
    Chacune doit valoir P∞(z)/2. Un échec de quadrature est retenté avec
    la substitution en puissance aux extrémités.

    Returns:
        FixedPointCheck (residual = |région i + région ii - P∞(z)|)

    Raises:
        QuadratureError: Échec malgré la substitution
    """
    a = require_positive(a, "a")
    z = require_unit_interval(z, "z", open_interval=True)
    quad = quad or QuadratureSpec.from_settings()
    p_inf = fixed_point_density_fn(a, 2)

    try:
        region_i = transfer_region(p_inf, a, z, "i", quad)
        region_ii = transfer_region(p_inf, a, z, "ii", quad)
    except QuadratureError as exc:
        if quad.substitution:
            raise
        logger.warning("z=%s: %s, nouvel essai avec substitution", z, exc.detail)
        retry = quad.with_substitution()
        region_i = transfer_region(p_inf, a, z, "i", retry)
        region_ii = transfer_region(p_inf, a, z, "ii", retry)

    target = float(p_inf(z))
    return FixedPointCheck(
        z=z,
        region_i=region_i,
        region_ii=region_ii,
        target=target,
        residual=abs(region_i + region_ii - target),
    )


def fixed_point_grid(size: Optional[int] = None) -> np.ndarray:
    """Grille intérieure uniforme {1, ..., size}/(size + 1) (0.01..0.99 pour 99)"""
    size = settings.CHECK_GRID_SIZE if size is None else size
    if size < 1:
        raise InvalidParameterError(f"taille de grille invalide: {size}")
    return np.arange(1, size + 1) / (size + 1)


@lru_cache(maxsize=4)
def _nystrom_system(a: float, m: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Grille, poids des trapèzes et noyau pondéré (lecture seule) pour (a, m)"""
    grid = np.linspace(0.0, 1.0, m + 1)
    weights = np.full(m + 1, 1.0 / m)
    weights[[0, -1]] *= 0.5
    kernel = np.empty((m + 1, m + 1))
    chunk = max(1, 2_000_000 // ((m + 1) * _KERNEL_ORDER_NYSTROM))
    for start in range(0, m + 1, chunk):
        rows = slice(start, min(start + chunk, m + 1))
        z = grid[rows, None]
        phi = grid[None, :]
        kernel[rows] = (
            transfer_kernel(phi, z, a, "i", order=_KERNEL_ORDER_NYSTROM)
            + transfer_kernel(phi, z, a, "ii", order=_KERNEL_ORDER_NYSTROM)
        ) * weights
    for array in (grid, weights, kernel):
        array.setflags(write=False)
    return grid, weights, kernel


def iterate_transfer(
    p0: DensityFn,
    a: float,
    k: int,
    nodes: Optional[int] = None,
) -> DensityFn:
    """
    k applications de l'opérateur de transfert par discrétisation de Nyström

    Grille uniforme de nodes + 1 points avec poids des trapèzes; les coudes
    du noyau (φ = z et φ = 1 - z) tombent sur des nœuds. Le noyau est
    calculé par blocs de lignes et gardé en cache pour (a, nodes).

    Args:
        p0: Densité initiale (finie sur la grille)
        a: Concentration (>= 1/2, densités finies aux bords)
        k: Nombre d'applications (>= 0)
        nodes: Nombre d'intervalles (défaut: settings.TRANSFER_NODES)

    Returns:
        Densité tabulée P_k
    """
    a = require_positive(a, "a")
    if a < 0.5:
        raise InvalidParameterError(f"iterate_transfer requiert a >= 1/2 (reçu {a})")
    if k < 0:
        raise InvalidParameterError(f"k doit être >= 0 (reçu {k})")
    m = settings.TRANSFER_NODES if nodes is None else nodes
    if m < 2:
        raise InvalidParameterError(f"nombre de nœuds invalide: {m}")

    grid = np.linspace(0.0, 1.0, m + 1)
    values = np.asarray(p0.pdf(grid), dtype=float)
    if not np.all(np.isfinite(values)):
        raise InvalidArgumentError("la densité initiale doit être finie sur [0, 1]")
    if k == 0:
        return tabulated_density(grid, values)

    grid, weights, kernel = _nystrom_system(float(a), int(m))
    for step in range(k):
        values = kernel @ values
        logger.debug("transfert %d/%d: masse %.8f", step + 1, k, float(np.dot(weights, values)))
    return tabulated_density(grid, values)


# ===== Références pour n = 2 et grand n =====
def mean_abs_lambda_n2(a: float, quad: Optional[QuadratureSpec] = None) -> float:
    """
    E|r - s| pour r, s iid Beta(a, a)

    Pour n = 2, λ₁(U(t)) = Π (r_k - s_k), donc ⟨|λ₁(t)|⟩ = (E|r - s|)^t.
    Calculé par E|X - Y| = 2 ∫ F(1 - F).
    """
    a = require_positive(a, "a")
    quad = quad or QuadratureSpec.from_settings(substitution=True)

    def integrand(x):
        f = beta_cdf(x, a, a)
        return f * (1.0 - f)

    return 2.0 * _integrate(integrand, 0.0, 1.0, quad).value


class GaussianLimit(NamedTuple):
    """Moyenne et variance de la limite gaussienne, variance Beta exacte"""
    mean: float
    variance: float
    beta_variance: float


def gaussian_limit(a: float, n: int) -> GaussianLimit:
    """(1/n, 1/(a n³)) et la variance exacte (n-1)/(n²(n²a+1)) de Beta(na, n(n-1)a)"""
    a = require_positive(a, "a")
    n = require_dimension(n)
    return GaussianLimit(
        mean=1.0 / n,
        variance=1.0 / (a * n**3),
        beta_variance=(n - 1) / (n**2 * (n**2 * a + 1.0)),
    )
