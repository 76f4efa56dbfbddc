"""
Service statistique
Histogrammes, test de Kolmogorov-Smirnov, ajustements par maximum de
vraisemblance (Gamma, Beta, Gauss) et courbes de décroissance
"""

import logging
import math
from typing import Callable, Mapping, NamedTuple, Optional, Sequence, Union

import numpy as np

from app.core.config import settings
from app.core.exceptions import InvalidArgumentError, InvalidParameterError
from app.models.histogram import Histogram
from app.schemas.fit import FitFamily, FitResult
from app.services.analytic import beta_cdf, gamma_cdf, normal_cdf
from app.services.sampler import gamma_variates
from app.utils.special import digamma, lgamma, log_beta, trigamma
from app.utils.validators import require_samples


logger = logging.getLogger(__name__)

CdfCallable = Callable[[np.ndarray], np.ndarray]
Binning = Union[None, int, str, Sequence[float], np.ndarray]


class KSResult(NamedTuple):
    """Statistique D et p-valeur asymptotique"""
    statistic: float
    p_value: float


class Regression(NamedTuple):
    slope: float
    intercept: float
    r_squared: float


class CurvePoint(NamedTuple):
    """Point de la courbe -ln⟨|λ₁(t)|⟩"""
    t: int
    value: float
    samples: int
    excluded: int


# ===== Histogrammes =====
def histogram(
    samples: Sequence[float],
    binning: Binning = None,
    value_range: Optional[tuple[float, float]] = None,
) -> Histogram:
    """
    Histogramme normalisé en densité

    Args:
        samples: Au moins deux valeurs finies
        binning: None (règle de Freedman-Diaconis), nom de règle numpy,
            nombre de classes ou bornes explicites
        value_range: Domaine des classes (ignoré avec des bornes explicites)

    Returns:
        Histogram de masse 1 sur les échantillons dans le domaine

    Raises:
        InvalidArgumentError: Moins de deux valeurs, valeurs non finies ou
            aucune valeur dans le domaine
    """
    values = require_samples(samples, minimum=2)
    if binning is None:
        binning = "fd"
    if isinstance(binning, (str, int, np.integer)):
        edges = np.histogram_bin_edges(values, bins=binning, range=value_range)
    else:
        edges = np.asarray(binning, dtype=float)
        if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
            raise InvalidArgumentError("bornes de classes non strictement croissantes")

    counts, edges = np.histogram(values, bins=edges)
    inside = int(counts.sum())
    if inside == 0:
        raise InvalidArgumentError("aucun échantillon dans le domaine des classes")
    densities = counts / (inside * np.diff(edges))
    return Histogram(edges=edges.astype(float), densities=densities, count=inside)


# ===== Kolmogorov-Smirnov =====
def empirical_cdf(samples: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Points (x₍ᵢ₎, i/m) de la fonction de répartition empirique"""
    values = np.sort(require_samples(samples))
    return values, np.arange(1, values.size + 1) / values.size


def kolmogorov_sf(x: float) -> float:
    """
    P(K > x) pour la loi de Kolmogorov

    Série en e^{-2k²x²} pour x >= 1.18, série de Jacobi en
    e^{-(2k-1)²π²/(8x²)} en dessous.
    """
    if x <= 0.0:
        return 1.0
    if x < 1.18:
        y = math.exp(-math.pi**2 / (8.0 * x * x))
        series = sum(y ** ((2 * k - 1) ** 2) for k in range(1, 6))
        return min(1.0, max(0.0, 1.0 - math.sqrt(2.0 * math.pi) / x * series))
    z = math.exp(-2.0 * x * x)
    series = sum((-1) ** (k - 1) * z ** (k * k) for k in range(1, 8))
    return min(1.0, max(0.0, 2.0 * series))


def _effective_sqrt(m: int) -> float:
    root = math.sqrt(m)
    return root + 0.12 + 0.11 / root


def ks_statistic(samples: Sequence[float], cdf: CdfCallable) -> KSResult:
    """
    Statistique de KS bilatérale contre une loi continue

    D = max_i max(i/m - F(x₍ᵢ₎), F(x₍ᵢ₎) - (i-1)/m) sur l'échantillon trié;
    p-valeur par la loi de Kolmogorov en λ = (√m + 0.12 + 0.11/√m)·D.

    Raises:
        InvalidArgumentError: F décroissante sur l'échantillon trié
    """
    values = np.sort(require_samples(samples))
    m = values.size
    f = np.asarray(cdf(values), dtype=float).reshape(-1)
    if f.shape != values.shape or not np.all(np.isfinite(f)):
        raise InvalidArgumentError("la fonction de répartition doit renvoyer une valeur finie par échantillon")
    if np.any(np.diff(f) < -1e-12) or np.any(f < -1e-12) or np.any(f > 1.0 + 1e-12):
        raise InvalidArgumentError("fonction de répartition non monotone ou hors de [0, 1]")

    ranks = np.arange(1, m + 1)
    d_plus = np.max(ranks / m - f)
    d_minus = np.max(f - (ranks - 1) / m)
    statistic = float(min(1.0, max(0.0, d_plus, d_minus)))
    return KSResult(statistic=statistic, p_value=kolmogorov_sf(_effective_sqrt(m) * statistic))


def ks_critical_value(m: int, confidence: float = 0.99) -> float:
    """
    D critique pour m échantillons (≈ 1.628/√m à 99 %)

    Raises:
        InvalidParameterError: confidence hors de ]0, 1[ ou m < 1
    """
    if not 0.0 < confidence < 1.0:
        raise InvalidParameterError(f"niveau de confiance invalide: {confidence}")
    if m < 1:
        raise InvalidParameterError(f"taille d'échantillon invalide: {m}")
    target = 1.0 - confidence
    lo, hi = 0.1, 10.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if kolmogorov_sf(mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi) / _effective_sqrt(m)


# ===== Ajustements =====
def _fit_samples(samples: Sequence[float]) -> np.ndarray:
    values = require_samples(samples, minimum=settings.MIN_FIT_SAMPLES)
    if np.ptp(values) == 0.0:
        raise InvalidArgumentError("variance nulle: ajustement impossible")
    return values


def fit_gamma(samples: Sequence[float], excluded: int = 0) -> FitResult:
    """
    Maximum de vraisemblance pour Gamma(α, β) (β taux)

    Newton sur ln α - ψ(α) = ln(moyenne) - moyenne(ln x) depuis
    l'estimateur des moments, pas divisé par deux tant que α <= 0;
    β = α/moyenne. En cas d'échec on revient aux moments (fallback).

    Args:
        samples: Au moins MIN_FIT_SAMPLES valeurs > 0
        excluded: Échantillons dégénérés écartés en amont

    Raises:
        InvalidArgumentError: Valeurs <= 0, trop peu de valeurs ou variance nulle
    """
    values = _fit_samples(samples)
    if np.any(values <= 0.0):
        raise InvalidArgumentError("fit_gamma: valeurs strictement positives requises")
    mean = float(np.mean(values))
    mean_log = float(np.mean(np.log(values)))
    s = math.log(mean) - mean_log
    alpha0 = mean * mean / float(np.var(values))

    alpha = _gamma_newton(s, alpha0)
    method, fallback = "mle", False
    if alpha is None:
        logger.warning("fit_gamma: Newton non convergé, repli sur les moments (α=%.4g)", alpha0)
        alpha, method, fallback = alpha0, "moments", True
    beta = alpha / mean

    m = values.size
    log_likelihood = m * (alpha * math.log(beta) - lgamma(alpha)) + (alpha - 1.0) * m * mean_log - beta * m * mean
    ks = ks_statistic(values, lambda x: gamma_cdf(x, alpha, beta))
    return FitResult(
        family="gamma",
        parameters={"alpha": alpha, "beta": beta},
        log_likelihood=float(log_likelihood),
        ks_statistic=ks.statistic,
        p_value=ks.p_value,
        sample_count=m,
        excluded_count=excluded,
        method=method,
        fallback=fallback,
    )


def _gamma_newton(s: float, alpha: float) -> Optional[float]:
    if not s > 0.0 or not math.isfinite(s):
        return None
    for _ in range(settings.MLE_MAX_ITER):
        f = math.log(alpha) - digamma(alpha) - s
        df = 1.0 / alpha - trigamma(alpha)
        step = f / df
        candidate = alpha - step
        while candidate <= 0.0:
            step *= 0.5
            candidate = alpha - step
        if not math.isfinite(candidate):
            return None
        if abs(candidate - alpha) <= settings.MLE_TOL * candidate:
            return candidate
        alpha = candidate
    return None


def fit_beta(samples: Sequence[float], excluded: int = 0) -> FitResult:
    """
    Maximum de vraisemblance pour Beta(α, β)

    Newton bidimensionnel sur ψ(α) - ψ(α+β) = moyenne(ln x),
    ψ(β) - ψ(α+β) = moyenne(ln(1-x)), jacobien en trigamma,
    depuis l'estimateur des moments.

    Raises:
        InvalidArgumentError: Valeurs hors de ]0, 1[, trop peu de valeurs
            ou variance nulle
    """
    values = _fit_samples(samples)
    if np.any((values <= 0.0) | (values >= 1.0)):
        raise InvalidArgumentError("fit_beta: valeurs dans ]0, 1[ requises")
    mean = float(np.mean(values))
    var = float(np.var(values))
    common = mean * (1.0 - mean) / var - 1.0
    start = np.array([mean * common, (1.0 - mean) * common])
    target = np.array([float(np.mean(np.log(values))), float(np.mean(np.log1p(-values)))])

    params = _beta_newton(target, start) if np.all(start > 0.0) else None
    method, fallback = "mle", False
    if params is None:
        if not np.all(start > 0.0):
            raise InvalidArgumentError("fit_beta: estimateur des moments hors du domaine")
        logger.warning("fit_beta: Newton non convergé, repli sur les moments")
        params, method, fallback = start, "moments", True
    alpha, beta = float(params[0]), float(params[1])

    m = values.size
    log_likelihood = m * (-log_beta(alpha, beta) + (alpha - 1.0) * target[0] + (beta - 1.0) * target[1])
    ks = ks_statistic(values, lambda x: beta_cdf(x, alpha, beta))
    return FitResult(
        family="beta",
        parameters={"alpha": alpha, "beta": beta},
        log_likelihood=float(log_likelihood),
        ks_statistic=ks.statistic,
        p_value=ks.p_value,
        sample_count=m,
        excluded_count=excluded,
        method=method,
        fallback=fallback,
    )


def _beta_newton(target: np.ndarray, params: np.ndarray) -> Optional[np.ndarray]:
    params = params.astype(float)
    for _ in range(settings.MLE_MAX_ITER):
        p, q = params
        psi_sum = digamma(p + q)
        tri_sum = trigamma(p + q)
        residual = np.array([digamma(p) - psi_sum, digamma(q) - psi_sum]) - target
        jacobian = np.array([
            [trigamma(p) - tri_sum, -tri_sum],
            [-tri_sum, trigamma(q) - tri_sum],
        ])
        try:
            step = np.linalg.solve(jacobian, residual)
        except np.linalg.LinAlgError:
            return None
        candidate = params - step
        while np.any(candidate <= 0.0):
            step *= 0.5
            candidate = params - step
        if not np.all(np.isfinite(candidate)):
            return None
        if np.max(np.abs(candidate - params) / candidate) <= settings.MLE_TOL:
            return candidate
        params = candidate
    return None


def fit_gaussian(samples: Sequence[float], excluded: int = 0) -> FitResult:
    """
    Loi normale: moyenne empirique et variance sans biais

    Raises:
        InvalidArgumentError: Trop peu de valeurs ou variance nulle
    """
    values = _fit_samples(samples)
    m = values.size
    mean = float(np.mean(values))
    variance = float(np.var(values, ddof=1))
    sigma = math.sqrt(variance)
    log_likelihood = -0.5 * m * math.log(2.0 * math.pi * variance) - float(np.sum((values - mean) ** 2)) / (2.0 * variance)
    ks = ks_statistic(values, lambda x: normal_cdf(x, mean, sigma))
    return FitResult(
        family="gaussian",
        parameters={"mean": mean, "variance": variance},
        log_likelihood=log_likelihood,
        ks_statistic=ks.statistic,
        p_value=ks.p_value,
        sample_count=m,
        excluded_count=excluded,
    )


_FITTERS = {
    "gamma": fit_gamma,
    "beta": fit_beta,
    "gaussian": fit_gaussian,
}


def fit(family: FitFamily, samples: Sequence[float], excluded: int = 0) -> FitResult:
    """Ajustement par nom de famille"""
    try:
        fitter = _FITTERS[family]
    except KeyError:
        raise InvalidArgumentError(f"famille inconnue: {family}") from None
    return fitter(samples, excluded=excluded)


def fitted_cdf(result: FitResult) -> CdfCallable:
    """Fonction de répartition de la loi ajustée"""
    if result.family == "gamma":
        alpha, beta = result.param("alpha"), result.param("beta")
        return lambda x: gamma_cdf(x, alpha, beta)
    if result.family == "beta":
        alpha, beta = result.param("alpha"), result.param("beta")
        return lambda x: beta_cdf(x, alpha, beta)
    mean, sigma = result.param("mean"), math.sqrt(result.param("variance"))
    return lambda x: normal_cdf(x, mean, sigma)


def sample_from_fit(result: FitResult, m: int, gen: np.random.Generator) -> np.ndarray:
    """m tirages de la loi ajustée (boucle d'auto-cohérence)"""
    if m < 1:
        raise InvalidParameterError(f"nombre de tirages invalide: {m}")
    if result.family == "gamma":
        return gamma_variates(result.param("alpha"), m, gen) / result.param("beta")
    if result.family == "beta":
        x = gamma_variates(result.param("alpha"), m, gen)
        y = gamma_variates(result.param("beta"), m, gen)
        return x / (x + y)
    return result.param("mean") + math.sqrt(result.param("variance")) * gen.standard_normal(m)


# ===== Courbes et régressions =====
def linear_regression(xs: Sequence[float], ys: Sequence[float]) -> Regression:
    """
    Moindres carrés y = pente·x + ordonnée et coefficient R²

    Raises:
        InvalidArgumentError: Moins de deux points, longueurs différentes ou x constants
    """
    x = require_samples(xs, minimum=2, name="xs")
    y = require_samples(ys, minimum=2, name="ys")
    if x.shape != y.shape:
        raise InvalidArgumentError("xs et ys de longueurs différentes")
    x_mean, y_mean = x.mean(), y.mean()
    sxx = float(np.sum((x - x_mean) ** 2))
    if sxx == 0.0:
        raise InvalidArgumentError("abscisses constantes")
    slope = float(np.sum((x - x_mean) * (y - y_mean))) / sxx
    intercept = float(y_mean - slope * x_mean)
    ss_tot = float(np.sum((y - y_mean) ** 2))
    ss_res = float(np.sum((y - (slope * x + intercept)) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return Regression(slope=slope, intercept=intercept, r_squared=r_squared)


def mean_log_modulus_curve(per_t_samples: Mapping[int, Sequence[float]]) -> list[CurvePoint]:
    """
    Courbe t -> -ln⟨|λ₁(t)|⟩ (moyenne prise avant le logarithme)

    Les valeurs non finies ou sous le plancher de dégénérescence sont
    exclues; une tranche sans valeur utilisable est ignorée.

    Raises:
        InvalidArgumentError: Liste d'échantillons vide
    """
    points = []
    for t in sorted(per_t_samples):
        values = np.abs(np.asarray(per_t_samples[t], dtype=float).ravel())
        if values.size == 0:
            raise InvalidArgumentError(f"aucun échantillon pour t={t}")
        usable = values[np.isfinite(values) & (values >= settings.DEGENERATE_FLOOR)]
        excluded = values.size - usable.size
        if usable.size == 0:
            logger.warning("t=%d: toutes les valeurs sont dégénérées, point ignoré", t)
            continue
        if excluded:
            logger.warning("t=%d: %d valeurs dégénérées exclues", t, excluded)
        points.append(CurvePoint(t=int(t), value=-math.log(float(np.mean(usable))), samples=usable.size, excluded=excluded))
    return points


def log_median_decay(per_t_samples: Mapping[int, Sequence[float]]) -> tuple[list[tuple[int, float]], Regression]:
    """
    Série (t, ln médiane) des valeurs positives et sa droite de régression

    Raises:
        InvalidArgumentError: Moins de deux temps exploitables
    """
    series = []
    for t in sorted(per_t_samples):
        values = np.asarray(per_t_samples[t], dtype=float).ravel()
        values = values[np.isfinite(values) & (values > 0.0)]
        if values.size:
            series.append((int(t), math.log(float(np.median(values)))))
    if len(series) < 2:
        raise InvalidArgumentError("au moins deux temps exploitables requis")
    ts, logs = zip(*series)
    return series, linear_regression(ts, logs)


def lag1_autocorrelation(values: Sequence[float]) -> float:
    """
    Autocorrélation de retard 1 d'une série indexée par réplique

    Raises:
        InvalidArgumentError: Moins de deux valeurs ou série constante
    """
    x = require_samples(values, minimum=2)
    centered = x - x.mean()
    denominator = float(np.dot(centered, centered))
    if denominator == 0.0:
        raise InvalidArgumentError("série constante")
    return float(np.dot(centered[:-1], centered[1:])) / denominator
