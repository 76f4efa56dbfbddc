"""
Fonctions spéciales
lgamma (Lanczos), digamma/trigamma (récurrence + série asymptotique),
fonctions bêta et gamma incomplètes régularisées (série + fraction continue)

Toutes les fonctions acceptent un scalaire ou un tableau numpy pour x
et renvoient le même type.
"""

import math
from typing import Union

import numpy as np

from app.core.exceptions import InvalidParameterError


ArrayLike = Union[float, np.ndarray]

# ===== Constantes =====
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_EPS = 1e-15
_TINY = 1e-300
_MAX_ITER = 10_000
# Seuil de la série asymptotique (terme négligé < 1e-13 au-delà)
_ASYMPTOTIC_FROM = 10.0


def _wrap(values: np.ndarray, scalar: bool) -> ArrayLike:
    return float(values) if scalar else values


def _prepare(x: ArrayLike) -> tuple[np.ndarray, bool]:
    scalar = np.ndim(x) == 0
    return np.atleast_1d(np.asarray(x, dtype=float)).copy(), scalar


# ===== Gamma et dérivées =====
def lgamma(x: ArrayLike) -> ArrayLike:
    """
    Logarithme de la fonction Gamma pour x > 0 (approximation de Lanczos g=7)

    Args:
        x: Réel(s) strictement positif(s)

    Returns:
        ln Γ(x)

    Raises:
        InvalidParameterError: Si x <= 0
    """
    values, scalar = _prepare(x)
    if np.any(~(values > 0.0)):
        raise InvalidParameterError("lgamma: x doit être > 0")

    out = np.empty_like(values)
    small = values < 0.5
    if np.any(small):
        # Réflexion: Γ(x)Γ(1-x) = π / sin(πx)
        xs = values[small]
        out[small] = np.log(math.pi / np.abs(np.sin(math.pi * xs))) - _lanczos(1.0 - xs)
    if np.any(~small):
        out[~small] = _lanczos(values[~small])
    return _wrap(out, scalar)


def _lanczos(x: np.ndarray) -> np.ndarray:
    z = x - 1.0
    series = np.full_like(z, _LANCZOS_COEFFS[0])
    for i in range(1, len(_LANCZOS_COEFFS)):
        series += _LANCZOS_COEFFS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(series)


def log_beta(p: float, q: float) -> float:
    """ln B(p, q) = ln Γ(p) + ln Γ(q) - ln Γ(p + q)"""
    return lgamma(p) + lgamma(q) - lgamma(p + q)


def digamma(x: ArrayLike) -> ArrayLike:
    """
    Fonction digamma ψ(x) = d ln Γ(x) / dx pour x > 0

    Récurrence ψ(x) = ψ(x+1) - 1/x jusqu'à x >= 10 puis série asymptotique.
    """
    values, scalar = _prepare(x)
    if np.any(~(values > 0.0)):
        raise InvalidParameterError("digamma: x doit être > 0")

    shift = np.zeros_like(values)
    while True:
        low = values < _ASYMPTOTIC_FROM
        if not np.any(low):
            break
        shift[low] -= 1.0 / values[low]
        values[low] += 1.0

    inv = 1.0 / values
    inv2 = inv * inv
    tail = inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 * (1.0 / 240 - inv2 / 132))))
    return _wrap(np.log(values) - 0.5 * inv - tail + shift, scalar)


def trigamma(x: ArrayLike) -> ArrayLike:
    """Fonction trigamma ψ'(x) pour x > 0"""
    values, scalar = _prepare(x)
    if np.any(~(values > 0.0)):
        raise InvalidParameterError("trigamma: x doit être > 0")

    shift = np.zeros_like(values)
    while True:
        low = values < _ASYMPTOTIC_FROM
        if not np.any(low):
            break
        shift[low] += 1.0 / values[low] ** 2
        values[low] += 1.0

    inv = 1.0 / values
    inv2 = inv * inv
    tail = inv * (1.0 + inv * (0.5 + inv * (1.0 / 6 - inv2 * (1.0 / 30 - inv2 * (1.0 / 42 - inv2 * (1.0 / 30 - inv2 * 5.0 / 66))))))
    return _wrap(tail + shift, scalar)


# ===== Gamma incomplète =====
def reg_inc_gamma(x: ArrayLike, a: float) -> ArrayLike:
    """
    Fonction gamma incomplète inférieure régularisée P(a, x)

    Série pour x < a + 1, fraction continue (Lentz) au-delà.

    Args:
        x: Réel(s) >= 0
        a: Paramètre de forme > 0

    Returns:
        P(a, x) dans [0, 1]
    """
    if not a > 0.0:
        raise InvalidParameterError(f"reg_inc_gamma: a doit être > 0 (reçu {a})")
    values, scalar = _prepare(x)
    if np.any(~(values >= 0.0)):
        raise InvalidParameterError("reg_inc_gamma: x doit être >= 0")

    out = np.zeros_like(values)
    positive = values > 0.0
    use_series = positive & (values < a + 1.0)
    use_fraction = positive & ~use_series
    log_front_base = -lgamma(a)

    if np.any(use_series):
        xs = values[use_series]
        ap = np.full_like(xs, a)
        term = 1.0 / ap
        total = term.copy()
        for _ in range(_MAX_ITER):
            ap += 1.0
            term *= xs / ap
            total += term
            if np.all(np.abs(term) < np.abs(total) * _EPS):
                break
        out[use_series] = total * np.exp(-xs + a * np.log(xs) + log_front_base)

    if np.any(use_fraction):
        xs = values[use_fraction]
        b = xs + 1.0 - a
        c = np.full_like(xs, 1.0 / _TINY)
        d = 1.0 / b
        h = d.copy()
        for i in range(1, _MAX_ITER):
            an = -i * (i - a)
            b += 2.0
            d = an * d + b
            d = np.where(np.abs(d) < _TINY, _TINY, d)
            c = b + an / c
            c = np.where(np.abs(c) < _TINY, _TINY, c)
            d = 1.0 / d
            delta = d * c
            h *= delta
            if np.all(np.abs(delta - 1.0) < _EPS):
                break
        out[use_fraction] = 1.0 - np.exp(-xs + a * np.log(xs) + log_front_base) * h

    return _wrap(np.clip(out, 0.0, 1.0), scalar)


# ===== Bêta incomplète =====
def reg_inc_beta(x: ArrayLike, p: float, q: float) -> ArrayLike:
    """
    Fonction bêta incomplète régularisée I_x(p, q)

    Fraction continue de Lentz, en basculant sur 1 - I_{1-x}(q, p)
    au-delà du point de symétrie x = (p + 1) / (p + q + 2).

    Args:
        x: Réel(s) dans [0, 1]
        p: Premier paramètre > 0
        q: Second paramètre > 0

    Returns:
        I_x(p, q) dans [0, 1]
    """
    if not (p > 0.0 and q > 0.0):
        raise InvalidParameterError(f"reg_inc_beta: p et q doivent être > 0 (reçu {p}, {q})")
    values, scalar = _prepare(x)
    if np.any(~((values >= 0.0) & (values <= 1.0))):
        raise InvalidParameterError("reg_inc_beta: x doit être dans [0, 1]")

    out = np.where(values >= 1.0, 1.0, 0.0)
    inner = (values > 0.0) & (values < 1.0)
    if np.any(inner):
        xs = values[inner]
        swap = xs >= (p + 1.0) / (p + q + 2.0)
        xx = np.where(swap, 1.0 - xs, xs)
        pp = np.where(swap, q, p)
        qq = np.where(swap, p, q)
        log_front = pp * np.log(xx) + qq * np.log1p(-xx) - log_beta(p, q)
        partial = np.exp(log_front) * _beta_fraction(xx, pp, qq) / pp
        out[inner] = np.where(swap, 1.0 - partial, partial)

    return _wrap(np.clip(out, 0.0, 1.0), scalar)


def _beta_fraction(x: np.ndarray, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    qab = p + q
    qap = p + 1.0
    qam = p - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < _TINY, _TINY, d)
    d = 1.0 / d
    h = d.copy()
    for m in range(1, _MAX_ITER):
        m2 = 2 * m
        aa = m * (q - m) * x / ((qam + m2) * (p + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        h *= d * c
        aa = -(p + m) * (qab + m) * x / ((p + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        delta = d * c
        h *= delta
        if np.all(np.abs(delta - 1.0) < _EPS):
            break
    return h
