"""
Algèbre linéaire dense pour petites matrices réelles
Équilibrage, réduction de Hessenberg, QR de Francis à double décalage,
SVD de Jacobi unilatérale, déterminant LU, base de Householder
"""

import logging
import math
from functools import lru_cache

import numpy as np

from app.core.exceptions import InvalidArgumentError, NumericalFailureError


logger = logging.getLogger(__name__)

_EPS = float(np.finfo(float).eps)
_RADIX = 2.0


# ===== Base adaptée au vecteur 1 =====
@lru_cache(maxsize=128)
def householder_basis(n: int) -> np.ndarray:
    """
    Réflecteur de Householder H (symétrique, orthogonal) tel que H e₁ = 1/√n

    La première colonne de H est le vecteur uniforme normalisé, les n-1
    suivantes (Q) forment une base orthonormée du sous-espace de somme nulle.
    """
    if n < 1:
        raise InvalidArgumentError(f"dimension invalide: {n}")
    e = np.full(n, 1.0 / math.sqrt(n))
    v = -e
    v[0] += 1.0
    norm2 = float(v @ v)
    basis = np.eye(n)
    if norm2 > 0.0:
        basis -= (2.0 / norm2) * np.outer(v, v)
    basis.setflags(write=False)
    return basis


# ===== Valeurs propres =====
def balance(a: np.ndarray) -> np.ndarray:
    """
    Équilibrage par similitudes diagonales en puissances de 2

    Ramène normes de lignes et de colonnes au même ordre de grandeur
    sans erreur d'arrondi. Modifie a en place et le renvoie.
    """
    n = a.shape[0]
    sqrdx = _RADIX * _RADIX
    done = False
    while not done:
        done = True
        for i in range(n):
            c = float(np.sum(np.abs(a[:, i]))) - abs(a[i, i])
            r = float(np.sum(np.abs(a[i, :]))) - abs(a[i, i])
            if c == 0.0 or r == 0.0:
                continue
            g = r / _RADIX
            f = 1.0
            s = c + r
            while c < g:
                f *= _RADIX
                c *= sqrdx
            g = r * _RADIX
            while c > g:
                f /= _RADIX
                c /= sqrdx
            if (c + r) / f < 0.95 * s:
                done = False
                a[i, :] /= f
                a[:, i] *= f
    return a


def hessenberg(a: np.ndarray) -> np.ndarray:
    """Réduction de Householder à la forme de Hessenberg supérieure (en place)"""
    n = a.shape[0]
    for k in range(n - 2):
        x = a[k + 1:, k]
        norm_x = float(np.linalg.norm(x))
        if norm_x == 0.0:
            continue
        alpha = -math.copysign(norm_x, x[0])
        v = x.copy()
        v[0] -= alpha
        norm_v = float(np.linalg.norm(v))
        if norm_v == 0.0:
            continue
        v /= norm_v
        a[k + 1:, k:] -= 2.0 * np.outer(v, v @ a[k + 1:, k:])
        a[:, k + 1:] -= 2.0 * np.outer(a[:, k + 1:] @ v, v)
        a[k + 2:, k] = 0.0
    return a


def eigenvalues_2x2(a: np.ndarray) -> np.ndarray:
    """Valeurs propres d'une matrice 2×2 par la forme fermée trace/déterminant"""
    p = 0.5 * (a[0, 0] - a[1, 1])
    w = a[0, 1] * a[1, 0]
    mean = 0.5 * (a[0, 0] + a[1, 1])
    disc = p * p + w
    if disc >= 0.0:
        root = math.sqrt(disc)
        # Racine de plus grand module d'abord, l'autre via le produit
        first = mean + math.copysign(root, mean)
        det = a[0, 0] * a[1, 1] - w
        second = det / first if first != 0.0 else 0.0
        return np.array([first, second], dtype=complex)
    root = math.sqrt(-disc)
    return np.array([complex(mean, root), complex(mean, -root)])


def hessenberg_qr(a: np.ndarray, max_sweeps: int) -> np.ndarray:
    """
    QR de Francis à double décalage sur une matrice de Hessenberg (en place)

    Les paires complexes conjuguées sortent des blocs 2×2 de la forme de
    Schur réelle. Décalages exceptionnels aux itérations 10 et 20 d'une
    même valeur propre.

    Args:
        a: Matrice de Hessenberg supérieure
        max_sweeps: Nombre total d'itérations QR autorisées

    Returns:
        Valeurs propres (complexes), dans l'ordre de déflation

    Raises:
        NumericalFailureError: Budget d'itérations dépassé
    """
    n = a.shape[0]
    wr = np.zeros(n)
    wi = np.zeros(n)
    anorm = float(np.sum(np.abs(np.triu(a, -1))))
    nn = n - 1
    shift = 0.0
    sweeps = 0

    while nn >= 0:
        its = 0
        while True:
            # Plus petit élément sous-diagonal négligeable
            l = nn
            while l >= 1:
                s = abs(a[l - 1, l - 1]) + abs(a[l, l])
                if s == 0.0:
                    s = anorm
                if abs(a[l, l - 1]) <= _EPS * s:
                    a[l, l - 1] = 0.0
                    break
                l -= 1

            x = a[nn, nn]
            if l == nn:
                wr[nn] = x + shift
                wi[nn] = 0.0
                nn -= 1
            else:
                y = a[nn - 1, nn - 1]
                w = a[nn, nn - 1] * a[nn - 1, nn]
                if l == nn - 1:
                    p = 0.5 * (y - x)
                    q = p * p + w
                    z = math.sqrt(abs(q))
                    x += shift
                    if q >= 0.0:
                        z = p + math.copysign(z, p)
                        wr[nn - 1] = wr[nn] = x + z
                        if z != 0.0:
                            wr[nn] = x - w / z
                        wi[nn - 1] = wi[nn] = 0.0
                    else:
                        wr[nn - 1] = wr[nn] = x + p
                        wi[nn] = z
                        wi[nn - 1] = -z
                    nn -= 2
                else:
                    if sweeps >= max_sweeps:
                        residual = abs(a[nn, nn - 1])
                        raise NumericalFailureError(
                            f"QR non convergé après {sweeps} itérations (n={n})",
                            residual=residual,
                        )
                    if its in (10, 20):
                        shift += x
                        idx = np.arange(nn + 1)
                        a[idx, idx] -= x
                        s = abs(a[nn, nn - 1]) + abs(a[nn - 1, nn - 2])
                        y = x = 0.75 * s
                        w = -0.4375 * s * s
                    its += 1
                    sweeps += 1
                    _francis_step(a, l, nn, x, y, w)

            if not l < nn - 1:
                break

    logger.debug("QR: %d itérations pour n=%d", sweeps, n)
    return wr + 1j * wi


def _francis_step(a: np.ndarray, l: int, nn: int, x: float, y: float, w: float) -> None:
    # Deux éléments sous-diagonaux consécutifs petits
    m = nn - 2
    while m >= l:
        z = a[m, m]
        r = x - z
        s = y - z
        p = (r * s - w) / a[m + 1, m] + a[m, m + 1]
        q = a[m + 1, m + 1] - z - r - s
        r = a[m + 2, m + 1]
        s = abs(p) + abs(q) + abs(r)
        p /= s
        q /= s
        r /= s
        if m == l:
            break
        u = abs(a[m, m - 1]) * (abs(q) + abs(r))
        v = abs(p) * (abs(a[m - 1, m - 1]) + abs(z) + abs(a[m + 1, m + 1]))
        if u <= _EPS * v:
            break
        m -= 1

    for i in range(m + 2, nn + 1):
        a[i, i - 2] = 0.0
        if i != m + 2:
            a[i, i - 3] = 0.0

    for k in range(m, nn):
        if k != m:
            p = a[k, k - 1]
            q = a[k + 1, k - 1]
            r = a[k + 2, k - 1] if k != nn - 1 else 0.0
            x = abs(p) + abs(q) + abs(r)
            if x != 0.0:
                p /= x
                q /= x
                r /= x
        s = math.copysign(math.sqrt(p * p + q * q + r * r), p)
        if s == 0.0:
            continue
        if k == m:
            if l != m:
                a[k, k - 1] = -a[k, k - 1]
        else:
            a[k, k - 1] = -s * x
        p += s
        x = p / s
        y = q / s
        z = r / s
        q /= p
        r /= p

        # Lignes k..k+2
        cols = slice(k, nn + 1)
        row = a[k, cols] + q * a[k + 1, cols]
        if k != nn - 1:
            row += r * a[k + 2, cols]
            a[k + 2, cols] -= row * z
        a[k + 1, cols] -= row * y
        a[k, cols] -= row * x

        # Colonnes k..k+2
        rows = slice(l, min(nn, k + 3) + 1)
        col = x * a[rows, k] + y * a[rows, k + 1]
        if k != nn - 1:
            col += z * a[rows, k + 2]
            a[rows, k + 2] -= col * r
        a[rows, k + 1] -= col * q
        a[rows, k] -= col


def sort_spectrum(values: np.ndarray) -> np.ndarray:
    """Tri par module décroissant, puis partie réelle, puis partie imaginaire"""
    values = np.asarray(values, dtype=complex)
    order = np.lexsort((-values.imag, -values.real, -np.abs(values)))
    return values[order]


def dense_eigenvalues(matrix: np.ndarray, sweeps_per_dim: int = 30) -> np.ndarray:
    """
    Valeurs propres d'une matrice réelle carrée

    Forme fermée pour n <= 2, sinon mise à l'échelle, équilibrage,
    Hessenberg et QR de Francis.

    Returns:
        Valeurs propres triées (voir sort_spectrum)
    """
    a = np.array(matrix, dtype=float)
    n = a.shape[0]
    if n == 1:
        return a[0].astype(complex)
    scale = float(np.max(np.abs(a)))
    if scale == 0.0:
        return np.zeros(n, dtype=complex)
    a /= scale
    if n == 2:
        values = eigenvalues_2x2(a)
    else:
        balance(a)
        hessenberg(a)
        values = hessenberg_qr(a, max_sweeps=sweeps_per_dim * n)
    return sort_spectrum(values * scale)


# ===== Valeurs singulières =====
@lru_cache(maxsize=64)
def round_robin_pairs(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """
    Ordonnancement circulaire des paires de colonnes

    Chaque tour contient des paires disjointes; n-1 tours (n pair)
    couvrent toutes les paires une fois.
    """
    players = list(range(n + (n % 2)))
    size = len(players)
    rounds = []
    for _ in range(size - 1):
        left = []
        right = []
        for i in range(size // 2):
            p, q = players[i], players[size - 1 - i]
            if p < n and q < n:
                left.append(min(p, q))
                right.append(max(p, q))
        rounds.append((np.array(left, dtype=int), np.array(right, dtype=int)))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def _scaled_norms(columns: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Normes de colonnes sans sous-dépassement: (échelle, norme relative)"""
    scale = np.max(np.abs(columns), axis=0)
    safe = np.where(scale > 0.0, scale, 1.0)
    rel = np.sqrt(np.sum((columns / safe) ** 2, axis=0))
    return scale, rel


def jacobi_singular_values(matrix: np.ndarray, tol: float = 1e-15, max_sweeps: int = 60) -> np.ndarray:
    """
    Valeurs singulières par orthogonalisation de Jacobi unilatérale

    Les rotations d'un même tour portent sur des paires disjointes et sont
    appliquées ensemble. Les produits scalaires sont calculés sur des colonnes
    normalisées par leur plus grand élément, ce qui conserve la précision
    relative des valeurs singulières jusqu'à ~1e-300.

    Args:
        matrix: Matrice réelle (m × n)
        tol: Seuil d'orthogonalité relatif
        max_sweeps: Nombre maximal de balayages

    Returns:
        Valeurs singulières décroissantes (n valeurs)
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2:
        raise InvalidArgumentError("matrice 2D attendue")
    rows, n = a.shape
    threshold = max(tol, _EPS * math.sqrt(rows))

    if n > 1:
        schedule = round_robin_pairs(n)
        for sweep in range(max_sweeps):
            rotated = False
            for p_idx, q_idx in schedule:
                ap = a[:, p_idx]
                aq = a[:, q_idx]
                mp = np.max(np.abs(ap), axis=0)
                mq = np.max(np.abs(aq), axis=0)
                live = (mp > 0.0) & (mq > 0.0)
                if not np.any(live):
                    continue
                mp_safe = np.where(live, mp, 1.0)
                mq_safe = np.where(live, mq, 1.0)
                up = ap / mp_safe
                uq = aq / mq_safe
                alpha = np.sum(up * up, axis=0)
                beta = np.sum(uq * uq, axis=0)
                gamma = np.sum(up * uq, axis=0)
                off = np.abs(gamma) / np.sqrt(np.where(live, alpha * beta, 1.0))
                active = live & (off > threshold)
                if not np.any(active):
                    continue
                rotated = True
                ratio = mq_safe / mp_safe
                gamma_safe = np.where(active, gamma, 1.0)
                zeta = (ratio * beta - alpha / ratio) / (2.0 * gamma_safe)
                t = np.sign(zeta) / (np.abs(zeta) + np.hypot(1.0, zeta))
                t = np.where(zeta == 0.0, 1.0, t)
                c = 1.0 / np.hypot(1.0, t)
                s = c * t
                c = np.where(active, c, 1.0)
                s = np.where(active, s, 0.0)
                a[:, p_idx] = c * ap - s * aq
                a[:, q_idx] = s * ap + c * aq
            if not rotated:
                logger.debug("Jacobi: convergence en %d balayages (n=%d)", sweep + 1, n)
                break
        else:
            logger.debug("Jacobi: %d balayages atteints (n=%d)", max_sweeps, n)

    scale, rel = _scaled_norms(a)
    return np.sort(scale * rel)[::-1]


# ===== Déterminant =====
def lu_determinant(matrix: np.ndarray) -> float:
    """
    Déterminant par factorisation LU à pivot partiel

    Returns:
        det(matrix)
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidArgumentError(f"matrice carrée attendue (forme {a.shape})")
    n = a.shape[0]
    det = 1.0
    for k in range(n):
        pivot = k + int(np.argmax(np.abs(a[k:, k])))
        if a[pivot, k] == 0.0:
            return 0.0
        if pivot != k:
            a[[k, pivot]] = a[[pivot, k]]
            det = -det
        det *= a[k, k]
        if k + 1 < n:
            factors = a[k + 1:, k] / a[k, k]
            a[k + 1:, k + 1:] -= np.outer(factors, a[k, k + 1:])
    return det
