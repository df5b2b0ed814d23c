"""
Noyaux numba des parcours linéaires de suites de degrés.

Toutes les fonctions prennent des tableaux int64 contigus (degrés en préordre)
et travaillent en indices 0-based. Les fonctions publiques de census et exact
se chargent des conversions et des vérifications.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def naive_fringe_count(host, pattern):
    """Occurrences de pattern comme facteur contigu de host, en O(n·k)."""
    n = host.shape[0]
    k = pattern.shape[0]
    count = 0
    for i in range(n - k + 1):
        matched = True
        for j in range(k):
            if host[i + j] != pattern[j]:
                matched = False
                break
        if matched:
            count += 1
    return count


@njit(cache=True)
def kmp_fringe_count(host, pattern):
    """Même comptage en O(n + k) par Knuth-Morris-Pratt."""
    n = host.shape[0]
    k = pattern.shape[0]
    if k > n:
        return 0
    failure = np.zeros(k, dtype=np.int64)
    length = 0
    for i in range(1, k):
        while length > 0 and pattern[i] != pattern[length]:
            length = failure[length - 1]
        if pattern[i] == pattern[length]:
            length += 1
        failure[i] = length

    count = 0
    q = 0
    for i in range(n):
        while q > 0 and host[i] != pattern[q]:
            q = failure[q - 1]
        if host[i] == pattern[q]:
            q += 1
        if q == k:
            count += 1
            q = failure[q - 1]
    return count


@njit(cache=True)
def nonfringe_match_at(host, sizes, pattern, v):
    """True si pattern ⪯ host_v : nœuds internes de degré égal, feuilles libres."""
    h = v
    for j in range(pattern.shape[0]):
        if pattern[j] == 0:
            # Une feuille du motif absorbe tout le sous-arbre hôte
            h += sizes[h]
        else:
            if host[h] != pattern[j]:
                return False
            h += 1
    return True


@njit(cache=True)
def nonfringe_count_kernel(host, sizes, pattern):
    """Nombre de nœuds v avec pattern ⪯ host_v (O(n·|pattern|) au pire)."""
    count = 0
    root_degree = pattern[0]
    for v in range(host.shape[0]):
        if root_degree != 0 and host[v] != root_degree:
            continue
        if nonfringe_match_at(host, sizes, pattern, v):
            count += 1
    return count


@njit(cache=True)
def fringe_ary_height_kernel(degrees, r):
    """
    Hauteur maximale d'un arbre r-aire complet présent comme sous-arbre frange.

    Une feuille est complète de hauteur 0 ; un nœud de degré r est complet si
    tous ses enfants sont complets de même hauteur. Retourne 0 si seul le cas
    feuille existe.
    """
    n = degrees.shape[0]
    stack = np.empty(n, dtype=np.int64)
    top = 0
    best = 0
    for i in range(n - 1, -1, -1):
        d = degrees[i]
        height = -1
        if d == 0:
            height = 0
        else:
            first = stack[top - 1]
            ok = d == r and first >= 0
            for c in range(d):
                value = stack[top - 1 - c]
                if value != first:
                    ok = False
            top -= d
            if ok:
                height = first + 1
        if height > best:
            best = height
        stack[top] = height
        top += 1
    return best


@njit(cache=True)
def nonfringe_ary_height_kernel(degrees, r):
    """max_v nf(v) avec nf(v) = 0 si deg(v) ≠ r, sinon 1 + min des enfants."""
    n = degrees.shape[0]
    stack = np.empty(n, dtype=np.int64)
    top = 0
    best = 0
    for i in range(n - 1, -1, -1):
        d = degrees[i]
        value = 0
        if d == r:
            lowest = stack[top - 1]
            for c in range(1, d):
                if stack[top - 1 - c] < lowest:
                    lowest = stack[top - 1 - c]
            value = 1 + lowest
        top -= d
        if value > best:
            best = value
        stack[top] = value
        top += 1
    return best


@njit(cache=True)
def pmin_kernel(log_p, k, tolerance):
    """
    Sac à dos non borné de p^min en espace log.

    π(T) ne dépend que du multiensemble des degrés, et tout multiensemble avec
    Σ(d − 1) = −1 est réalisé par un arbre. En retirant les feuilles, un nœud
    de degré d ≥ 1 pèse d et coûte w_d = log p_d + (d − 1) log p_0 ; un arbre de
    taille s a pour log-probabilité log p_0 + H[s − 1], où
    H[W] = min_d w_d + H[W − d].

    Args:
        log_p: log p_d pour 0 ≤ d ≤ D (−inf si non supporté)
        k: Taille maximale
        tolerance: Tolérance relative des égalités

    Returns:
        (H, choice) ; choice[W] est le plus petit degré optimal à tolérance
        près pour le poids W (−1 si W n'est pas atteignable)
    """
    max_degree = min(log_p.shape[0] - 1, k - 1)
    inf = np.inf
    H = np.full(k, inf)
    choice = np.full(k, -1, dtype=np.int64)
    H[0] = 0.0
    for W in range(1, k):
        best = inf
        for d in range(1, min(max_degree, W) + 1):
            if log_p[d] == -inf or H[W - d] == inf:
                continue
            candidate = log_p[d] + (d - 1) * log_p[0] + H[W - d]
            if candidate < best:
                best = candidate
        H[W] = best
        if best == inf:
            continue
        slack = tolerance * max(1.0, abs(best))
        for d in range(1, min(max_degree, W) + 1):
            if log_p[d] == -inf or H[W - d] == inf:
                continue
            if log_p[d] + (d - 1) * log_p[0] + H[W - d] <= best + slack:
                choice[W] = d
                break
    return H, choice
