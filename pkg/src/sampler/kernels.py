"""
Noyaux numba de l'échantillonneur.

Les noyaux reçoivent la loi sous forme de tableaux (fonction de répartition,
table guide, degrés) et le numpy.random.Generator de la réplique, dont numba
partage directement l'état PCG64.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def draw_degree(cdf, guide, degrees, rng):
    """Inverse de la fonction de répartition accéléré par la table guide."""
    u = rng.random()
    j = guide[int(u * guide.shape[0])]
    while cdf[j] <= u:
        j += 1
    return degrees[j]


@njit(cache=True)
def rejection_kernel(cdf, guide, degrees, n, max_rejections, rng):
    """
    Tire (ξ_1, …, ξ_n) i.i.d. jusqu'à S_n = n − 1 puis applique la rotation valide.

    Un essai est abandonné dès que la somme partielle dépasse n − 1.

    Returns:
        (suite, essais) ; suite vide si max_rejections essais ont échoué
    """
    buffer = np.empty(n, dtype=np.int64)
    target = n - 1
    attempts = 0
    while attempts < max_rejections:
        attempts += 1
        total = 0
        filled = 0
        for i in range(n):
            d = draw_degree(cdf, guide, degrees, rng)
            total += d
            if total > target:
                break
            buffer[i] = d
            filled += 1
        if filled != n or total != target:
            continue

        # Lemme cyclique : décalage = 1 + première position du minimum de Σ(d_i − 1)
        running = 0
        lowest = 1
        position = 0
        for i in range(n):
            running += buffer[i] - 1
            if running < lowest:
                lowest = running
                position = i
        offset = (position + 1) % n
        out = np.empty(n, dtype=np.int64)
        for i in range(n):
            out[i] = buffer[(i + offset) % n]
        return out, attempts
    return np.empty(0, dtype=np.int64), attempts


@njit(cache=True)
def branching_kernel(cdf, guide, degrees, size_cap, rng):
    """
    Réalise un arbre de Galton-Watson non conditionné, nœuds générés en préordre.

    Returns:
        (suite, ok) ; ok vaut False si la population vivante dépasserait size_cap
    """
    buffer = np.empty(min(size_cap, 1024), dtype=np.int64)
    count = 0
    open_slots = 1
    while open_slots > 0:
        d = draw_degree(cdf, guide, degrees, rng)
        open_slots += d - 1
        if count + 1 + open_slots > size_cap:
            return buffer[:0].copy(), False
        if count == buffer.shape[0]:
            grown = np.empty(min(2 * buffer.shape[0], size_cap), dtype=np.int64)
            grown[:count] = buffer[:count]
            buffer = grown
        buffer[count] = d
        count += 1
    return buffer[:count].copy(), True


@njit(cache=True)
def degree_batch_kernel(cdf, guide, degrees, size, rng):
    """Tirage vectoriel de size degrés (tests de la table guide)."""
    out = np.empty(size, dtype=np.int64)
    for i in range(size):
        out[i] = draw_degree(cdf, guide, degrees, rng)
    return out
