"""
Noyaux numba des parcours de suites de degrés en préordre (indices 0-based).
"""

import numpy as np
from numba import njit


@njit(cache=True)
def subtree_sizes_kernel(degrees):
    """Taille du sous-arbre frange de chaque nœud (parcours préordre inversé avec pile)."""
    n = degrees.shape[0]
    sizes = np.empty(n, dtype=np.int64)
    stack = np.empty(n, dtype=np.int64)
    top = 0
    for i in range(n - 1, -1, -1):
        total = 1
        for _ in range(degrees[i]):
            top -= 1
            total += stack[top]
        sizes[i] = total
        stack[top] = total
        top += 1
    return sizes


@njit(cache=True)
def span_end_kernel(degrees, start):
    """Dernier indice du sous-arbre frange enraciné en start."""
    need = 1
    j = start
    while True:
        need += degrees[j] - 1
        if need == 0:
            return j
        j += 1
