"""
Statistiques des campagnes : lois empiriques, distance en variation totale
face à une loi de Poisson exacte, biais du plug-in et quantiles.
"""

from __future__ import annotations

import math
from typing import Dict, Sequence

import numpy as np
from numpy.typing import NDArray
from scipy import stats

from ..analysis.exact import poisson_pmf, poisson_support

QUANTILE_LEVELS: Sequence[float] = (0.05, 0.25, 0.5, 0.75, 0.95)


def histogram(values: NDArray[np.int64]) -> Dict[int, int]:
    """Histogramme {valeur: effectif} d'une statistique entière."""
    unique, counts = np.unique(np.asarray(values, dtype=np.int64), return_counts=True)
    return {int(v): int(c) for v, c in zip(unique, counts)}


def empirical_pmf(values: NDArray[np.int64], support: int) -> NDArray[np.float64]:
    """Loi empirique sur 0..support−1 (valeurs hors support ignorées)."""
    values = np.asarray(values, dtype=np.int64)
    counts = np.bincount(values[(values >= 0) & (values < support)], minlength=support)
    return counts / max(1, values.size)


def empirical_tv(values: NDArray[np.int64], mu: float) -> float:
    """
    d_TV entre la loi empirique des valeurs et Po(μ) exacte.

    La loi de Poisson est coupée à une masse de queue < 1e-12 ; le support
    couvre aussi la plus grande valeur observée.
    """
    values = np.asarray(values, dtype=np.int64)
    support = max(poisson_support(mu), int(values.max(initial=0)) + 1)
    difference = np.abs(empirical_pmf(values, support) - poisson_pmf(mu, support))
    return float(min(1.0, 0.5 * difference.sum()))


def tv_bias_bound(support_size: int, replicates: int) -> float:
    """Majorant du biais du plug-in : 0.5 · √(support/R)."""
    return 0.5 * math.sqrt(support_size / max(1, replicates))


def effective_support(mu: float, values: NDArray[np.int64]) -> int:
    """Nombre de valeurs où la loi de référence ou la loi empirique a de la masse."""
    values = np.asarray(values, dtype=np.int64)
    reference = poisson_pmf(mu, poisson_support(mu))
    relevant = set(np.flatnonzero(reference > 1e-6).tolist()) | set(np.unique(values).tolist())
    return len(relevant)


def quantiles(values: NDArray, levels: Sequence[float] = QUANTILE_LEVELS) -> Dict[str, float]:
    """Quantiles empiriques (méthode "lower" pour rester sur les valeurs observées)."""
    array = np.asarray(values)
    return {f"q{int(round(level * 100)):02d}": float(np.quantile(array, level, method="lower")) for level in levels}


def median(values: NDArray) -> float:
    """Médiane basse (valeur observée)."""
    return float(np.quantile(np.asarray(values), 0.5, method="lower"))


def skewness(values: NDArray) -> float:
    """Asymétrie empirique (0 pour un échantillon constant)."""
    array = np.asarray(values, dtype=np.float64)
    if array.size < 3 or np.all(array == array[0]):
        return 0.0
    return float(stats.skew(array))


def variance_mean_ratio(values: NDArray) -> float:
    """Variance empirique (non biaisée) divisée par la moyenne."""
    array = np.asarray(values, dtype=np.float64)
    mean = float(array.mean())
    if mean == 0.0 or array.size < 2:
        return math.nan
    return float(array.var(ddof=1)) / mean
