"""
Module des seuils asymptotiques.

Bornes du collectionneur de coupons généralisé, constante α_r des hauteurs
franges, centres des hauteurs maximales, prédiction de K_n selon le régime
de la loi, et dénombrement trinomial des arbres à deux degrés internes.

Tous les logarithmes sont naturels, sauf log_r écrit explicitement en base r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from ..models.offspring import OffspringDistribution, constants
from ..utils.enums import KRegime
from ..utils.errors import InvalidDistributionError
from ..utils.logger import get_logger

logger = get_logger("THRESHOLDS")

# Exposant minimal d'une queue ajustée pour la classer super-exponentielle
SUPER_EXPONENTIAL_MIN_EXPONENT: float = 1.05


# === Collectionneur de coupons ===


def coupon_bounds(probs: Sequence[float], m: float) -> Tuple[float, float]:
    """
    Bornes de P(N ≤ m), N = nombre de tirages pour voir tous les types.

    Returns:
        (1 − Σ(1 − p_i)^m, min(1, 1/Σ(1 − p_i)^m)) ; la borne basse n'est pas tronquée à 0
    """
    p = np.asarray(probs, dtype=np.float64)
    if p.size == 0 or np.any(p <= 0.0):
        raise ValueError("coupon_bounds exige des probabilités strictement positives")
    missing = float(np.sum((1.0 - p) ** m))
    lower = 1.0 - missing
    upper = 1.0 if missing == 0.0 else min(1.0, 1.0 / missing)
    return lower, upper


def simulate_coupon_collector(
    probs: Sequence[float],
    m: int,
    trials: int,
    rng: np.random.Generator,
) -> float:
    """
    Estimation Monte Carlo de P(N ≤ m).

    La masse manquante 1 − Σ p_i (si > 0) est un type neutre qui ne compte pas.
    """
    p = np.asarray(probs, dtype=np.float64)
    leftover = max(0.0, 1.0 - float(p.sum()))
    pvals = np.append(p / max(1.0, float(p.sum())), leftover)
    counts = rng.multinomial(int(m), pvals, size=trials)
    collected = np.all(counts[:, :-1] > 0, axis=1)
    return float(collected.mean())


# === Hauteurs ===


def alpha_r(dist: OffspringDistribution, r: int) -> float:
    """
    α_r = log_r(log(1/p_0) + log(1/p_r)/(r − 1)).

    Raises:
        InvalidDistributionError: Si p_r = 0
    """
    if r < 2:
        raise ValueError("alpha_r exige r ≥ 2")
    if not dist.supports(r):
        raise InvalidDistributionError(f"p_{r} = 0 pour {dist.name} : α_{r} indéfini")
    inner = -dist.log_prob(0) - dist.log_prob(r) / (r - 1)
    return math.log(inner) / math.log(r)


def _chain_height(dist: OffspringDistribution, n: int) -> float:
    if not dist.supports(1):
        raise InvalidDistributionError(f"p_1 = 0 pour {dist.name} : aucune chaîne possible")
    return math.log(n) / -dist.log_prob(1)


def predict_fringe_height(dist: OffspringDistribution, n: int, r: int) -> float:
    """Centre de H_{n,r} : log_r log n − α_r (r ≥ 2), log_{1/p_1} n (r = 1)."""
    if r == 1:
        return _chain_height(dist, n)
    return math.log(math.log(n)) / math.log(r) - alpha_r(dist, r)


def predict_nonfringe_height(dist: OffspringDistribution, n: int, r: int) -> float:
    """Centre de H̃_{n,r} : log_r log n (r ≥ 2), log_{1/p_1} n (r = 1)."""
    if r == 1:
        return _chain_height(dist, n)
    if not dist.supports(r):
        raise InvalidDistributionError(f"p_{r} = 0 pour {dist.name}")
    return math.log(math.log(n)) / math.log(r)


def nonfringe_internal_cutoff(dist: OffspringDistribution, n: int) -> float:
    """C_1 log n, C_1 = 2/log(1/p_max) : au-delà, n π^nf(T) → 0 pour tout T."""
    return 2.0 * math.log(n) / -math.log(dist.p_max)


# === Seuil K_n ===


@dataclass(frozen=True)
class KPrediction:
    """
    Prédiction du centre de K_n.

    Attributes:
        value: Centre prédit
        regime: Régime utilisé
        heuristic: True si le régime a été choisi automatiquement (meilleur effort)
        detail: Paramètres utilisés, pour les rapports
    """

    value: float
    regime: KRegime
    heuristic: bool
    detail: str


def fit_tail(dist: OffspringDistribution, min_degree: int = 2) -> Optional[Tuple[float, float]]:
    """
    Ajuste log(1/p_i) ≈ c · i^a sur le support stocké (moindres carrés log-log).

    Returns:
        (c, a), ou None si moins de trois points exploitables
    """
    points = [(int(d), -dist.log_prob(int(d))) for d in dist.degrees if d >= min_degree]
    points = [(i, value) for i, value in points if value > 0.0]
    if len(points) < 3:
        return None
    x = np.log([i for i, _ in points])
    y = np.log([value for _, value in points])
    a, log_c = np.polyfit(x, y, 1)
    return float(math.exp(log_c)), float(a)


def _well_behaved(n: int, L: float) -> float:
    m = math.log(n)
    return (m - math.log(m)) / math.log(1.0 / L)


def _super_exponential(n: int, c: float, a: float) -> float:
    return (math.log(n) / c) ** (1.0 / a) + 1.0


def _cayley(n: int, gamma: float) -> float:
    m = math.log(n)
    m1 = math.log(m / gamma)
    m2 = math.log(m1)
    return m / (gamma * (m1 - m2)) * (1.0 - m2 / (m1 * (m1 - m2)))


def _first_order(n: int, gamma: float, alpha: float, beta: float) -> float:
    m = math.log(n)
    return (m / (gamma * math.log(m ** (1.0 / alpha)) ** beta)) ** (1.0 / alpha)


def predict_K(
    dist: OffspringDistribution,
    n: int,
    regime: Optional[KRegime] = None,
    gamma: Optional[float] = None,
    alpha: float = 1.0,
    beta: float = 0.0,
) -> KPrediction:
    """
    Centre asymptotique de K_n.

    Sans régime explicite, une heuristique choisit : κ fini → loi du second
    ordre ; loi de Poisson → formule raffinée avec γ = 1 ; queue ajustée
    d'exposant > 1.05 → f^{-1}(log n) + 1 ; sinon loi du premier ordre.

    Args:
        dist: Loi de reproduction
        n: Taille (≥ 3)
        regime: Régime imposé par l'appelant
        gamma, alpha, beta: Constantes des régimes de Cayley et du premier ordre

    Returns:
        KPrediction
    """
    if n < 3:
        raise ValueError("predict_K exige n ≥ 3")
    consts = constants(dist)
    heuristic = regime is None

    if regime is None:
        fitted = fit_tail(dist) if consts.L_truncated else None
        if consts.well_behaved and consts.L > 0.0:
            regime = KRegime.WELL_BEHAVED
        elif dist.tail_family == "poisson":
            regime = KRegime.CAYLEY
        elif dist.tail_family == "gaussian" or (fitted is not None and fitted[1] > SUPER_EXPONENTIAL_MIN_EXPONENT):
            regime = KRegime.SUPER_EXPONENTIAL
        else:
            regime = KRegime.FIRST_ORDER

    if regime is KRegime.WELL_BEHAVED:
        if consts.L <= 0.0:
            raise InvalidDistributionError("régime bien élevé demandé avec L = 0")
        value = _well_behaved(n, consts.L)
        detail = f"L={consts.L:.6g}, κ={consts.kappa}"
    elif regime is KRegime.SUPER_EXPONENTIAL:
        if dist.tail_family == "gaussian":
            c, a = dist.tail_params[0], 2.0
        else:
            fitted = fit_tail(dist)
            if fitted is None:
                raise InvalidDistributionError("support trop court pour ajuster une queue super-exponentielle")
            c, a = fitted
        value = _super_exponential(n, c, a)
        detail = f"f(i)={c:.6g}·i^{a:.4g}"
    elif regime is KRegime.CAYLEY:
        g = gamma if gamma is not None else 1.0
        value = _cayley(n, g)
        detail = f"γ={g:g}"
    else:
        g = gamma
        if g is None:
            if consts.L <= 0.0:
                raise InvalidDistributionError("loi du premier ordre : γ requis quand L = 0")
            g = math.log(1.0 / consts.L)
        value = _first_order(n, g, alpha, beta)
        detail = f"γ={g:.6g}, α={alpha:g}, β={beta:g}"

    logger.debug(f"K_{n} ≈ {value:.4f} ({regime.value}{', heuristique' if heuristic else ''})")
    return KPrediction(value=value, regime=regime, heuristic=heuristic, detail=detail)


# === Dénombrement ===


def trinomial_tree_count(
    k: int,
    n0: int,
    ni: int,
    nj: int,
    i: int,
    j: Optional[int] = None,
) -> int:
    """
    Nombre d'arbres de taille k avec n0 feuilles, ni nœuds de degré i et nj de degré j.

    Vaut (1/k) · k!/(n0! ni! nj!).

    Raises:
        ValueError: Si n0 + ni + nj ≠ k ou i·ni + j·nj ≠ k − 1
    """
    if min(k, n0, ni, nj) < 0 or k < 1:
        raise ValueError("effectifs négatifs ou k < 1")
    if nj > 0 and j is None:
        raise ValueError("j est requis quand nj > 0")
    if n0 + ni + nj != k:
        raise ValueError(f"n0 + ni + nj = {n0 + ni + nj} ≠ k = {k}")
    degree_sum = i * ni + (j or 0) * nj
    if degree_sum != k - 1:
        raise ValueError(f"somme des degrés {degree_sum} ≠ k − 1 = {k - 1}")
    multinomial = math.factorial(k) // (math.factorial(n0) * math.factorial(ni) * math.factorial(nj))
    count, remainder = divmod(multinomial, k)
    if remainder:
        raise ValueError("coefficient multinomial non divisible par k")
    return count

