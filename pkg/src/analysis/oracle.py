"""
Module oracle : vérité terrain par énumération complète aux petites tailles.

La loi exacte de 𝒯_n est obtenue en pondérant chaque arbre de taille n par
∏ p_{d_i}. Les comptages passent par un appariement récursif sur tuples
imbriqués, indépendant des noyaux du recensement.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from ..models.offspring import OffspringDistribution
from ..models.tree import Nested, PlaneTree, TreeKey, enumerate_trees, to_nested
from ..utils.constants import MAX_ORACLE_SIZE
from ..utils.enums import CountMode
from ..utils.errors import CapExceededError, UndefinedConditionalError
from ..utils.logger import get_logger
from .exact import poisson_pmf, poisson_support

logger = get_logger("ORACLE")


@dataclass
class ExactLaw:
    """
    Loi exacte de 𝒯_n.

    Attributes:
        n: Taille
        entries: {TreeKey: P(𝒯_n = T)}
        total_mass: Σ π(T) avant normalisation, égale à P(|𝒯| = n)
        trees: Arbres du support, dans l'ordre d'énumération
    """

    n: int
    entries: Dict[TreeKey, float]
    total_mass: float
    trees: List[PlaneTree] = field(default_factory=list, repr=False)

    def prob(self, tree: PlaneTree) -> float:
        return self.entries.get(tree.key, 0.0)


@dataclass
class CountLaw:
    """
    Loi exacte d'un comptage de motif dans 𝒯_n.

    Attributes:
        pmf: {comptage: probabilité}
        mean: Espérance
        variance: Variance
        second_factorial: E N(N − 1)
        reference_mean: n π(T) (mode frange) ou n π^nf(T) (mode non frange)
        tv_to_poisson: d_TV(N, Po(reference_mean))
    """

    pmf: Dict[int, float]
    mean: float
    variance: float
    second_factorial: float
    reference_mean: float
    tv_to_poisson: float


# === Appariement récursif indépendant ===


def _fringe_matches(node: Nested, pattern: Nested) -> int:
    total = 1 if node == pattern else 0
    for child in node:
        total += _fringe_matches(child, pattern)
    return total


def _embeds_at_root(node: Nested, pattern: Nested) -> bool:
    if not pattern:
        return True
    if len(node) != len(pattern):
        return False
    return all(_embeds_at_root(child, sub) for child, sub in zip(node, pattern))


def _nonfringe_matches(node: Nested, pattern: Nested) -> int:
    total = 1 if _embeds_at_root(node, pattern) else 0
    for child in node:
        total += _nonfringe_matches(child, pattern)
    return total


def oracle_count(host: PlaneTree, pattern: PlaneTree, mode: CountMode) -> int:
    """Comptage de référence par récursion sur tuples imbriqués."""
    host_nested, pattern_nested = to_nested(host.degrees), to_nested(pattern.degrees)
    if mode is CountMode.FRINGE:
        return _fringe_matches(host_nested, pattern_nested)
    return _nonfringe_matches(host_nested, pattern_nested)


# === Loi exacte de 𝒯_n ===

_LAW_CACHE: Dict[Tuple[str, int], ExactLaw] = {}
_LAW_LOCK = threading.Lock()


def _weight(dist: OffspringDistribution, tree: PlaneTree) -> float:
    weight = 1.0
    for degree in tree.degrees.tolist():
        weight *= dist.prob(degree)
        if weight == 0.0:
            break
    return weight


def exact_conditional_distribution(dist: OffspringDistribution, n: int) -> ExactLaw:
    """
    Loi exacte de 𝒯_n par énumération de tous les arbres de taille n.

    Raises:
        CapExceededError: Si n > 12
        UndefinedConditionalError: Si la masse totale est nulle
    """
    if n < 1:
        raise ValueError("n doit être ≥ 1")
    if n > MAX_ORACLE_SIZE:
        raise CapExceededError(f"oracle limité à n ≤ {MAX_ORACLE_SIZE} (reçu {n})")
    cache_key = (dist.fingerprint, n)
    cached = _LAW_CACHE.get(cache_key)
    if cached is not None:
        return cached

    weighted = [(tree, _weight(dist, tree)) for tree in enumerate_trees(n)]
    weighted = [(tree, w) for tree, w in weighted if w > 0.0]
    total = math.fsum(w for _, w in weighted)
    if total <= 0.0:
        raise UndefinedConditionalError(f"aucun arbre possible de taille {n} pour {dist.name}")

    law = ExactLaw(
        n=n,
        entries={tree.key: w / total for tree, w in weighted},
        total_mass=total,
        trees=[tree for tree, _ in weighted],
    )
    with _LAW_LOCK:
        _LAW_CACHE[cache_key] = law
    logger.debug(f"loi exacte de 𝒯_{n} ({dist.name}) : {len(weighted)} arbres")
    return law


def exact_count_pmf(
    dist: OffspringDistribution,
    n: int,
    pattern: PlaneTree,
    mode: CountMode,
) -> CountLaw:
    """
    Loi exacte de N_T(𝒯_n) ou N^nf_T(𝒯_n), avec moments et distance à la loi de Poisson.

    Args:
        dist: Loi de reproduction
        n: Taille (≤ 12)
        pattern: Motif T
        mode: FRINGE ou NONFRINGE
    """
    law = exact_conditional_distribution(dist, n)
    pmf: Dict[int, float] = {}
    for tree in law.trees:
        count = oracle_count(tree, pattern, mode)
        pmf[count] = pmf.get(count, 0.0) + law.entries[tree.key]

    mean = math.fsum(c * p for c, p in pmf.items())
    second_factorial = math.fsum(c * (c - 1) * p for c, p in pmf.items())
    variance = second_factorial + mean - mean * mean

    if mode is CountMode.FRINGE:
        reference = n * _weight(dist, pattern)
    else:
        reference = n * math.prod(dist.prob(d) for d in pattern.degrees.tolist() if d > 0)

    support = max(poisson_support(reference), max(pmf) + 1)
    empirical = np.zeros(support)
    for count, p in pmf.items():
        empirical[count] = p
    tv = 0.5 * float(np.abs(empirical - poisson_pmf(reference, support)).sum())

    return CountLaw(
        pmf=dict(sorted(pmf.items())),
        mean=mean,
        variance=variance,
        second_factorial=second_factorial,
        reference_mean=reference,
        tv_to_poisson=min(1.0, tv),
    )


def clear_oracle_cache() -> None:
    with _LAW_LOCK:
        _LAW_CACHE.clear()
