"""
Module des calculs exacts.

Tables de convolution P(S_m = s), probabilités d'occurrence π(T) et π^nf(T),
espérances conditionnelles des comptages, moment factoriel d'ordre 2 des
comptages non franges avec l'ensemble de recouvrement {T⊞T}, programme
dynamique de p^min et distance en variation totale entre lois de Poisson.

CONVENTION : toutes les lois à support non borné sont utilisées sous leur
forme tronquée pour les convolutions ; π(T) utilise le générateur exact.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy.signal import fftconvolve
from scipy.special import gammaln, xlogy

from ..models.offspring import OffspringDistribution
from ..models.tree import Nested, PlaneTree, TreeKey, from_nested, subtree_sizes, to_nested
from ..utils.constants import (
    CONVOLUTION_REUSE_WINDOW,
    FFT_THRESHOLD,
    MAX_CONVOLUTION_LENGTH,
    MAX_PMIN_SIZE,
    POISSON_TAIL_MASS,
    RELATIVE_TIE_TOLERANCE,
    UNDERFLOW_THRESHOLD,
)
from ..utils.errors import CapExceededError, UndefinedConditionalError
from ..utils.logger import get_logger
from .kernels import pmin_kernel

logger = get_logger("EXACT")


# === Tables de convolution ===


@dataclass(frozen=True)
class ConvolutionTable:
    """
    Loi exacte de S_m = ξ_1 + … + ξ_m.

    Attributes:
        m: Nombre de termes
        values: values[s] = P(S_m = s) pour 0 ≤ s < len(values)
        s_max: Plus grande somme conservée (None si la table est complète)
        fingerprint: Empreinte de la loi
    """

    m: int
    values: NDArray[np.float64]
    s_max: Optional[int]
    fingerprint: str

    def prob(self, s: int) -> float:
        """P(S_m = s) ; 0 hors du support."""
        if s < 0:
            return 0.0
        if self.s_max is not None and s > self.s_max:
            raise ValueError(f"s = {s} au-delà de la troncature s_max = {self.s_max}")
        if s >= self.values.size:
            return 0.0
        return float(self.values[s])

    @property
    def total_mass(self) -> float:
        return float(self.values.sum())

    def as_dict(self) -> Dict[int, float]:
        """Entrées non nulles {s: P(S_m = s)}."""
        support = np.flatnonzero(self.values)
        return {int(s): float(self.values[s]) for s in support}


def _convolve_arrays(a: NDArray[np.float64], b: NDArray[np.float64], s_max: Optional[int]) -> NDArray[np.float64]:
    """Produit de convolution tronqué, directe ou par FFT selon les longueurs."""
    if s_max is not None:
        a = a[: s_max + 1]
        b = b[: s_max + 1]
    if min(a.size, b.size) >= FFT_THRESHOLD:
        out = fftconvolve(a, b)
    else:
        out = np.convolve(a, b)
    if s_max is not None:
        out = out[: s_max + 1]
    out[out < UNDERFLOW_THRESHOLD] = 0.0
    last = np.flatnonzero(out)
    return out[: int(last[-1]) + 1] if last.size else out[:1]


class ConvolutionCache:
    """
    Mémoire des tables de convolution, clé (empreinte, m, s_max).

    Lecture sans verrou sur un dictionnaire remplacé à chaque insertion ;
    insertion exclusive sous verrou.
    """

    def __init__(self, max_entries: int = 256):
        self.max_entries = max_entries
        self._tables: Dict[Tuple[str, int, Optional[int]], ConvolutionTable] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def get(self, dist: OffspringDistribution, m: int, s_max: Optional[int]) -> ConvolutionTable:
        key = (dist.fingerprint, m, s_max)
        table = self._tables.get(key)
        if table is not None:
            self.hits += 1
            return table
        self.misses += 1
        table = self._compute(dist, m, s_max)
        with self._lock:
            snapshot = dict(self._tables)
            if len(snapshot) >= self.max_entries:
                snapshot.pop(next(iter(snapshot)))
            snapshot[key] = table
            self._tables = snapshot
        logger.debug(f"table S_{m} (s_max={s_max}) ajoutée au cache ({len(self._tables)} entrées)")
        return table

    def _nearest_below(self, dist: OffspringDistribution, m: int, s_max: Optional[int]) -> Optional[ConvolutionTable]:
        best: Optional[ConvolutionTable] = None
        for (fingerprint, cached_m, cached_s_max), table in self._tables.items():
            if fingerprint != dist.fingerprint or cached_s_max != s_max:
                continue
            if cached_m <= m and m - cached_m <= CONVOLUTION_REUSE_WINDOW:
                if best is None or cached_m > best.m:
                    best = table
        return best

    def _compute(self, dist: OffspringDistribution, m: int, s_max: Optional[int]) -> ConvolutionTable:
        base = np.array(dist.dense_pmf, dtype=np.float64)
        start = self._nearest_below(dist, m, s_max)
        if start is not None:
            # Quelques pas unitaires depuis la table voisine
            acc = start.values.copy()
            for _ in range(m - start.m):
                acc = _convolve_arrays(acc, base, s_max)
            return ConvolutionTable(m=m, values=acc, s_max=s_max, fingerprint=dist.fingerprint)

        # Exponentiation rapide : S_{2j} = S_j * S_j
        acc = np.ones(1, dtype=np.float64)
        power = base
        remaining = m
        while remaining > 0:
            if remaining & 1:
                acc = _convolve_arrays(acc, power, s_max)
            remaining >>= 1
            if remaining > 0:
                power = _convolve_arrays(power, power, s_max)
        return ConvolutionTable(m=m, values=acc, s_max=s_max, fingerprint=dist.fingerprint)

    def clear(self) -> None:
        with self._lock:
            self._tables = {}
        self.hits = 0
        self.misses = 0


_CACHE = ConvolutionCache()


def convolution_cache() -> ConvolutionCache:
    return _CACHE


def convolve(dist: OffspringDistribution, m: int, s_max: Optional[int] = None) -> ConvolutionTable:
    """
    Loi exacte de S_m par convolutions successives (doublement).

    Args:
        dist: Loi de reproduction
        m: Nombre de termes (≥ 0) ; S_0 = 0
        s_max: Troncature des sommes (None pour la table complète)

    Returns:
        ConvolutionTable, depuis le cache si déjà calculée

    Raises:
        CapExceededError: Si la table dépasse le plafond mémoire
    """
    if m < 0:
        raise ValueError("m doit être ≥ 0")
    length = m * dist.max_degree + 1 if s_max is None else min(s_max, m * dist.max_degree) + 1
    if length > MAX_CONVOLUTION_LENGTH:
        raise CapExceededError(f"table de convolution de longueur {length} > {MAX_CONVOLUTION_LENGTH}")
    if m == 0:
        return ConvolutionTable(m=0, values=np.ones(1), s_max=s_max, fingerprint=dist.fingerprint)
    return _CACHE.get(dist, m, s_max)


def prob_sum(dist: OffspringDistribution, m: int, s: int, s_max: Optional[int] = None) -> float:
    """P(S_m = s)."""
    if m < 0 or s < 0 or s > m * dist.max_degree:
        return 0.0
    return convolve(dist, m, s_max if s_max is not None else s).prob(s)


# === Probabilités d'arbres ===


def log_prob_tree(dist: OffspringDistribution, tree: PlaneTree) -> float:
    """log π(T) = Σ_i log p_{d_i} (−inf si un degré n'est pas supporté)."""
    values, counts = np.unique(tree.degrees, return_counts=True)
    total = 0.0
    for degree, count in zip(values.tolist(), counts.tolist()):
        log_p = dist.log_prob(degree)
        if log_p == -math.inf:
            return -math.inf
        total += count * log_p
    return total


def prob_tree(dist: OffspringDistribution, tree: PlaneTree) -> float:
    """π(T) = P(𝒯 = T) = ∏_i p_{d_i}."""
    return math.exp(log_prob_tree(dist, tree))


def prob_nonfringe_root(dist: OffspringDistribution, tree: PlaneTree) -> float:
    """π^nf(T) = P(T ⪯ 𝒯) : produit des p_{d_v} sur les nœuds internes."""
    values, counts = np.unique(tree.degrees[tree.degrees > 0], return_counts=True)
    total = 0.0
    for degree, count in zip(values.tolist(), counts.tolist()):
        log_p = dist.log_prob(degree)
        if log_p == -math.inf:
            return 0.0
        total += count * log_p
    return math.exp(total)


def _denominator(dist: OffspringDistribution, n: int) -> float:
    """P(S_n = n − 1), qui doit être > 0 pour que 𝒯_n existe."""
    if n < 1:
        raise ValueError("n doit être ≥ 1")
    value = prob_sum(dist, n, n - 1, s_max=n)
    if value <= 0.0:
        raise UndefinedConditionalError(f"P(|𝒯| = {n}) = 0 : 𝒯_{n} n'existe pas pour {dist.name}")
    return value


def prob_total_size(dist: OffspringDistribution, n: int) -> float:
    """P(|𝒯| = n) = P(S_n = n − 1)/n."""
    if n < 1:
        raise ValueError("n doit être ≥ 1")
    return prob_sum(dist, n, n - 1, s_max=n) / n


def local_limit_ratio(dist: OffspringDistribution, n: int) -> float:
    """P(|𝒯| = n) · n^{3/2} · √(2πσ²)/h, de limite 1 le long des n ≡ 1 (mod h)."""
    return prob_total_size(dist, n) * n ** 1.5 * math.sqrt(2 * math.pi * dist.sigma2) / dist.span


def size_ratio(dist: OffspringDistribution, n: int, k: int) -> float:
    """P(S_{n−k} = n − k)/P(S_n = n − 1)."""
    if not 1 <= k <= n:
        raise ValueError("size_ratio exige 1 ≤ k ≤ n")
    return prob_sum(dist, n - k, n - k, s_max=n) / _denominator(dist, n)


# === Espérances ===


def expected_fringe_count(dist: OffspringDistribution, n: int, tree: PlaneTree) -> float:
    """
    E N_T(𝒯_n) = n π(T) P(S_{n−k} = n − k)/P(S_n = n − 1), k = |T|.

    Raises:
        UndefinedConditionalError: Si P(S_n = n − 1) = 0
    """
    denominator = _denominator(dist, n)
    k = tree.size
    if k > n:
        return 0.0
    return n * prob_tree(dist, tree) * prob_sum(dist, n - k, n - k, s_max=n) / denominator


def expected_size_class_count(dist: OffspringDistribution, n: int, k: int) -> float:
    """E N_{S_k}(𝒯_n) = n P(|𝒯| = k) P(S_{n−k} = n − k)/P(S_n = n − 1)."""
    denominator = _denominator(dist, n)
    if not 1 <= k <= n:
        return 0.0
    return n * prob_total_size(dist, k) * prob_sum(dist, n - k, n - k, s_max=n) / denominator


def _nonfringe_expectation(dist: OffspringDistribution, n: int, internal: int, leaves: int, pi_nf: float) -> float:
    """n π^nf P(S_{n−v} = n − v − ℓ), sans le dénominateur."""
    if internal > n or pi_nf == 0.0:
        return 0.0
    return n * pi_nf * prob_sum(dist, n - internal, n - internal - leaves, s_max=n)


def expected_nonfringe_count(dist: OffspringDistribution, n: int, tree: PlaneTree) -> float:
    """
    E N^nf_T(𝒯_n) = n π^nf(T) P(S_{n−v(T)} = n − v(T) − ℓ(T))/P(S_n = n − 1).

    Raises:
        UndefinedConditionalError: Si P(S_n = n − 1) = 0
    """
    denominator = _denominator(dist, n)
    if tree.internal_count == 0:
        return float(n)
    numerator = _nonfringe_expectation(
        dist, n, tree.internal_count, tree.leaf_count, prob_nonfringe_root(dist, tree)
    )
    return numerator / denominator


# === Recouvrements {T⊞T} ===


def _merge(a: Nested, b: Nested) -> Optional[Nested]:
    """Union de deux formes compatibles (None si un nœud interne diffère en degré)."""
    if not a:
        return b
    if not b:
        return a
    if len(a) != len(b):
        return None
    children = []
    for left, right in zip(a, b):
        merged = _merge(left, right)
        if merged is None:
            return None
        children.append(merged)
    return tuple(children)


def _replace_at(root: Nested, path: Tuple[int, ...], replacement: Nested) -> Nested:
    if not path:
        return replacement
    head, rest = path[0], path[1:]
    children = list(root)
    children[head] = _replace_at(children[head], rest, replacement)
    return tuple(children)


def _internal_paths(root: Nested) -> List[Tuple[int, ...]]:
    """Chemins (indices d'enfants) des nœuds internes non racine, en préordre."""
    paths: List[Tuple[int, ...]] = []
    pending: List[Tuple[Nested, Tuple[int, ...]]] = [(root, ())]
    while pending:
        node, path = pending.pop()
        if node and path:
            paths.append(path)
        for index in range(len(node) - 1, -1, -1):
            pending.append((node[index], path + (index,)))
    return paths


def overlap_trees(tree: PlaneTree) -> List[PlaneTree]:
    """
    Arbres de recouvrement, un par nœud interne non racine v (avec répétitions).

    Pour chaque v dont le sous-arbre T_v est compatible avec T, le sous-arbre
    en v est remplacé par l'union de T_v et d'une copie de T. Quand T_v ⪯ T,
    l'union est T lui-même.
    """
    nested = to_nested(tree.degrees)
    result: List[PlaneTree] = []
    for path in _internal_paths(nested):
        node = nested
        for index in path:
            node = node[index]
        merged = _merge(node, nested)
        if merged is None:
            continue
        result.append(from_nested(_replace_at(nested, path, merged)))
    return result


def t_boxplus_t(tree: PlaneTree) -> List[PlaneTree]:
    """Ensemble dédupliqué {T⊞T}, T exclu, dans l'ordre des nœuds en préordre."""
    seen: Dict[TreeKey, PlaneTree] = {}
    for candidate in overlap_trees(tree):
        if candidate.key != tree.key and candidate.key not in seen:
            seen[candidate.key] = candidate
    return list(seen.values())


@dataclass
class MomentReport:
    """
    Moments exacts de N^nf_T(𝒯_n).

    Attributes:
        mean: E N
        second_factorial: E N(N−1)
        variance: second_factorial + mean − mean²
        overlap_terms: (clé de T' ∈ {T⊞T}, contribution au second moment factoriel)
        disjoint_term: Contribution des paires d'occurrences sans nœud interne commun
    """

    mean: float
    second_factorial: float
    variance: float
    overlap_terms: List[Tuple[TreeKey, float]] = field(default_factory=list)
    disjoint_term: float = 0.0


def second_factorial_nonfringe(dist: OffspringDistribution, n: int, tree: PlaneTree) -> MomentReport:
    """
    E (N^nf_T(𝒯_n))_2 exact.

    Somme du terme des occurrences disjointes
    n(n − 2v + 1) π^nf(T)² P(S_{n−2v} = n + 1 − 2(v + ℓ))/P(S_n = n − 1)
    et du terme de recouvrement 2n Σ_{T'} π^nf(T') P(S_{n−v(T')} = n − v(T') − ℓ(T'))/P(S_n = n − 1).

    Pour v(T) = 0, N ≡ n et E(N)_2 = n(n−1). Si 2v(T) > n, le terme disjoint est nul.

    Raises:
        UndefinedConditionalError: Si P(S_n = n − 1) = 0
    """
    denominator = _denominator(dist, n)
    internal, leaves = tree.internal_count, tree.leaf_count
    if internal == 0:
        fm2 = float(n * (n - 1))
        return MomentReport(mean=float(n), second_factorial=fm2, variance=0.0, disjoint_term=fm2)

    pi_nf = prob_nonfringe_root(dist, tree)
    mean = _nonfringe_expectation(dist, n, internal, leaves, pi_nf) / denominator

    disjoint = 0.0
    if 2 * internal <= n and pi_nf > 0.0:
        target = n + 1 - 2 * (internal + leaves)
        disjoint = (
            n * (n - 2 * internal + 1) * pi_nf ** 2
            * prob_sum(dist, n - 2 * internal, target, s_max=n) / denominator
        )

    contributions: Dict[TreeKey, float] = {}
    for overlap in overlap_trees(tree):
        value = 2.0 * _nonfringe_expectation(
            dist, n, overlap.internal_count, overlap.leaf_count, prob_nonfringe_root(dist, overlap)
        ) / denominator
        contributions[overlap.key] = contributions.get(overlap.key, 0.0) + value

    fm2 = disjoint + sum(contributions.values())
    variance = fm2 + mean - mean * mean
    return MomentReport(
        mean=mean,
        second_factorial=fm2,
        variance=variance,
        overlap_terms=list(contributions.items()),
        disjoint_term=disjoint,
    )


# === p^min ===


@dataclass(frozen=True)
class PminResult:
    """
    Arbre possible le moins probable de taille ≤ k.

    Attributes:
        tree: Témoin canonique T^min_k
        probability: p^min_k
        log_probability: log p^min_k
        k: Taille maximale demandée
    """

    tree: PlaneTree
    probability: float
    log_probability: float
    k: int

    @property
    def root_k(self) -> float:
        """(p^min_k)^{1/k}."""
        return math.exp(self.log_probability / self.k)


def pmin(dist: OffspringDistribution, k: int) -> PminResult:
    """
    p^min_k = min_{T ∈ 𝒯⁺_k} π(T) et son témoin.

    Sac à dos non borné sur les degrés en espace log, en O(k·D) pour un
    degré maximal D. Égalités départagées par le plus petit degré racine puis
    la plus petite suite lexicographique des tailles d'enfants ; entre
    tailles, la plus grande taille l'emporte. Avec ces règles le témoin est
    une épine : la racine de degré d porte d − 1 feuilles puis un dernier
    enfant qui est lui-même le témoin de sa taille.

    Raises:
        CapExceededError: k > 10^4
    """
    if k < 1:
        raise ValueError("k doit être ≥ 1")
    if k > MAX_PMIN_SIZE:
        raise CapExceededError(f"pmin limité à k ≤ {MAX_PMIN_SIZE} (reçu {k})")
    horizon = k - 1 if dist.is_unbounded else min(dist.max_degree, k - 1)

    log_p = np.array([dist.log_prob(d) for d in range(horizon + 1)], dtype=np.float64)
    H, choice = pmin_kernel(log_p, k, RELATIVE_TIE_TOLERANCE)

    weights = np.flatnonzero(np.isfinite(H))
    values = log_p[0] + H[weights]
    best = float(values.min())
    tied = weights[values <= best + RELATIVE_TIE_TOLERANCE * max(1.0, abs(best))]
    weight = int(tied.max())

    tree = _rebuild_pmin_tree(weight, choice)
    log_value = float(log_p[0] + H[weight])
    logger.debug(f"p^min_{k} atteint en taille {tree.size} : log p = {log_value:.6g}")
    return PminResult(tree=tree, probability=math.exp(log_value), log_probability=log_value, k=k)


def _rebuild_pmin_tree(weight: int, choice: NDArray[np.int64]) -> PlaneTree:
    degrees: List[int] = []
    while weight > 0:
        d = int(choice[weight])
        degrees.append(d)
        degrees.extend([0] * (d - 1))
        weight -= d
    degrees.append(0)
    return PlaneTree(degrees)


# === Distance de Poisson ===


def poisson_pmf(mu: float, support: int) -> NDArray[np.float64]:
    """P(Po(μ) = j) pour 0 ≤ j < support, en espace log (μ = 0 accepté)."""
    j = np.arange(support, dtype=np.float64)
    return np.exp(xlogy(j, mu) - mu - gammaln(j + 1))


def poisson_support(mu: float, tail_mass: float = POISSON_TAIL_MASS) -> int:
    """Plus petite longueur dont la queue de Po(μ) est < tail_mass."""
    support = int(mu + 10.0 * math.sqrt(mu) + 20.0)
    while 1.0 - poisson_pmf(mu, support).sum() >= tail_mass:
        support *= 2
    return support


def poisson_tv(mu: float, nu: float) -> Tuple[float, float]:
    """
    Distance en variation totale exacte entre Po(μ) et Po(ν), et la borne |√μ − √ν|.

    Returns:
        (distance exacte, borne)
    """
    if mu < 0 or nu < 0:
        raise ValueError("μ et ν doivent être ≥ 0")
    support = max(poisson_support(mu), poisson_support(nu))
    difference = np.abs(poisson_pmf(mu, support) - poisson_pmf(nu, support))
    tv = min(1.0, 0.5 * float(difference.sum()))
    return tv, abs(math.sqrt(mu) - math.sqrt(nu))
