"""
Module de recensement des sous-arbres d'un arbre hôte.

Compte les occurrences franges et non franges d'un motif, les sous-arbres par
taille, les hauteurs maximales d'arbres r-aires complets et le seuil K_n.
Tous les comptages sont des balayages de la suite de degrés en préordre.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Set

import numpy as np
from numpy.typing import NDArray

from ..models.offspring import OffspringDistribution
from ..models.tree import PlaneTree, TreeKey, count_possible_trees, subtree_sizes
from ..utils.constants import MAX_CENSUS_K_CAP
from ..utils.enums import CountMode
from ..utils.errors import CapExceededError
from ..utils.logger import get_logger
from .kernels import (
    fringe_ary_height_kernel,
    kmp_fringe_count,
    naive_fringe_count,
    nonfringe_ary_height_kernel,
    nonfringe_count_kernel,
)

logger = get_logger("CENSUS")


@dataclass(frozen=True)
class KResult:
    """
    Seuil K_n d'un arbre hôte.

    Attributes:
        K: Plus grande taille k (k ≡ 1 mod h) telle que tout arbre possible de taille ≤ k
           apparaisse comme sous-arbre frange
        saturated: True si toutes les tailles jusqu'à k_cap sont passées
        k_cap: Plafond utilisé
    """

    K: int
    saturated: bool
    k_cap: int


@dataclass
class CensusReport:
    """
    Recensement d'un arbre hôte.

    Attributes:
        n: Taille de l'hôte
        fringe_counts: N_T pour chaque motif demandé
        size_counts: N_{S_k} pour chaque k demandé
        nonfringe_counts: N^nf_T pour chaque motif demandé
        H_r: Hauteur frange maximale par arité r
        H_r_nf: Hauteur non frange maximale par arité r
        K: Seuil K_n (None si non demandé)
        K_saturated: K a atteint k_cap
        r_impossible: Arités r avec p_r = 0 (hauteurs triviales)
    """

    n: int
    fringe_counts: Dict[TreeKey, int] = field(default_factory=dict)
    size_counts: Dict[int, int] = field(default_factory=dict)
    nonfringe_counts: Dict[TreeKey, int] = field(default_factory=dict)
    H_r: Dict[int, int] = field(default_factory=dict)
    H_r_nf: Dict[int, int] = field(default_factory=dict)
    K: Optional[int] = None
    K_saturated: bool = False
    r_impossible: Set[int] = field(default_factory=set)

    def count(self, pattern: PlaneTree, mode: CountMode) -> int:
        """Comptage d'un motif déjà recensé."""
        table = self.fringe_counts if mode is CountMode.FRINGE else self.nonfringe_counts
        return table[pattern.key]


# ----------------------------------------------------------------------
# Comptages de motifs
# ----------------------------------------------------------------------


def count_fringe(host: PlaneTree, pattern: PlaneTree, method: str = "kmp") -> int:
    """
    Nombre de sous-arbres franges de host égaux à pattern.

    Par l'absence de préfixe propre valide, ce sont exactement les positions
    où la suite du motif apparaît comme facteur contigu de celle de l'hôte.

    Args:
        host: Arbre hôte
        pattern: Motif
        method: "kmp" (linéaire) ou "naive" (O(n·k)), résultats identiques
    """
    if method == "kmp":
        return int(kmp_fringe_count(host.degrees, pattern.degrees))
    if method == "naive":
        return int(naive_fringe_count(host.degrees, pattern.degrees))
    raise ValueError(f"méthode de comptage inconnue : {method!r}")


def count_fringe_size(host: PlaneTree, k: int, sizes: Optional[NDArray[np.int64]] = None) -> int:
    """Nombre de nœuds dont le sous-arbre frange a exactement k nœuds."""
    if sizes is None:
        sizes = subtree_sizes(host)
    return int(np.count_nonzero(sizes == k))


def size_class_counts(host: PlaneTree, k_max: Optional[int] = None) -> Dict[int, int]:
    """N_{S_k} pour toutes les tailles k ≤ k_max présentes (un seul balayage)."""
    sizes = subtree_sizes(host)
    histogram = np.bincount(sizes)
    limit = histogram.size - 1 if k_max is None else min(k_max, histogram.size - 1)
    return {k: int(histogram[k]) for k in range(1, limit + 1) if histogram[k] > 0}


def count_nonfringe(
    host: PlaneTree,
    pattern: PlaneTree,
    sizes: Optional[NDArray[np.int64]] = None,
) -> int:
    """
    Nombre de nœuds v tels que pattern ⪯ host_v.

    Les nœuds internes du motif exigent un degré égal dans l'hôte, les
    feuilles du motif absorbent n'importe quel sous-arbre.
    """
    if sizes is None:
        sizes = subtree_sizes(host)
    return int(nonfringe_count_kernel(host.degrees, sizes, pattern.degrees))


def count_pattern(host: PlaneTree, pattern: PlaneTree, mode: CountMode) -> int:
    if mode is CountMode.FRINGE:
        return count_fringe(host, pattern)
    return count_nonfringe(host, pattern)


# ----------------------------------------------------------------------
# Hauteurs r-aires
# ----------------------------------------------------------------------


def max_r_ary_fringe_height(host: PlaneTree, r: int) -> int:
    """H_{n,r} : hauteur du plus grand arbre r-aire complet présent comme sous-arbre frange."""
    if r < 1:
        raise ValueError("r doit être ≥ 1")
    return int(fringe_ary_height_kernel(host.degrees, r))


def max_r_ary_nonfringe_height(host: PlaneTree, r: int) -> int:
    """H̃_{n,r} : hauteur du plus grand arbre r-aire complet non frange."""
    if r < 1:
        raise ValueError("r doit être ≥ 1")
    return int(nonfringe_ary_height_kernel(host.degrees, r))


# ----------------------------------------------------------------------
# Seuil K_n
# ----------------------------------------------------------------------


def distinct_fringe_keys(host: PlaneTree, k: int, sizes: Optional[NDArray[np.int64]] = None) -> NDArray[np.int64]:
    """
    Suites de degrés distinctes des sous-arbres franges de taille k.

    Returns:
        Matrice (m, k) des suites distinctes, triées lexicographiquement
    """
    if sizes is None:
        sizes = subtree_sizes(host)
    roots = np.flatnonzero(sizes == k)
    if roots.size == 0:
        return np.empty((0, k), dtype=np.int64)
    windows = host.degrees[roots[:, None] + np.arange(k)]
    return np.unique(windows, axis=0)


def fringe_key_set(host: PlaneTree, k_cap: int) -> Set[TreeKey]:
    """Ensemble des TreeKey des sous-arbres franges de taille ≤ k_cap."""
    sizes = subtree_sizes(host)
    keys: Set[TreeKey] = set()
    for k in range(1, k_cap + 1):
        for row in distinct_fringe_keys(host, k, sizes):
            keys.add(TreeKey(",".join(map(str, row.tolist())).encode("ascii")))
    return keys


def compute_K(host: PlaneTree, dist: OffspringDistribution, k_cap: int = MAX_CENSUS_K_CAP) -> KResult:
    """
    Calcule K_n pour un arbre hôte.

    Pour k = 1, 2, … les sous-arbres franges distincts de taille k dont tous
    les degrés sont supportés sont comptés et comparés au nombre d'arbres
    possibles de taille k. Le résultat est ramené à la plus grande taille
    atteignable k ≡ 1 (mod h).

    Args:
        host: Arbre hôte
        dist: Loi définissant les arbres possibles
        k_cap: Taille maximale examinée (≤ 16)

    Returns:
        KResult (K, drapeau de saturation)

    Raises:
        CapExceededError: Si k_cap > 16
    """
    if not 1 <= k_cap <= MAX_CENSUS_K_CAP:
        raise CapExceededError(f"k_cap doit être dans 1..{MAX_CENSUS_K_CAP} (reçu {k_cap})")

    sizes = subtree_sizes(host)
    supported = np.array([dist.supports(d) for d in range(k_cap)], dtype=bool)
    passed = 0
    saturated = True
    for k in range(1, k_cap + 1):
        possible = count_possible_trees(dist, k)
        if possible > 0:
            rows = distinct_fringe_keys(host, k, sizes)
            if rows.size:
                rows = rows[supported[rows].all(axis=1)]
            present = rows.shape[0]
            if present < possible:
                saturated = False
                break
        passed = k

    span = dist.span
    K = max(1, passed - (passed - 1) % span)
    logger.debug(f"K = {K} (saturé={saturated}, k_cap={k_cap})")
    return KResult(K=K, saturated=saturated, k_cap=k_cap)


# ----------------------------------------------------------------------
# Rapport complet
# ----------------------------------------------------------------------


def census(
    host: PlaneTree,
    patterns: Iterable[PlaneTree] = (),
    modes: Iterable[CountMode] = (CountMode.FRINGE,),
    size_classes: Iterable[int] = (),
    r_values: Iterable[int] = (),
    dist: Optional[OffspringDistribution] = None,
    k_cap: Optional[int] = None,
) -> CensusReport:
    """
    Construit le CensusReport d'un hôte en partageant le calcul des tailles.

    Args:
        host: Arbre hôte
        patterns: Motifs à compter
        modes: Modes de comptage des motifs
        size_classes: Tailles k pour N_{S_k}
        r_values: Arités pour H_r et H̃_r
        dist: Loi (nécessaire pour K et le drapeau d'arité impossible)
        k_cap: Plafond de K ; K n'est pas calculé si None
    """
    sizes = subtree_sizes(host)
    report = CensusReport(n=host.size)
    pattern_list: List[PlaneTree] = list(patterns)
    mode_list = list(modes)

    for pattern in pattern_list:
        if CountMode.FRINGE in mode_list:
            report.fringe_counts[pattern.key] = count_fringe(host, pattern)
        if CountMode.NONFRINGE in mode_list:
            report.nonfringe_counts[pattern.key] = count_nonfringe(host, pattern, sizes)

    for k in size_classes:
        report.size_counts[k] = count_fringe_size(host, k, sizes)

    for r in r_values:
        if dist is not None and not dist.supports(r):
            report.r_impossible.add(r)
            report.H_r[r] = 0
            report.H_r_nf[r] = 0
            continue
        report.H_r[r] = max_r_ary_fringe_height(host, r)
        report.H_r_nf[r] = max_r_ary_nonfringe_height(host, r)

    if k_cap is not None:
        if dist is None:
            raise ValueError("le calcul de K exige la loi de reproduction")
        result = compute_K(host, dist, k_cap)
        report.K = result.K
        report.K_saturated = result.saturated
    return report
