"""
Sondes : statistiques mesurées sur chaque arbre d'une campagne.

Les sondes sont des dataclasses gelées, donc sérialisables vers les
processus de travail. Chaque sonde reçoit l'hôte et ses tailles de
sous-arbres (calculées une seule fois par réplique).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from numpy.typing import NDArray

from ..analysis.census import (
    KResult,
    compute_K,
    count_fringe,
    count_fringe_size,
    count_nonfringe,
    max_r_ary_fringe_height,
    max_r_ary_nonfringe_height,
)
from ..models.offspring import OffspringDistribution
from ..models.tree import PlaneTree
from ..utils.constants import DEFAULT_K_CAP
from ..utils.enums import CountMode


# Dernier K_n calculé (hôte, loi, k_cap, résultat) : K et KSaturated lisent la même valeur
_last_k: Optional[Tuple[PlaneTree, OffspringDistribution, int, KResult]] = None


def shared_k_result(host: PlaneTree, dist: OffspringDistribution, k_cap: int) -> KResult:
    """compute_K une seule fois par hôte, quel que soit le nombre de sondes qui le lisent."""
    global _last_k
    if _last_k is not None and _last_k[0] is host and _last_k[1] is dist and _last_k[2] == k_cap:
        return _last_k[3]
    result = compute_K(host, dist, k_cap)
    _last_k = (host, dist, k_cap, result)
    return result


class Probe:
    """Interface commune : label lisible et mesure entière."""

    @property
    def label(self) -> str:
        raise NotImplementedError

    def measure(self, host: PlaneTree, sizes: NDArray[np.int64]) -> int:
        raise NotImplementedError


@dataclass(frozen=True)
class FringeCount(Probe):
    """N_T : occurrences franges du motif."""

    pattern: PlaneTree

    @property
    def label(self) -> str:
        return f"N_T[{self.pattern}]"

    def measure(self, host: PlaneTree, sizes: NDArray[np.int64]) -> int:
        return count_fringe(host, self.pattern)


@dataclass(frozen=True)
class NonfringeCount(Probe):
    """N^nf_T : occurrences non franges du motif."""

    pattern: PlaneTree

    @property
    def label(self) -> str:
        return f"N_nf[{self.pattern}]"

    def measure(self, host: PlaneTree, sizes: NDArray[np.int64]) -> int:
        return count_nonfringe(host, self.pattern, sizes)


@dataclass(frozen=True)
class SizeClass(Probe):
    """N_{S_k} : sous-arbres franges à k nœuds."""

    k: int

    @property
    def label(self) -> str:
        return f"N_S[{self.k}]"

    def measure(self, host: PlaneTree, sizes: NDArray[np.int64]) -> int:
        return count_fringe_size(host, self.k, sizes)


@dataclass(frozen=True)
class Height(Probe):
    """H_{n,r} (mode frange) ou H̃_{n,r} (mode non frange)."""

    r: int
    mode: CountMode = CountMode.FRINGE

    @property
    def label(self) -> str:
        return f"H_{self.r}" if self.mode is CountMode.FRINGE else f"H_nf_{self.r}"

    def measure(self, host: PlaneTree, sizes: NDArray[np.int64]) -> int:
        if self.mode is CountMode.FRINGE:
            return max_r_ary_fringe_height(host, self.r)
        return max_r_ary_nonfringe_height(host, self.r)


@dataclass(frozen=True)
class K(Probe):
    """K_n, plafonné à k_cap."""

    dist: OffspringDistribution
    k_cap: int = DEFAULT_K_CAP

    @property
    def label(self) -> str:
        return "K"

    def measure(self, host: PlaneTree, sizes: NDArray[np.int64]) -> int:
        return shared_k_result(host, self.dist, self.k_cap).K


@dataclass(frozen=True)
class KSaturated(Probe):
    """1 si K_n a atteint k_cap, 0 sinon."""

    dist: OffspringDistribution
    k_cap: int = DEFAULT_K_CAP

    @property
    def label(self) -> str:
        return "K_saturated"

    def measure(self, host: PlaneTree, sizes: NDArray[np.int64]) -> int:
        return int(shared_k_result(host, self.dist, self.k_cap).saturated)
