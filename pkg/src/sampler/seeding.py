"""
Dérivation déterministe des graines.

Chaque réplique possède son propre flux, dérivé de la graine maîtresse et de
son indice. Les résultats ne dépendent donc ni de l'ordre d'exécution ni du
nombre de processus.
"""

from __future__ import annotations

import numpy as np

SEED_MASK_64 = (1 << 64) - 1


def derive_seed(master_seed: int, index: int) -> int:
    """
    Graine 64 bits de la réplique index.

    Args:
        master_seed: Graine maîtresse de la campagne
        index: Indice de réplique (≥ 0)

    Returns:
        Les 64 premiers bits de SeedSequence([master_seed, index])
    """
    if index < 0:
        raise ValueError("l'indice de réplique doit être ≥ 0")
    words = np.random.SeedSequence([master_seed & SEED_MASK_64, index]).generate_state(2, dtype=np.uint32)
    return (int(words[0]) << 32) | int(words[1])


class SeededRNG:
    """
    Flux aléatoire déterministe, injectable dans l'échantillonneur.

    Attributes:
        seed: Graine 64 bits d'origine
        generator: numpy.random.Generator sous-jacent
    """

    def __init__(self, seed: int):
        self._seed = int(seed) & SEED_MASK_64
        self.generator = np.random.default_rng(self._seed)

    @property
    def seed(self) -> int:
        return self._seed

    @classmethod
    def for_replicate(cls, master_seed: int, index: int) -> "SeededRNG":
        return cls(derive_seed(master_seed, index))

    def random(self) -> float:
        return float(self.generator.random())

    def integers(self, low: int, high: int) -> int:
        """Entier uniforme dans [low, high)."""
        return int(self.generator.integers(low, high))

    def fork(self) -> "SeededRNG":
        """Flux enfant à graine dérivée, pour une sous-tâche."""
        return SeededRNG(int(self.generator.integers(0, SEED_MASK_64, dtype=np.uint64)))
