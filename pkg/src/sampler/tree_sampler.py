"""
Module d'échantillonnage des arbres de Galton-Watson.

Échantillonnage exact de 𝒯_n par rejet sur S_n = n − 1 suivi de la rotation
du lemme cyclique, réalisation du processus non conditionné, et couplage par
échange de sous-arbres franges.

COÛT : un essai accepté demande en moyenne de l'ordre de √(2πσ²n)/h essais,
chacun de longueur au plus n. À n = 10^6 cela représente quelques secondes
par arbre ; les campagnes répartissent les répliques sur plusieurs processus.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Tuple, Union

import numpy as np

from ..models.offspring import OffspringDistribution
from ..models.tree import PlaneTree, subtree_span
from ..utils.constants import DEFAULT_MAX_REJECTIONS, DEFAULT_SEED, MAX_TREE_SIZE
from ..utils.errors import SamplerExhaustedError, SpanMismatchError
from ..utils.logger import get_logger
from .kernels import branching_kernel, degree_batch_kernel, rejection_kernel
from .seeding import SeededRNG

logger = get_logger("SAMPLER")

RandomStream = Union[SeededRNG, np.random.Generator]


@dataclass(frozen=True)
class SampleConfig:
    """
    Paramètres d'un tirage conditionnel.

    Attributes:
        n: Taille cible (≥ 1)
        max_rejections: Nombre maximal d'essais avant abandon
        seed: Graine 64 bits utilisée si aucun flux n'est fourni
    """

    n: int
    max_rejections: int = DEFAULT_MAX_REJECTIONS
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n doit être ≥ 1 (reçu {self.n})")
        if self.n > MAX_TREE_SIZE:
            raise ValueError(f"n doit être ≤ {MAX_TREE_SIZE} (reçu {self.n})")
        if self.max_rejections < 1:
            raise ValueError("max_rejections doit être ≥ 1")


def check_span(dist: OffspringDistribution, n: int) -> None:
    """
    Vérifie n ≡ 1 (mod h).

    Raises:
        SpanMismatchError: Si n n'est pas une taille atteignable pour le pas h
    """
    if not dist.is_valid_size(n):
        raise SpanMismatchError(
            f"n = {n} incompatible avec le pas h = {dist.span} de {dist.name} (n − 1 doit être multiple de h)"
        )


def _generator(rng: RandomStream) -> np.random.Generator:
    """Générateur numpy transmis aux noyaux numba (état 128 bits, pas de graine tronquée)."""
    return rng.generator if isinstance(rng, SeededRNG) else rng


def sample_conditional_counted(
    dist: OffspringDistribution,
    cfg: SampleConfig,
    rng: Optional[RandomStream] = None,
) -> Tuple[PlaneTree, int]:
    """
    Tire 𝒯_n et retourne aussi le nombre d'essais consommés.

    Raises:
        SpanMismatchError: n ≢ 1 (mod h)
        SamplerExhaustedError: max_rejections essais sans succès
    """
    check_span(dist, cfg.n)
    if cfg.n == 1:
        return PlaneTree([0]), 1
    stream = rng if rng is not None else SeededRNG(cfg.seed)
    degrees, attempts = rejection_kernel(
        dist.cdf, dist.guide, dist.degrees, cfg.n, cfg.max_rejections, _generator(stream)
    )
    if degrees.size == 0:
        raise SamplerExhaustedError(cfg.n, int(attempts))
    logger.debug(f"𝒯_{cfg.n} accepté après {attempts} essai(s)")
    return PlaneTree(degrees), int(attempts)


def sample_conditional(
    dist: OffspringDistribution,
    cfg: SampleConfig,
    rng: Optional[RandomStream] = None,
) -> PlaneTree:
    """
    Tire exactement 𝒯_n (arbre conditionné à n nœuds).

    Args:
        dist: Loi de reproduction
        cfg: Configuration (taille, plafond d'essais, graine)
        rng: Flux propre à l'appelant ; SeededRNG(cfg.seed) si absent

    Returns:
        Arbre valide de taille exactement n
    """
    tree, _ = sample_conditional_counted(dist, cfg, rng)
    return tree


def sample_unconditional(
    dist: OffspringDistribution,
    rng: RandomStream,
    size_cap: int,
) -> Optional[PlaneTree]:
    """
    Réalise le processus de branchement sans conditionnement.

    Returns:
        L'arbre, ou None si la population dépasserait size_cap
    """
    if size_cap < 1:
        raise ValueError("size_cap doit être ≥ 1")
    degrees, ok = branching_kernel(dist.cdf, dist.guide, dist.degrees, size_cap, _generator(rng))
    if not ok:
        return None
    return PlaneTree(degrees)


def sample_degrees_batch(dist: OffspringDistribution, rng: RandomStream, size: int) -> np.ndarray:
    """size degrés i.i.d. tirés par le noyau (même chemin que le rejet)."""
    return degree_batch_kernel(dist.cdf, dist.guide, dist.degrees, size, _generator(rng))


def switch_random_fringe(
    t1: PlaneTree,
    t2: PlaneTree,
    k: int,
    rng: RandomStream,
) -> PlaneTree:
    """
    Échange de sous-arbres franges.

    Tire Z uniforme dans {1, …, n} ; si les sous-arbres franges de t1 et t2
    enracinés au Z-ième nœud ont tous deux k nœuds, celui de t1 est remplacé
    par celui de t2. Sinon t1 est retourné tel quel.
    """
    if t1.size != t2.size:
        raise ValueError("switch_random_fringe exige |t1| = |t2|")
    n = t1.size
    z = rng.integers(1, n + 1) if isinstance(rng, SeededRNG) else int(rng.integers(1, n + 1))
    return switch_fringe_at(t1, t2, k, z)


def switch_fringe_at(t1: PlaneTree, t2: PlaneTree, k: int, z: int) -> PlaneTree:
    """Échange déterministe au nœud z (1-based)."""
    start1, end1 = subtree_span(t1, z)
    start2, end2 = subtree_span(t2, z)
    if end1 - start1 + 1 != k or end2 - start2 + 1 != k:
        return t1
    degrees = np.concatenate(
        (t1.degrees[: start1 - 1], t2.degrees[start2 - 1:end2], t1.degrees[end1:])
    )
    return PlaneTree(degrees)


class TreeSampler:
    """
    Échantillonneur de 𝒯_n lié à une loi et à un flux.

    Attributes:
        dist: Loi de reproduction
        config: Configuration de tirage
        rng: Flux propre à cet échantillonneur
        total_attempts: Essais cumulés depuis la création
    """

    def __init__(self, dist: OffspringDistribution, config: SampleConfig, rng: Optional[SeededRNG] = None):
        check_span(dist, config.n)
        self.dist = dist
        self.config = config
        self.rng = rng if rng is not None else SeededRNG(config.seed)
        self.total_attempts = 0
        self.samples_drawn = 0

    def sample(self) -> PlaneTree:
        tree, attempts = sample_conditional_counted(self.dist, self.config, self.rng)
        self.total_attempts += attempts
        self.samples_drawn += 1
        return tree

    def stream(self, count: int) -> Iterator[PlaneTree]:
        """Génère count arbres successifs."""
        for _ in range(count):
            yield self.sample()

    @property
    def acceptance_rate(self) -> Optional[float]:
        """Taux d'acceptation observé, None avant le premier tirage."""
        if self.total_attempts == 0:
            return None
        return self.samples_drawn / self.total_attempts
