"""
Module d'échantillonnage exact de 𝒯_n et du processus non conditionné.
"""

from .seeding import SeededRNG, derive_seed
from .tree_sampler import (
    SampleConfig,
    TreeSampler,
    sample_conditional,
    sample_unconditional,
    switch_random_fringe,
)

__all__ = [
    "SeededRNG",
    "derive_seed",
    "SampleConfig",
    "TreeSampler",
    "sample_conditional",
    "sample_unconditional",
    "switch_random_fringe",
]
