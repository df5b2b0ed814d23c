"""
Énumérations de gwforest.
Fournit un typage fort pour les modes de comptage, les types de campagnes et les régimes.
"""

from enum import Enum, auto


class SupportKind(Enum):
    """
    Nature du support d'une loi de reproduction.

    Attributes:
        FINITE: Support fini, stocké exactement
        UNBOUNDED: Support infini, tronqué à une masse de queue ≤ tail_epsilon
    """
    FINITE = auto()
    UNBOUNDED = auto()


class CountMode(Enum):
    """Mode de comptage d'un motif dans un arbre hôte."""
    FRINGE = "fringe"
    NONFRINGE = "nonfringe"


class ExperimentKind(Enum):
    """
    Type de campagne Monte Carlo.

    Attributes:
        POISSON: N_T(𝒯_n) face à Po(n π(T))
        SIZE_CLASS: N_{S_k}(𝒯_n), tous les sous-arbres de taille k
        NONFRINGE: Concentration de N^nf_T(𝒯_n)
        HEIGHTS: Hauteurs maximales r-aires (franges ou non)
        KN: Seuil K_n
    """
    POISSON = "poisson"
    SIZE_CLASS = "sizeclass"
    NONFRINGE = "nonfringe"
    HEIGHTS = "heights"
    KN = "kn"


class KRegime(Enum):
    """
    Régime asymptotique utilisé par predict_K.

    Attributes:
        WELL_BEHAVED: κ < ∞, formule du second ordre (log n − log log n)/log(1/L)
        SUPER_EXPONENTIAL: L = 0 avec queue f-super-exponentielle, f^{-1}(log n)
        CAYLEY: log(1/p^min_i) = γ (log i)(i + O(1)), formule raffinée
        FIRST_ORDER: Loi du premier ordre seule (γ, α, β)
    """
    WELL_BEHAVED = "well-behaved"
    SUPER_EXPONENTIAL = "super-exponential"
    CAYLEY = "cayley"
    FIRST_ORDER = "first-order only"
