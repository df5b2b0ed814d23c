"""
Hiérarchie des exceptions de gwforest.

Chaque erreur métier dérive de GWForestError et d'une exception standard
(ValueError ou RuntimeError) pour rester compatible avec le code appelant
qui attrape les exceptions usuelles. Le contrôleur CLI traduit ces erreurs
en codes de sortie (voir EXIT_CODES).
"""

from typing import Optional


class GWForestError(Exception):
    """Racine de toutes les erreurs levées par le paquet."""


class InvalidDistributionError(GWForestError, ValueError):
    """Loi de reproduction invalide (non critique, masses incorrectes, nom inconnu...)."""


class InvalidTreeError(GWForestError, ValueError):
    """Séquence de degrés qui ne code aucun arbre plan."""


class CapExceededError(GWForestError, ValueError):
    """Paramètre au-delà d'un plafond de sécurité (énumération, oracle, k_cap...)."""


class SpanMismatchError(GWForestError, ValueError):
    """Taille n incompatible avec le pas h de la loi (n ≢ 1 mod h)."""


class UndefinedConditionalError(GWForestError, ValueError):
    """L'arbre conditionné n'existe pas : P(S_n = n-1) = 0."""


class ConfigError(GWForestError, ValueError):
    """Configuration de campagne ou argument CLI invalide."""


class SamplerExhaustedError(GWForestError, RuntimeError):
    """
    Le rejet n'a produit aucun échantillon valide avant max_rejections.

    Attributes:
        n: Taille visée
        attempts: Nombre de tirages rejetés
    """

    def __init__(self, n: int, attempts: int, message: Optional[str] = None) -> None:
        self.n = n
        self.attempts = attempts
        super().__init__(
            message or f"aucun arbre de taille {n} accepté après {attempts} rejets"
        )

    def __reduce__(self):
        # Reconstruit l'erreur à partir de (n, attempts) au retour d'un processus de travail
        return type(self), (self.n, self.attempts, str(self))


# Codes de sortie du CLI
EXIT_OK: int = 0
EXIT_INVALID_CONFIG: int = 2
EXIT_SAMPLER_EXHAUSTED: int = 3


def exit_code_for(error: BaseException) -> int:
    """Traduit une exception en code de sortie du CLI."""
    if isinstance(error, SamplerExhaustedError):
        return EXIT_SAMPLER_EXHAUSTED
    return EXIT_INVALID_CONFIG
