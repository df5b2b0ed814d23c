"""
Résumés de campagne.

Deux résumés produits avec la même graine sont égaux champ à champ ; seule
la durée d'exécution est exclue de la comparaison.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

from ..utils.enums import ExperimentKind


@dataclass
class ExperimentRow:
    """
    Ligne de résultat : une statistique à une taille n.

    Attributes:
        n: Taille des arbres
        statistic: Nom de la statistique (label de sonde)
        replicates: Nombre de répliques
        mean: Moyenne empirique
        variance: Variance empirique (ddof=1)
        quantiles: Quantiles empiriques
        histogram: {valeur: effectif}, de masse totale = replicates
        reference_mean: Moyenne de référence (n π, n π^nf, ...)
        empirical_tv: d_TV(loi empirique, Po(reference_mean))
        tv_bias_bound: Majorant du biais de d_TV empirique
        centerline: Centre asymptotique prédit
        extra: Diagnostics propres à la campagne
    """

    n: int
    statistic: str
    replicates: int
    mean: float
    variance: float
    quantiles: Dict[str, float] = field(default_factory=dict)
    histogram: Dict[int, int] = field(default_factory=dict)
    reference_mean: Optional[float] = None
    empirical_tv: Optional[float] = None
    tv_bias_bound: Optional[float] = None
    centerline: Optional[float] = None
    extra: Dict[str, Any] = field(default_factory=dict)

    def flat(self) -> Dict[str, Any]:
        """Ligne à plat pour l'export CSV (histogramme omis)."""
        row: Dict[str, Any] = {
            "n": self.n,
            "statistic": self.statistic,
            "replicates": self.replicates,
            "mean": self.mean,
            "variance": self.variance,
            "reference_mean": self.reference_mean,
            "empirical_tv": self.empirical_tv,
            "tv_bias_bound": self.tv_bias_bound,
            "centerline": self.centerline,
        }
        row.update(self.quantiles)
        row.update({f"extra_{key}": value for key, value in self.extra.items()})
        return row


@dataclass
class ExperimentSummary:
    """
    Résultat d'une campagne.

    Attributes:
        kind: Type de campagne
        distribution: Nom de la loi
        seed: Graine maîtresse
        replicates: Répliques par taille
        rule: Règle de motif ou de taille (si applicable)
        n_list: Tailles n de la campagne, dans l'ordre d'exécution
        rows: Lignes de résultat, triées par (n, statistique)
        notes: Avertissements (règle hors régime k_n = o(n), prédiction heuristique, ...)
        runtime_seconds: Durée, exclue de l'égalité
    """

    kind: ExperimentKind
    distribution: str
    seed: int
    replicates: int
    rule: Optional[str] = None
    n_list: List[int] = field(default_factory=list)
    rows: List[ExperimentRow] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    runtime_seconds: float = field(default=0.0, compare=False)

    def row(self, n: int, statistic: Optional[str] = None) -> ExperimentRow:
        """Première ligne de taille n (et de statistique donnée si précisée)."""
        for row in self.rows:
            if row.n == n and (statistic is None or row.statistic == statistic):
                return row
        raise KeyError(f"aucune ligne pour n = {n}, statistique = {statistic}")

    def as_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["kind"] = self.kind.value
        for row in data["rows"]:
            row["histogram"] = {str(k): v for k, v in row["histogram"].items()}
            for table in (row, row["extra"]):
                for key, value in list(table.items()):
                    if isinstance(value, float) and not math.isfinite(value):
                        table[key] = None
        return data
