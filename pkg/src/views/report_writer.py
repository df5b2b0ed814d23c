"""
Vue : rendu des résultats en CSV, JSON et texte console.

Seule cette couche écrit sur la sortie standard ; les modules de calcul
journalisent sur stderr.
"""

from __future__ import annotations

import csv
import json
import math
import os
import sys
from typing import Any, Dict, Iterable, List, Optional, Sequence, TextIO

from ..analysis.census import CensusReport
from ..experiments.summary import ExperimentSummary
from ..models.tree import PlaneTree, format_tree
from ..utils.enums import CountMode
from ..utils.logger import get_logger

logger = get_logger("REPORT")

CENSUS_COLUMNS: List[str] = ["index", "n", "pattern", "mode", "count", "H_r", "H_r_nf", "K", "K_saturated"]


def _clean(value: Any) -> Any:
    """Valeur imprimable : None pour les réels non finis, 'inf' pour κ infini."""
    if isinstance(value, float):
        if math.isinf(value) and value > 0:
            return "inf"
        if not math.isfinite(value):
            return None
        return float(f"{value:.12g}")
    return value


class ReportWriter:
    """
    Écrit des tableaux et des résumés vers un fichier ou la sortie standard.

    Attributes:
        stream: Flux utilisé quand la destination est None ou "-"
    """

    def __init__(self, stream: Optional[TextIO] = None) -> None:
        self.stream: TextIO = stream or sys.stdout

    # === Bas niveau ===

    def _open(self, destination: Optional[str]):
        if destination in (None, "-"):
            return _Borrowed(self.stream)
        directory = os.path.dirname(destination)
        if directory:
            os.makedirs(directory, exist_ok=True)
        return open(destination, "w", encoding="utf-8", newline="")

    def write_csv(
        self,
        rows: Sequence[Dict[str, Any]],
        destination: Optional[str] = None,
        fieldnames: Optional[Sequence[str]] = None,
    ) -> None:
        """
        Écrit des lignes CSV ; les colonnes sont l'union ordonnée des clés si non précisées.
        """
        if fieldnames is None:
            fieldnames = []
            for row in rows:
                fieldnames.extend(key for key in row if key not in fieldnames)
        with self._open(destination) as f:
            writer = csv.DictWriter(f, fieldnames=list(fieldnames), extrasaction="ignore", lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow({key: _clean(value) for key, value in row.items()})
        if destination not in (None, "-"):
            logger.info(f"✅ {len(rows)} ligne(s) écrite(s) dans {destination}")

    def write_json(self, data: Any, destination: Optional[str] = None) -> None:
        with self._open(destination) as f:
            json.dump(data, f, indent=2, ensure_ascii=False, default=str)
            f.write("\n")
        if destination not in (None, "-"):
            logger.info(f"✅ résumé JSON écrit dans {destination}")

    def write_trees(self, trees: Iterable[PlaneTree]) -> None:
        """Arbres sur la sortie standard, un par ligne."""
        for tree in trees:
            self.stream.write(format_tree(tree) + "\n")

    # === Recensement ===

    @staticmethod
    def census_rows(
        index: int,
        report: CensusReport,
        patterns: Sequence[PlaneTree],
        modes: Sequence[CountMode],
        r: Optional[int],
    ) -> List[Dict[str, Any]]:
        """
        Lignes CSV d'un hôte : une par (motif, mode), ou une seule sans motif.

        Les colonnes N_S_k suivent les colonnes fixes quand des classes de taille ont été recensées.
        """
        base: Dict[str, Any] = {
            "index": index,
            "n": report.n,
            "H_r": report.H_r.get(r, "") if r is not None else "",
            "H_r_nf": report.H_r_nf.get(r, "") if r is not None else "",
            "K": report.K if report.K is not None else "",
            "K_saturated": int(report.K_saturated) if report.K is not None else "",
        }
        for k, count in sorted(report.size_counts.items()):
            base[f"N_S_{k}"] = count
        if not patterns:
            return [dict(base, pattern="", mode="", count="")]
        rows = []
        for pattern in patterns:
            for mode in modes:
                rows.append(dict(base, pattern=format_tree(pattern), mode=mode.value, count=report.count(pattern, mode)))
        return rows

    def write_census(self, rows: Sequence[Dict[str, Any]], destination: Optional[str] = None) -> None:
        extra = [key for key in (rows[0] if rows else {}) if key.startswith("N_S_")]
        self.write_csv(rows, destination, CENSUS_COLUMNS + extra)

    # === Campagnes ===

    @staticmethod
    def summary_rows(summary: ExperimentSummary) -> List[Dict[str, Any]]:
        rows = []
        for row in summary.rows:
            flat = {"kind": summary.kind.value, "distribution": summary.distribution, "seed": summary.seed}
            flat.update(row.flat())
            rows.append(flat)
        return rows

    def write_summary(
        self,
        summary: ExperimentSummary,
        csv_path: Optional[str] = None,
        json_path: Optional[str] = None,
    ) -> None:
        """CSV (une ligne par n et par statistique) puis JSON complet si demandé."""
        self.write_csv(self.summary_rows(summary), csv_path)
        if json_path is not None:
            self.write_json(summary.as_dict(), json_path)

    def print_summary(self, summary: ExperimentSummary) -> None:
        """Rapport console lisible."""
        out = self.stream
        out.write(f"\n=== Campagne {summary.kind.value} : {summary.distribution} ===\n")
        out.write(f"graine {summary.seed}, {summary.replicates} répliques, n ∈ {summary.n_list}")
        if summary.rule:
            out.write(f", règle {summary.rule}")
        out.write(f", {summary.runtime_seconds:.1f} s\n")
        for row in summary.rows:
            parts = [f"n={row.n}", row.statistic, f"moyenne={row.mean:.4g}", f"variance={row.variance:.4g}"]
            if row.reference_mean is not None:
                parts.append(f"référence={row.reference_mean:.4g}")
            if row.empirical_tv is not None:
                parts.append(f"d_TV={row.empirical_tv:.4f} (biais ≤ {row.tv_bias_bound:.4f})")
            if row.centerline is not None:
                parts.append(f"centre={row.centerline:.4g}")
            out.write("  " + " | ".join(parts) + "\n")
        for note in summary.notes:
            out.write(f"  ⚠ {note}\n")


class _Borrowed:
    """Gestionnaire de contexte qui ne ferme pas le flux emprunté."""

    def __init__(self, stream: TextIO) -> None:
        self._stream = stream

    def __enter__(self) -> TextIO:
        return self._stream

    def __exit__(self, *exc: object) -> None:
        self._stream.flush()
