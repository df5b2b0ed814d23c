"""
Campagnes Monte Carlo.

Chaque campagne tire R arbres 𝒯_n par taille n, applique des sondes et
agrège les résultats en un ExperimentSummary. Les répliques sont réparties
par blocs contigus sur un ProcessPoolExecutor ; la graine de la réplique i
ne dépend que de (graine maîtresse, i), donc le résumé est identique quel que
soit le nombre de processus.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import NDArray

from ..analysis.exact import (
    expected_fringe_count,
    expected_nonfringe_count,
    expected_size_class_count,
    prob_nonfringe_root,
    prob_total_size,
    prob_tree,
)
from ..analysis.thresholds import predict_fringe_height, predict_K, predict_nonfringe_height
from ..models.offspring import OffspringDistribution
from ..models.tree import PlaneTree, subtree_sizes
from ..sampler.seeding import SeededRNG
from ..sampler.tree_sampler import SampleConfig, check_span, sample_conditional
from ..utils.constants import DEFAULT_K_CAP, DEFAULT_MAX_REJECTIONS, DEFAULT_SEED, DEFAULT_WORKERS
from ..utils.enums import CountMode, ExperimentKind
from ..utils.errors import InvalidDistributionError
from ..utils.logger import get_logger
from . import statistics
from .pattern_rules import PatternRule, parse_pattern_rule
from .probes import K, FringeCount, Height, KSaturated, NonfringeCount, Probe, SizeClass
from .summary import ExperimentRow, ExperimentSummary

logger = get_logger("EXPERIMENT")

# Blocs par processus : équilibre la charge quand les essais de rejet varient
CHUNKS_PER_WORKER: int = 4

RuleInput = Union[str, PatternRule]


# ----------------------------------------------------------------------
# Exécution des répliques
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class ChunkTask:
    """Bloc contigu de répliques [start, stop) envoyé à un processus."""

    dist: OffspringDistribution
    n: int
    master_seed: int
    start: int
    stop: int
    probes: Tuple[Probe, ...]
    max_rejections: int


def _run_chunk(task: ChunkTask) -> NDArray[np.int64]:
    """Point d'entrée des processus : une ligne de mesures par réplique."""
    config = SampleConfig(n=task.n, max_rejections=task.max_rejections, seed=task.master_seed)
    out = np.empty((task.stop - task.start, len(task.probes)), dtype=np.int64)
    for row, index in enumerate(range(task.start, task.stop)):
        rng = SeededRNG.for_replicate(task.master_seed, index)
        host = sample_conditional(task.dist, config, rng)
        sizes = subtree_sizes(host)
        for column, probe in enumerate(task.probes):
            out[row, column] = probe.measure(host, sizes)
    return out


class ReplicateRunner:
    """
    Exécute des répliques indépendantes et rassemble les mesures dans l'ordre.

    Attributes:
        dist: Loi de reproduction
        replicates: Répliques par taille
        seed: Graine maîtresse
        workers: Nombre de processus (1 = dans le processus courant)
        max_rejections: Plafond d'essais par arbre
    """

    def __init__(
        self,
        dist: OffspringDistribution,
        replicates: int,
        seed: int = DEFAULT_SEED,
        workers: int = DEFAULT_WORKERS,
        max_rejections: int = DEFAULT_MAX_REJECTIONS,
    ):
        if replicates < 1:
            raise ValueError("replicates doit être ≥ 1")
        if workers < 1:
            raise ValueError("workers doit être ≥ 1")
        self.dist = dist
        self.replicates = replicates
        self.seed = seed
        self.workers = workers
        self.max_rejections = max_rejections

    def _tasks(self, n: int, probes: Tuple[Probe, ...], offset: int) -> List[ChunkTask]:
        chunks = 1 if self.workers == 1 else min(self.replicates, self.workers * CHUNKS_PER_WORKER)
        bounds = np.linspace(0, self.replicates, chunks + 1).astype(np.int64)
        return [
            ChunkTask(self.dist, n, self.seed, offset + int(a), offset + int(b), probes, self.max_rejections)
            for a, b in zip(bounds[:-1], bounds[1:])
            if b > a
        ]

    def run(self, n: int, probes: Sequence[Probe], offset: int = 0) -> NDArray[np.int64]:
        """
        Mesure les sondes sur R arbres 𝒯_n.

        Args:
            n: Taille des arbres
            probes: Sondes à appliquer
            offset: Indice de la première réplique (distingue les tailles d'une campagne)

        Returns:
            Matrice (replicates, len(probes))
        """
        check_span(self.dist, n)
        tasks = self._tasks(n, tuple(probes), offset)
        if self.workers == 1:
            blocks = [_run_chunk(task) for task in tasks]
        else:
            with ProcessPoolExecutor(max_workers=self.workers) as executor:
                blocks = list(executor.map(_run_chunk, tasks))
        return np.concatenate(blocks, axis=0)


# ----------------------------------------------------------------------
# Construction des lignes
# ----------------------------------------------------------------------


def _row(
    n: int,
    statistic: str,
    values: NDArray[np.int64],
    reference_mean: Optional[float] = None,
    centerline: Optional[float] = None,
) -> ExperimentRow:
    values = np.asarray(values, dtype=np.int64)
    row = ExperimentRow(
        n=n,
        statistic=statistic,
        replicates=int(values.size),
        mean=float(values.mean()),
        variance=float(values.var(ddof=1)) if values.size > 1 else 0.0,
        quantiles=statistics.quantiles(values),
        histogram=statistics.histogram(values),
        reference_mean=reference_mean,
        centerline=centerline,
    )
    if reference_mean is not None:
        row.empirical_tv = statistics.empirical_tv(values, reference_mean)
        row.tv_bias_bound = statistics.tv_bias_bound(
            statistics.effective_support(reference_mean, values), values.size
        )
    return row


def _count_diagnostics(values: NDArray[np.int64]) -> dict:
    return {
        "zero_fraction": float(np.mean(values == 0)),
        "max_count": int(values.max(initial=0)),
        "variance_mean_ratio": statistics.variance_mean_ratio(values),
        "skewness": statistics.skewness(values),
    }


def _rule(rule: RuleInput) -> PatternRule:
    return rule if isinstance(rule, PatternRule) else parse_pattern_rule(rule)


def _start(
    kind: ExperimentKind,
    dist: OffspringDistribution,
    n_list: Sequence[int],
    replicates: int,
    seed: int,
    rule: Optional[PatternRule] = None,
) -> ExperimentSummary:
    if not n_list:
        raise ValueError("n_list est vide")
    for n in n_list:
        check_span(dist, n)
    logger.info(f"campagne {kind.value} : {dist.name}, n ∈ {list(n_list)}, R = {replicates}, graine {seed}")
    return ExperimentSummary(
        kind=kind,
        distribution=dist.name,
        seed=seed,
        replicates=replicates,
        rule=rule.text if rule is not None else None,
        n_list=[int(n) for n in n_list],
    )


def _finish(summary: ExperimentSummary, started: float) -> ExperimentSummary:
    summary.runtime_seconds = time.perf_counter() - started
    logger.info(f"campagne {summary.kind.value} terminée en {summary.runtime_seconds:.1f} s")
    return summary


# ----------------------------------------------------------------------
# Campagnes
# ----------------------------------------------------------------------


def run_poisson_regimes(
    dist: OffspringDistribution,
    n_list: Sequence[int],
    pattern_rule: RuleInput,
    replicates: int,
    seed: int = DEFAULT_SEED,
    workers: int = DEFAULT_WORKERS,
    max_rejections: int = DEFAULT_MAX_REJECTIONS,
    exact_reference: bool = True,
) -> ExperimentSummary:
    """
    N_{T_n}(𝒯_n) face à Po(n π(T_n)).

    Pour chaque n : motif T_n issu de la règle, comptages franges sur R
    répliques, d_TV empirique à Po(n π(T_n)) et diagnostics de régime
    (rapport variance/moyenne, asymétrie, fraction de zéros).

    Args:
        dist: Loi de reproduction
        n_list: Tailles (toutes ≡ 1 mod h)
        pattern_rule: Règle n ↦ T_n, ex. "chain:ceil(0.5*log2(n)+0.5)"
        replicates: Répliques par taille
        seed: Graine maîtresse
        workers: Processus
        max_rejections: Plafond d'essais par arbre
        exact_reference: Ajoute E N_T(𝒯_n) exacte aux diagnostics

    Returns:
        ExperimentSummary, une ligne par n
    """
    started = time.perf_counter()
    rule = _rule(pattern_rule)
    summary = _start(ExperimentKind.POISSON, dist, n_list, replicates, seed, rule)
    runner = ReplicateRunner(dist, replicates, seed, workers, max_rejections)

    for position, n in enumerate(n_list):
        pattern = rule.pattern_for(n, dist)
        if rule.is_large(n):
            summary.notes.append(f"n={n} : |T_n|/n > 0.1, hors du régime k_n = o(n)")
        mu = n * prob_tree(dist, pattern)
        values = runner.run(n, [FringeCount(pattern)], offset=position * replicates)[:, 0]
        row = _row(n, FringeCount(pattern).label, values, reference_mean=mu)
        row.extra.update(_count_diagnostics(values))
        row.extra["pattern"] = str(pattern)
        if mu > 0.0:
            row.extra["standardized_mean"] = (row.mean - mu) / math.sqrt(mu)
        if exact_reference:
            row.extra["exact_mean"] = expected_fringe_count(dist, n, pattern)
        summary.rows.append(row)
        logger.info(f"n={n} : moyenne {row.mean:.4g}, nπ = {mu:.4g}, d_TV ≈ {row.empirical_tv:.4f}")
    return _finish(summary, started)


def run_size_class(
    dist: OffspringDistribution,
    n_list: Sequence[int],
    k_rule: RuleInput,
    replicates: int,
    seed: int = DEFAULT_SEED,
    workers: int = DEFAULT_WORKERS,
    max_rejections: int = DEFAULT_MAX_REJECTIONS,
    exact_reference: bool = True,
) -> ExperimentSummary:
    """
    N_{S_k}(𝒯_n) face à Po(n π(S_k)), π(S_k) = P(|𝒯| = k).

    La règle donne k_n, par exemple "size:ceil(log(n))" ou "size:2".
    """
    started = time.perf_counter()
    rule = _rule(k_rule)
    summary = _start(ExperimentKind.SIZE_CLASS, dist, n_list, replicates, seed, rule)
    runner = ReplicateRunner(dist, replicates, seed, workers, max_rejections)

    for position, n in enumerate(n_list):
        k = rule.size_for(n)
        if k < 1:
            raise ValueError(f"la règle {rule.text!r} donne k = {k} < 1 en n = {n}")
        if rule.is_large(n):
            summary.notes.append(f"n={n} : k_n/n > 0.1, hors du régime k_n = o(n)")
        pi_k = prob_total_size(dist, k)
        values = runner.run(n, [SizeClass(k)], offset=position * replicates)[:, 0]
        row = _row(n, SizeClass(k).label, values, reference_mean=n * pi_k)
        row.extra.update(_count_diagnostics(values))
        row.extra["k"] = k
        row.extra["pi_S_k"] = pi_k
        row.extra["mean_over_n"] = row.mean / n
        if exact_reference:
            exact = expected_size_class_count(dist, n, k)
            row.extra["exact_mean"] = exact
            row.extra["mean_over_exact"] = row.mean / exact if exact > 0.0 else math.nan
        summary.rows.append(row)
    return _finish(summary, started)


def run_nonfringe_concentration(
    dist: OffspringDistribution,
    n_list: Sequence[int],
    pattern_rule: RuleInput,
    replicates: int,
    seed: int = DEFAULT_SEED,
    workers: int = DEFAULT_WORKERS,
    max_rejections: int = DEFAULT_MAX_REJECTIONS,
    exact_reference: bool = True,
) -> ExperimentSummary:
    """
    Concentration de N^nf_{T_n}(𝒯_n)/(n π^nf(T_n)).

    Pour une chaîne (motif à degrés internes 1), la limite du rapport
    variance/moyenne (1 + p_1)/(1 − p_1) est ajoutée aux diagnostics.
    """
    started = time.perf_counter()
    rule = _rule(pattern_rule)
    summary = _start(ExperimentKind.NONFRINGE, dist, n_list, replicates, seed, rule)
    runner = ReplicateRunner(dist, replicates, seed, workers, max_rejections)
    p1 = dist.prob(1)

    for position, n in enumerate(n_list):
        pattern = rule.pattern_for(n, dist)
        if rule.is_large(n):
            summary.notes.append(f"n={n} : |T_n|/n > 0.1, hors du régime k_n = o(n)")
        mu = n * prob_nonfringe_root(dist, pattern)
        values = runner.run(n, [NonfringeCount(pattern)], offset=position * replicates)[:, 0]
        row = _row(n, NonfringeCount(pattern).label, values, reference_mean=mu)
        row.extra.update(_count_diagnostics(values))
        row.extra["pattern"] = str(pattern)
        if mu > 0.0:
            ratios = values / mu
            row.extra["ratio_mean"] = float(ratios.mean())
            row.extra["ratio_within_10pct"] = float(np.mean(np.abs(ratios - 1.0) <= 0.1))
        if pattern.size >= 2 and int(pattern.degrees.max()) == 1 and p1 < 1.0:
            row.extra["chain_variance_mean_limit"] = (1.0 + p1) / (1.0 - p1)
        if exact_reference:
            row.extra["exact_mean"] = expected_nonfringe_count(dist, n, pattern)
        summary.rows.append(row)
    return _finish(summary, started)


def _height_centerline(dist: OffspringDistribution, n: int, r: int, mode: CountMode) -> Optional[float]:
    try:
        if mode is CountMode.FRINGE:
            return predict_fringe_height(dist, n, r)
        return predict_nonfringe_height(dist, n, r)
    except InvalidDistributionError:
        return None


def run_heights(
    dist: OffspringDistribution,
    n_list: Sequence[int],
    r: int,
    mode: Union[CountMode, Sequence[CountMode]],
    replicates: int,
    seed: int = DEFAULT_SEED,
    workers: int = DEFAULT_WORKERS,
    max_rejections: int = DEFAULT_MAX_REJECTIONS,
) -> ExperimentSummary:
    """
    Hauteurs maximales H_{n,r} et/ou H̃_{n,r} face à leur centre asymptotique.

    Plusieurs modes peuvent être mesurés sur les mêmes arbres.
    """
    started = time.perf_counter()
    modes = (mode,) if isinstance(mode, CountMode) else tuple(mode)
    summary = _start(ExperimentKind.HEIGHTS, dist, n_list, replicates, seed)
    if not dist.supports(r):
        summary.notes.append(f"p_{r} = 0 : aucun arbre {r}-aire complet de hauteur ≥ 1, hauteurs nulles")
    runner = ReplicateRunner(dist, replicates, seed, workers, max_rejections)
    probes = [Height(r, m) for m in modes]

    for position, n in enumerate(n_list):
        measured = runner.run(n, probes, offset=position * replicates)
        for column, probe in enumerate(probes):
            values = measured[:, column]
            centerline = _height_centerline(dist, n, r, probe.mode)
            row = _row(n, probe.label, values, centerline=centerline)
            row.extra["median"] = statistics.median(values)
            if centerline is not None and centerline > 0.0:
                ratios = values / centerline
                row.extra["median_offset"] = row.extra["median"] - centerline
                row.extra["median_ratio"] = row.extra["median"] / centerline
                row.extra["ratio_within_20pct"] = float(np.mean(np.abs(ratios - 1.0) <= 0.2))
            summary.rows.append(row)
    return _finish(summary, started)


def run_Kn(
    dist: OffspringDistribution,
    n_list: Sequence[int],
    replicates: int,
    seed: int = DEFAULT_SEED,
    k_cap: int = DEFAULT_K_CAP,
    workers: int = DEFAULT_WORKERS,
    max_rejections: int = DEFAULT_MAX_REJECTIONS,
) -> ExperimentSummary:
    """Distribution empirique de K_n face au centre prédit par predict_K."""
    started = time.perf_counter()
    summary = _start(ExperimentKind.KN, dist, n_list, replicates, seed)
    runner = ReplicateRunner(dist, replicates, seed, workers, max_rejections)
    probes = [K(dist, k_cap), KSaturated(dist, k_cap)]

    for position, n in enumerate(n_list):
        measured = runner.run(n, probes, offset=position * replicates)
        values, saturated = measured[:, 0], measured[:, 1]
        prediction = predict_K(dist, n) if n >= 3 else None
        row = _row(n, "K", values, centerline=prediction.value if prediction else None)
        row.extra["median"] = statistics.median(values)
        row.extra["saturated_fraction"] = float(saturated.mean())
        row.extra["k_cap"] = k_cap
        if prediction is not None:
            row.extra["regime"] = prediction.regime.value
            row.extra["median_offset"] = row.extra["median"] - prediction.value
            if prediction.heuristic:
                note = f"n={n} : régime {prediction.regime.value} choisi par heuristique ({prediction.detail})"
                summary.notes.append(note)
        summary.rows.append(row)
    return _finish(summary, started)
