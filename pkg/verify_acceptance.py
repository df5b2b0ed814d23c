#!/usr/bin/env python3
"""
Script de vérification des critères d'acceptation.
Lance les contrôles longs (10^5 à 10^6 tirages) et affiche un rapport ✅/❌.

Usage:
    python verify_acceptance.py                 # tous les contrôles
    python verify_acceptance.py --only 1 3 5    # contrôles choisis
    python verify_acceptance.py --workers 8
"""

import argparse
import math
import os
import sys
import time
from collections import Counter
from typing import Callable, Dict, List, Tuple

# Ajouter le répertoire racine au path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import numpy as np

from src.analysis.exact import (
    expected_fringe_count,
    expected_nonfringe_count,
    local_limit_ratio,
    pmin,
    poisson_tv,
    prob_total_size,
    second_factorial_nonfringe,
)
from src.analysis.oracle import exact_conditional_distribution, exact_count_pmf
from src.experiments.runner import run_heights, run_Kn, run_nonfringe_concentration, run_poisson_regimes
from src.models.offspring import builtin, constants
from src.models.tree import enumerate_trees, star
from src.sampler.seeding import SeededRNG
from src.sampler.tree_sampler import SampleConfig, TreeSampler, switch_random_fringe
from src.utils.enums import CountMode
from src.utils.logger import setup_logging

SEED: int = 20240611
FINITE_BUILTINS: Tuple[str, ...] = ("full-binary", "motzkin", "plane")

# Un contrôle retourne (succès, détail)
Check = Callable[[int], Tuple[bool, str]]


def _close(a: float, b: float, rel: float = 1e-10) -> bool:
    return abs(a - b) <= rel * max(abs(a), abs(b), 1e-12)


def _empirical_tv(keys: Counter, law) -> float:
    total = sum(keys.values())
    support = set(keys) | set(law.entries)
    return 0.5 * sum(abs(keys.get(key, 0) / total - law.entries.get(key, 0.0)) for key in support)


# ----------------------------------------------------------------------
# Contrôles exacts
# ----------------------------------------------------------------------


def check_oracle_equivalence(workers: int) -> Tuple[bool, str]:
    patterns = [tree for k in range(1, 5) for tree in enumerate_trees(k)]
    failures: List[str] = []
    compared = 0
    for name in FINITE_BUILTINS:
        dist = builtin(name)
        for n in range(1, 10):
            if prob_total_size(dist, n) == 0.0:
                continue
            for pattern in patterns:
                fringe = exact_count_pmf(dist, n, pattern, CountMode.FRINGE)
                nonfringe = exact_count_pmf(dist, n, pattern, CountMode.NONFRINGE)
                report = second_factorial_nonfringe(dist, n, pattern)
                pairs = [
                    (expected_fringe_count(dist, n, pattern), fringe.mean),
                    (expected_nonfringe_count(dist, n, pattern), nonfringe.mean),
                    (report.second_factorial, nonfringe.second_factorial),
                ]
                compared += len(pairs)
                if not all(_close(a, b) for a, b in pairs):
                    failures.append(f"{name} n={n} T={pattern}")
    detail = f"{compared} comparaisons"
    if failures:
        detail += f", écarts : {', '.join(failures[:5])}"
    return not failures, detail


def check_local_limit(workers: int) -> Tuple[bool, str]:
    ratios = {name: local_limit_ratio(builtin(name), 10_001) for name in FINITE_BUILTINS}
    ok = all(0.95 <= ratio <= 1.05 for ratio in ratios.values())
    return ok, ", ".join(f"{name}={ratio:.4f}" for name, ratio in ratios.items())


def check_poisson_tv_bound(workers: int) -> Tuple[bool, str]:
    grid = np.geomspace(0.01, 100.0, 10)
    violations = 0
    for mu in grid:
        for nu in grid:
            tv, bound = poisson_tv(float(mu), float(nu))
            if tv > bound + 1e-12:
                violations += 1
    return violations == 0, f"{len(grid) ** 2} couples, {violations} violation(s)"


def check_L_constants(workers: int) -> Tuple[bool, str]:
    expected = {"full-binary": 1 / 2, "motzkin": 1 / 3, "d-ary(3)": 4 / 27, "plane": 1 / 4}
    values = {name: constants(builtin(name)).L for name in expected}
    ok = all(abs(values[name] - L) <= 1e-12 for name, L in expected.items())
    plane_root = pmin(builtin("plane"), 100).root_k
    binary_root = pmin(builtin("full-binary"), 101).root_k
    ok = ok and abs(plane_root - 0.25) <= 0.02 and abs(binary_root - 0.5) <= 0.05
    return ok, f"L = {values}, racines p^min : plan {plane_root:.4f}, binaire {binary_root:.4f}"


def check_labeled_pmin(workers: int) -> Tuple[bool, str]:
    labeled = builtin("labeled")
    wrong = []
    for k in range(20, 61):
        result = pmin(labeled, k)
        expected = labeled.prob(0) ** (k - 1) * labeled.prob(k - 1)
        if result.tree != star(k) or not _close(result.probability, expected, 1e-12):
            wrong.append(k)
    return not wrong, "étoile pour 20 ≤ k ≤ 60" if not wrong else f"échecs pour k ∈ {wrong}"


# ----------------------------------------------------------------------
# Contrôles Monte Carlo
# ----------------------------------------------------------------------


def check_sampler_exactness(workers: int) -> Tuple[bool, str]:
    results: Dict[str, float] = {}
    for name in FINITE_BUILTINS:
        dist = builtin(name)
        for n in (5, 7):
            law = exact_conditional_distribution(dist, n)
            sampler = TreeSampler(dist, SampleConfig(n=n), SeededRNG.for_replicate(SEED, n))
            keys = Counter(tree.key for tree in sampler.stream(1_000_000))
            results[f"{name}/{n}"] = _empirical_tv(keys, law)
    ok = all(tv <= 0.01 for tv in results.values())
    return ok, ", ".join(f"{key}: {tv:.4f}" for key, tv in results.items())


def check_switching(workers: int) -> Tuple[bool, str]:
    plane = builtin("plane")
    law = exact_conditional_distribution(plane, 5)
    rng = SeededRNG(SEED)
    sampler = TreeSampler(plane, SampleConfig(n=5), rng)
    keys: Counter = Counter()
    for _ in range(1_000_000):
        keys[switch_random_fringe(sampler.sample(), sampler.sample(), 2, rng).key] += 1
    tv = _empirical_tv(keys, law)
    return tv <= 0.01, f"d_TV = {tv:.4f}"


def check_poisson_regime(workers: int) -> Tuple[bool, str]:
    # Chaîne à 7 nœuds : n π = 10^4 · p_0 p_1^6 ≈ 1.22
    summary = run_poisson_regimes(builtin("plane"), [10_001], "chain:7", 100_000, SEED, workers)
    row = summary.rows[0]
    ok = 1.0 <= row.reference_mean <= 4.0 and row.empirical_tv <= 0.05
    return ok, f"nπ = {row.reference_mean:.3f}, d_TV = {row.empirical_tv:.4f} (biais ≤ {row.tv_bias_bound:.4f})"


def check_nonfringe_concentration(workers: int) -> Tuple[bool, str]:
    summary = run_nonfringe_concentration(builtin("motzkin"), [100_001], "rary2:2", 1_000, SEED, workers)
    ratio = summary.rows[0].extra["ratio_mean"]
    return 0.95 <= ratio <= 1.05, f"moyenne de N^nf/(nπ^nf) = {ratio:.4f}"


def check_variance_inflation(workers: int) -> Tuple[bool, str]:
    # Chaîne de hauteur 8 : n p_1^8 ≈ 1.5, le plus proche de 2
    summary = run_nonfringe_concentration(builtin("motzkin"), [10_001], "chain:9", 100_000, SEED, workers)
    row = summary.rows[0]
    ratio = row.extra["variance_mean_ratio"]
    return 1.8 <= ratio <= 2.2, f"variance/moyenne = {ratio:.4f} (limite {row.extra['chain_variance_mean_limit']:.1f})"


def check_heights(workers: int) -> Tuple[bool, str]:
    n = 1_000_001
    summary = run_heights(builtin("full-binary"), [n], 2, [CountMode.FRINGE, CountMode.NONFRINGE], 200, SEED, workers)
    fringe, nonfringe = summary.row(n, "H_2"), summary.row(n, "H_nf_2")
    fringe_ok = abs(fringe.extra["median"] - fringe.centerline) <= 1.0
    ratio = nonfringe.extra["median"] / math.log2(math.log(n))
    ok = fringe_ok and 0.75 <= ratio <= 1.35
    return ok, (
        f"médiane H = {fringe.extra['median']:.0f} (centre {fringe.centerline:.3f}), "
        f"médiane H̃ / log2 ln n = {ratio:.3f}"
    )


def check_Kn(workers: int) -> Tuple[bool, str]:
    n = 100_000
    summary = run_Kn(builtin("plane"), [n], 200, SEED, workers=workers)
    row = summary.rows[0]
    center = (math.log(n) - math.log(math.log(n))) / math.log(4)
    return abs(row.extra["median"] - center) <= 2.0, f"médiane K_n = {row.extra['median']:.0f}, centre {center:.3f}"


CHECKS: Dict[int, Tuple[str, Check]] = {
    1: ("Équivalence avec l'oracle (n ≤ 9, |T| ≤ 4)", check_oracle_equivalence),
    2: ("Exactitude de l'échantillonneur (10^6 tirages)", check_sampler_exactness),
    3: ("Limite locale de P(|𝒯| = n) à n ≈ 10^4", check_local_limit),
    4: ("Borne |√μ − √ν| de la distance de Poisson", check_poisson_tv_bound),
    5: ("Constante L et racines de p^min", check_L_constants),
    6: ("p^min de la loi étiquetée : étoile", check_labeled_pmin),
    7: ("Régime de Poisson (chaînes, n = 10^4)", check_poisson_regime),
    8: ("Concentration non frange (n = 10^5)", check_nonfringe_concentration),
    9: ("Inflation de variance des chaînes non franges", check_variance_inflation),
    10: ("Hauteurs binaires (n = 10^6)", check_heights),
    11: ("Seuil K_n (arbres plans, n = 10^5)", check_Kn),
    12: ("Échange de sous-arbres franges (10^6 essais)", check_switching),
}


def main() -> int:
    parser = argparse.ArgumentParser(description="Vérification des critères d'acceptation")
    parser.add_argument("--only", type=int, nargs="+", choices=sorted(CHECKS), help="numéros des contrôles")
    parser.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    args = parser.parse_args()
    setup_logging("WARNING")

    print("\n" + "=" * 70)
    print("  VÉRIFICATION DES CRITÈRES D'ACCEPTATION")
    print("=" * 70)

    failed = []
    for number in args.only or sorted(CHECKS):
        title, check = CHECKS[number]
        started = time.perf_counter()
        try:
            ok, detail = check(args.workers)
        except Exception as e:
            ok, detail = False, f"exception : {e!r}"
        elapsed = time.perf_counter() - started
        print(f"\n{'✅' if ok else '❌'} {number:2d}. {title} ({elapsed:.1f} s)")
        print(f"      {detail}")
        if not ok:
            failed.append(number)

    print("\n" + "-" * 70)
    if failed:
        print(f"  ❌ {len(failed)} contrôle(s) en échec : {failed}")
    else:
        print("  ✅ Tous les contrôles sont passés")
    print("-" * 70 + "\n")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
