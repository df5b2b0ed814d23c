"""
Tests du laboratoire Monte Carlo : statistiques, règles de motifs, sondes
et campagnes de petite taille.
"""

import math

import numpy as np
import pytest

from src.analysis.exact import pmin, poisson_pmf
from src.experiments import probes as measures
from src.experiments import statistics
from src.experiments.pattern_rules import Expression, parse_pattern_rule
from src.experiments.probes import K, FringeCount, Height, KSaturated, NonfringeCount, SizeClass
from src.experiments.runner import (
    ReplicateRunner,
    run_heights,
    run_Kn,
    run_nonfringe_concentration,
    run_poisson_regimes,
    run_size_class,
)
from src.models.tree import PlaneTree, chain, complete_r_ary, star, subtree_sizes
from src.utils.enums import CountMode, ExperimentKind
from src.utils.errors import ConfigError, SamplerExhaustedError, SpanMismatchError


# === Statistiques ===


def test_histogram_and_pmf():
    values = np.array([0, 1, 1, 5])
    assert statistics.histogram(values) == {0: 1, 1: 2, 5: 1}
    assert statistics.empirical_pmf(values, 3).tolist() == [0.25, 0.5, 0.0]


def test_empirical_tv():
    assert statistics.empirical_tv(np.zeros(50, dtype=np.int64), 0.0) == pytest.approx(0.0, abs=1e-15)
    # Masse unique en 0 face à Po(1) : d_TV = 1 − e^{-1}
    assert statistics.empirical_tv(np.zeros(10, dtype=np.int64), 1.0) == pytest.approx(1 - math.exp(-1))
    rng = np.random.default_rng(1)
    assert statistics.empirical_tv(rng.poisson(4.0, 50_000), 4.0) < 0.02


def test_tv_bias_bound_and_support():
    assert statistics.tv_bias_bound(16, 100) == pytest.approx(0.2)
    values = np.array([0, 1, 2, 40])
    assert statistics.effective_support(0.0, values) == 4
    expected = int(np.count_nonzero(poisson_pmf(2.0, 60) > 1e-6))
    assert statistics.effective_support(2.0, np.array([1, 2])) == expected


def test_summary_statistics():
    values = np.arange(101)
    assert statistics.median(values) == 50.0
    assert statistics.quantiles(values) == {"q05": 5.0, "q25": 25.0, "q50": 50.0, "q75": 75.0, "q95": 95.0}
    assert statistics.skewness(np.full(10, 3)) == 0.0
    assert statistics.skewness(np.array([0, 0, 0, 0, 10])) > 0.0
    assert statistics.variance_mean_ratio(np.array([1, 3])) == pytest.approx(1.0)
    assert math.isnan(statistics.variance_mean_ratio(np.zeros(5)))


# === Règles de motifs ===


def test_expression_evaluation():
    assert Expression("n**2").integer(3) == 9
    assert Expression("sqrt(n)").integer(10) == 3
    assert Expression("ceil(0.5*log2(n)+0.5)")(1024) == 6
    assert Expression("-n + max(n, 2*pi)")(3) == pytest.approx(2 * math.pi - 3)


@pytest.mark.parametrize("text", ["__import__('os')", "n.real", "1 +", "'a'", "[n]", "log(n, base=2)", "x + 1", "n < 3"])
def test_expression_rejects(text):
    with pytest.raises(ConfigError):
        Expression(text)


def test_expression_runtime_errors():
    with pytest.raises(ConfigError):
        Expression("log(n - 5)")(5)
    with pytest.raises(ConfigError):
        Expression("1/(n-5)")(5)


def test_pattern_families(motzkin):
    rule = parse_pattern_rule("chain:ceil(0.5*log2(n)+0.5)")
    assert rule.pattern_for(1024) == chain(5)
    assert rule.size_for(1024) == 6
    assert parse_pattern_rule("rary2:2").pattern_for(100) == complete_r_ary(2, 2)
    assert parse_pattern_rule("rary2:2").size_for(100) == 7
    assert parse_pattern_rule("star:4").pattern_for(100) == star(4)
    assert parse_pattern_rule("star:1").pattern_for(100) == PlaneTree([0])
    assert parse_pattern_rule(" Tree : 2,0,0").pattern_for(100) == PlaneTree([2, 0, 0])
    assert parse_pattern_rule("pmin:3").pattern_for(100, motzkin) == pmin(motzkin, 3).tree
    assert parse_pattern_rule("size:floor(log(n))").size_for(100) == 4


@pytest.mark.parametrize("text", ["foo:1", "chain", "tree:2,0", "tree:a,b", "rary0:2", "chain:n +"])
def test_pattern_rule_errors(text):
    with pytest.raises(ConfigError):
        parse_pattern_rule(text)


def test_pattern_rule_usage_errors():
    with pytest.raises(ConfigError):
        parse_pattern_rule("size:2").pattern_for(100)
    with pytest.raises(ConfigError):
        parse_pattern_rule("pmin:3").pattern_for(100)
    with pytest.raises(ConfigError):
        parse_pattern_rule("chain:0").pattern_for(100)


def test_large_pattern_flag():
    rule = parse_pattern_rule("chain:20")
    assert rule.is_large(101)
    assert not rule.is_large(1001)


# === Sondes ===


def test_probes(sample_host, motzkin):
    sizes = subtree_sizes(sample_host)
    assert FringeCount(PlaneTree([0])).measure(sample_host, sizes) == 4
    assert NonfringeCount(PlaneTree([2, 0, 0])).measure(sample_host, sizes) == 1
    assert SizeClass(2).measure(sample_host, sizes) == 1
    assert Height(3).measure(sample_host, sizes) == 1
    assert Height(2, CountMode.NONFRINGE).measure(sample_host, sizes) == 1
    assert K(motzkin, 4).measure(sample_host, sizes) >= 1
    assert KSaturated(motzkin, 4).measure(sample_host, sizes) in (0, 1)
    assert FringeCount(PlaneTree([0])).label == "N_T[0]"
    assert Height(2, CountMode.NONFRINGE).label == "H_nf_2"
    assert SizeClass(3).label == "N_S[3]"


def test_k_and_saturation_share_one_computation(sample_host, motzkin, monkeypatch):
    calls = []
    original = measures.compute_K

    def counting(host, dist, k_cap):
        calls.append(host)
        return original(host, dist, k_cap)

    monkeypatch.setattr(measures, "compute_K", counting)
    sizes = subtree_sizes(sample_host)
    value = K(motzkin, 4).measure(sample_host, sizes)
    saturated = KSaturated(motzkin, 4).measure(sample_host, sizes)
    assert len(calls) == 1
    assert (value, saturated) == (2, 0)

    other = PlaneTree([1, 0])
    K(motzkin, 4).measure(other, subtree_sizes(other))
    assert len(calls) == 2


# === Répliques ===


def test_replicate_runner_bounds(motzkin):
    with pytest.raises(ValueError):
        ReplicateRunner(motzkin, 0)
    with pytest.raises(ValueError):
        ReplicateRunner(motzkin, 10, workers=0)


def test_replicate_chunks_cover_range(motzkin):
    runner = ReplicateRunner(motzkin, 10, workers=3)
    tasks = runner._tasks(21, (), offset=100)
    assert tasks[0].start == 100 and tasks[-1].stop == 110
    assert all(a.stop == b.start for a, b in zip(tasks, tasks[1:]))


def test_replicates_do_not_depend_on_chunking(motzkin):
    probes = [SizeClass(1), Height(2)]
    single = ReplicateRunner(motzkin, 12, seed=3, workers=1).run(41, probes)
    chunked = ReplicateRunner(motzkin, 12, seed=3, workers=1)
    tasks = ReplicateRunner(motzkin, 12, seed=3, workers=4)._tasks(41, tuple(probes), 0)
    from src.experiments.runner import _run_chunk

    merged = np.concatenate([_run_chunk(task) for task in tasks], axis=0)
    assert merged.shape == (12, 2)
    assert np.array_equal(single, merged)
    assert np.array_equal(single, chunked.run(41, probes))


def test_exhaustion_crosses_process_boundary(plane):
    runner = ReplicateRunner(plane, replicates=4, seed=1, workers=2, max_rejections=1)
    with pytest.raises(SamplerExhaustedError) as info:
        runner.run(100_001, [SizeClass(1)])
    assert info.value.n == 100_001 and info.value.attempts == 1


# === Campagnes ===


def test_poisson_campaign(plane):
    summary = run_poisson_regimes(plane, [51, 101], "tree:0", replicates=30, seed=5)
    assert summary.kind is ExperimentKind.POISSON
    assert [row.n for row in summary.rows] == [51, 101]
    assert summary.n_list == [51, 101]
    assert summary.as_dict()["n_list"] == [51, 101]
    row = summary.row(101)
    assert row.replicates == 30
    assert sum(row.histogram.values()) == 30
    assert row.reference_mean == pytest.approx(101 * 0.5)
    assert 0.0 <= row.empirical_tv <= 1.0
    assert row.extra["pattern"] == "0"
    # Arbres plans à n nœuds : n/2 feuilles en moyenne
    assert row.extra["exact_mean"] == pytest.approx(50.5, rel=1e-9)


def test_poisson_campaign_impossible_pattern(full_binary):
    summary = run_poisson_regimes(full_binary, [21], "tree:1,0", replicates=10, seed=2)
    row = summary.row(21)
    assert row.mean == 0.0 and row.reference_mean == 0.0
    assert row.empirical_tv == pytest.approx(0.0, abs=1e-15)
    assert "standardized_mean" not in row.extra
    data = summary.as_dict()
    assert data["kind"] == "poisson"
    assert data["rows"][0]["extra"]["variance_mean_ratio"] is None
    assert data["rows"][0]["histogram"] == {"0": 10}


def test_poisson_campaign_flags_large_patterns(motzkin):
    summary = run_poisson_regimes(motzkin, [101], "chain:20", replicates=5, seed=1, exact_reference=False)
    assert any("n=101" in note for note in summary.notes)
    assert "exact_mean" not in summary.row(101).extra


def test_campaign_validation(full_binary):
    with pytest.raises(SpanMismatchError):
        run_poisson_regimes(full_binary, [20], "tree:0", replicates=5)
    with pytest.raises(ValueError):
        run_poisson_regimes(full_binary, [], "tree:0", replicates=5)
    with pytest.raises(ConfigError):
        run_poisson_regimes(full_binary, [21], "leaf:1", replicates=5)


def test_size_class_campaign(full_binary):
    # Un arbre binaire complet à 21 nœuds a exactement 11 feuilles
    summary = run_size_class(full_binary, [21], "size:1", replicates=20, seed=9)
    row = summary.row(21)
    assert row.mean == 11.0 and row.variance == 0.0
    assert row.extra["k"] == 1
    assert row.extra["pi_S_k"] == pytest.approx(0.5)
    assert row.extra["exact_mean"] == pytest.approx(11.0)
    assert row.extra["mean_over_exact"] == pytest.approx(1.0)


def test_nonfringe_campaign_leaf_is_deterministic(plane):
    summary = run_nonfringe_concentration(plane, [51], "tree:0", replicates=15, seed=4)
    row = summary.row(51)
    assert summary.kind is ExperimentKind.NONFRINGE
    assert row.mean == 51.0 and row.variance == 0.0
    assert row.extra["ratio_mean"] == pytest.approx(1.0)
    assert row.extra["ratio_within_10pct"] == 1.0
    assert row.extra["exact_mean"] == pytest.approx(51.0)


def test_nonfringe_campaign_chain_limit(motzkin):
    summary = run_nonfringe_concentration(motzkin, [101], "chain:3", replicates=10, seed=4)
    row = summary.row(101)
    assert row.extra["chain_variance_mean_limit"] == pytest.approx((1 + 1 / 3) / (1 - 1 / 3))
    assert row.reference_mean == pytest.approx(101 / 9)


def test_heights_campaign(full_binary, motzkin):
    summary = run_heights(full_binary, [61], 2, [CountMode.FRINGE, CountMode.NONFRINGE], replicates=12, seed=6)
    fringe, nonfringe = summary.row(61, "H_2"), summary.row(61, "H_nf_2")
    assert fringe.mean <= nonfringe.mean
    assert fringe.centerline is not None and nonfringe.centerline is not None
    assert "median" in fringe.extra
    impossible = run_heights(motzkin, [31], 3, CountMode.FRINGE, replicates=5, seed=6)
    assert impossible.notes
    assert impossible.row(31).mean == 0.0


def test_Kn_campaign(motzkin):
    summary = run_Kn(motzkin, [41], replicates=8, seed=7, k_cap=6)
    row = summary.row(41, "K")
    assert 1 <= min(row.histogram) and max(row.histogram) <= 6
    assert 0.0 <= row.extra["saturated_fraction"] <= 1.0
    assert row.extra["k_cap"] == 6
    assert row.extra["regime"] == "well-behaved"


def test_summaries_are_reproducible(motzkin):
    first = run_poisson_regimes(motzkin, [41], "chain:2", replicates=12, seed=77)
    second = run_poisson_regimes(motzkin, [41], "chain:2", replicates=12, seed=77)
    assert first == second


def test_summary_independent_of_workers(motzkin):
    serial = run_heights(motzkin, [41, 61], 2, CountMode.NONFRINGE, replicates=16, seed=13, workers=1)
    parallel = run_heights(motzkin, [41, 61], 2, CountMode.NONFRINGE, replicates=16, seed=13, workers=2)
    assert serial == parallel
