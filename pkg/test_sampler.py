"""
Tests de l'échantillonneur : tirages conditionnés exacts, processus non
conditionné, échange de sous-arbres franges et graines reproductibles.

Les lois empiriques sont comparées à l'oracle sur quelques dizaines de
milliers de tirages ; les seuils restent larges devant l'erreur d'échantillonnage.
"""

import pickle
from collections import Counter

import numpy as np
import pytest

from src.analysis.exact import prob_total_size
from src.analysis.oracle import exact_conditional_distribution
from src.models.tree import PlaneTree, validate
from src.sampler.seeding import SeededRNG, derive_seed
from src.sampler.tree_sampler import (
    SampleConfig,
    TreeSampler,
    sample_conditional,
    sample_conditional_counted,
    sample_degrees_batch,
    sample_unconditional,
    switch_fringe_at,
    switch_random_fringe,
)
from src.utils.errors import (
    CapExceededError,
    ConfigError,
    InvalidDistributionError,
    InvalidTreeError,
    SamplerExhaustedError,
    SpanMismatchError,
    UndefinedConditionalError,
)


def _empirical_tv(samples, law):
    counts = Counter(tree.key for tree in samples)
    keys = set(counts) | set(law.entries)
    total = len(samples)
    return 0.5 * sum(abs(counts.get(key, 0) / total - law.entries.get(key, 0.0)) for key in keys)


# === Graines ===


def test_derive_seed():
    assert derive_seed(42, 0) == derive_seed(42, 0)
    assert len({derive_seed(42, i) for i in range(100)}) == 100
    assert derive_seed(42, 1) != derive_seed(43, 1)
    assert 0 <= derive_seed(42, 5) < 2 ** 64
    with pytest.raises(ValueError):
        derive_seed(42, -1)


def test_seeded_rng_is_reproducible():
    a, b = SeededRNG.for_replicate(7, 3), SeededRNG.for_replicate(7, 3)
    assert [a.random() for _ in range(5)] == [b.random() for _ in range(5)]
    assert a.fork().seed == b.fork().seed


# === Tirages conditionnés ===


def test_span_mismatch(full_binary):
    with pytest.raises(SpanMismatchError):
        sample_conditional(full_binary, SampleConfig(n=4), SeededRNG(1))


def test_single_node(motzkin):
    assert sample_conditional(motzkin, SampleConfig(n=1), SeededRNG(1)) == PlaneTree([0])


def test_sample_config_bounds():
    with pytest.raises(ValueError):
        SampleConfig(n=0)
    with pytest.raises(ValueError):
        SampleConfig(n=10, max_rejections=0)


@pytest.mark.parametrize("name, n", [("motzkin", 201), ("full-binary", 201), ("plane", 200), ("labeled", 150)])
def test_samples_are_valid(name, n):
    from src.models.offspring import builtin

    dist = builtin(name)
    rng = SeededRNG(2024)
    for _ in range(20):
        tree = sample_conditional(dist, SampleConfig(n=n), rng)
        assert tree.size == n
        assert validate(tree.degrees)
        assert all(dist.supports(int(d)) for d in np.unique(tree.degrees))


def test_same_seed_same_tree(motzkin):
    config = SampleConfig(n=101)
    first = sample_conditional(motzkin, config, SeededRNG.for_replicate(5, 0))
    second = sample_conditional(motzkin, config, SeededRNG.for_replicate(5, 0))
    assert first == second


def test_plane_size_three_is_uniform(plane):
    rng = SeededRNG(3)
    config = SampleConfig(n=3)
    samples = [sample_conditional(plane, config, rng) for _ in range(20_000)]
    share = sum(tree == PlaneTree([2, 0, 0]) for tree in samples) / len(samples)
    assert abs(share - 0.5) < 0.02


@pytest.mark.parametrize("name, n", [("motzkin", 6), ("full-binary", 7), ("plane", 5)])
def test_conditional_law_matches_oracle(name, n):
    from src.models.offspring import builtin

    dist = builtin(name)
    law = exact_conditional_distribution(dist, n)
    rng = SeededRNG(99)
    config = SampleConfig(n=n)
    samples = [sample_conditional(dist, config, rng) for _ in range(20_000)]
    assert _empirical_tv(samples, law) < 0.03


def test_sampler_exhausted(plane):
    with pytest.raises(SamplerExhaustedError) as info:
        sample_conditional(plane, SampleConfig(n=1_000_001, max_rejections=1), SeededRNG(1))
    assert info.value.n == 1_000_001
    assert info.value.attempts == 1


def test_sampler_exhausted_survives_pickling():
    error = pickle.loads(pickle.dumps(SamplerExhaustedError(5, 10)))
    assert isinstance(error, SamplerExhaustedError)
    assert (error.n, error.attempts) == (5, 10)
    assert str(error) == str(SamplerExhaustedError(5, 10))
    custom = pickle.loads(pickle.dumps(SamplerExhaustedError(7, 3, "trop de rejets")))
    assert str(custom) == "trop de rejets" and custom.attempts == 3


@pytest.mark.parametrize(
    "error",
    [
        InvalidDistributionError("loi"),
        InvalidTreeError("arbre"),
        CapExceededError("plafond"),
        SpanMismatchError("pas"),
        UndefinedConditionalError("indéfini"),
        ConfigError("config"),
    ],
)
def test_errors_survive_pickling(error):
    restored = pickle.loads(pickle.dumps(error))
    assert type(restored) is type(error) and str(restored) == str(error)


def test_attempt_counts(motzkin):
    _, attempts = sample_conditional_counted(motzkin, SampleConfig(n=401), SeededRNG(8))
    assert attempts >= 1


def test_mean_attempts_follow_local_limit(motzkin):
    # Essais géométriques de paramètre P(S_n = n − 1) = n P(|𝒯| = n), soit ~ √n
    means = {}
    for n in (101, 1601):
        sampler = TreeSampler(motzkin, SampleConfig(n=n), SeededRNG(n))
        for _ in sampler.stream(400):
            pass
        means[n] = sampler.total_attempts / sampler.samples_drawn
        expected = 1.0 / (n * prob_total_size(motzkin, n))
        assert means[n] == pytest.approx(expected, rel=0.2)
    assert 3.0 < means[1601] / means[101] < 5.0


def test_tree_sampler(motzkin):
    sampler = TreeSampler(motzkin, SampleConfig(n=51), SeededRNG(4))
    assert sampler.acceptance_rate is None
    trees = list(sampler.stream(10))
    assert len(trees) == 10 and sampler.samples_drawn == 10
    assert 0.0 < sampler.acceptance_rate <= 1.0
    assert sampler.total_attempts >= 10


# === Processus non conditionné ===


def test_unconditional_full_binary_sizes(full_binary):
    rng = SeededRNG(5)
    sizes = []
    for _ in range(20_000):
        tree = sample_unconditional(full_binary, rng, size_cap=10_000)
        if tree is not None:
            assert tree.size % 2 == 1
            sizes.append(tree.size)
    assert abs(sizes.count(1) / 20_000 - 0.5) < 0.02


def test_unconditional_plane_size_three(plane):
    rng = SeededRNG(6)
    hits = 0
    for _ in range(20_000):
        tree = sample_unconditional(plane, rng, size_cap=10_000)
        if tree is not None and tree.size == 3:
            hits += 1
    assert abs(hits / 20_000 - 1 / 16) < 0.01


def test_unconditional_overflow(full_binary):
    rng = SeededRNG(7)
    results = [sample_unconditional(full_binary, rng, size_cap=1) for _ in range(200)]
    assert any(tree is None for tree in results)
    assert all(tree is None or tree == PlaneTree([0]) for tree in results)


def test_degree_batch(full_binary):
    draws = sample_degrees_batch(full_binary, SeededRNG(1), 100_000)
    assert set(np.unique(draws).tolist()) == {0, 2}
    assert abs(float(np.mean(draws == 0)) - 0.5) < 0.01


def test_kernels_use_the_full_generator_state(plane):
    # Le noyau tire dans le Generator de la réplique : même état, mêmes degrés
    from_wrapper = sample_degrees_batch(plane, SeededRNG(11), 200)
    from_generator = sample_degrees_batch(plane, np.random.default_rng(11), 200)
    assert np.array_equal(from_wrapper, from_generator)
    # Deux graines égales sur leurs 32 bits bas donnent des flux distincts
    high = sample_degrees_batch(plane, SeededRNG(11 + (1 << 32)), 200)
    assert not np.array_equal(from_wrapper, high)


def test_kernel_draws_advance_the_stream(plane):
    rng = SeededRNG(12)
    first = sample_degrees_batch(plane, rng, 50)
    second = sample_degrees_batch(plane, rng, 50)
    assert not np.array_equal(first, second)


# === Échange de sous-arbres ===


def test_switch_identity(plane):
    rng = SeededRNG(9)
    tree = sample_conditional(plane, SampleConfig(n=30), rng)
    for z in range(1, tree.size + 1):
        assert switch_fringe_at(tree, tree, 3, z) == tree
    assert switch_random_fringe(PlaneTree([2, 0, 0]), PlaneTree([2, 0, 0]), 1, rng) == PlaneTree([2, 0, 0])


def test_switch_at_node():
    t1, t2 = PlaneTree([1, 2, 0, 0]), PlaneTree([1, 1, 1, 0])
    assert switch_fringe_at(t1, t2, 3, 2) == t2
    assert switch_fringe_at(t1, t2, 2, 2) == t1
    with pytest.raises(ValueError):
        switch_random_fringe(t1, PlaneTree([0]), 1, SeededRNG(1))


def test_switch_preserves_law(plane):
    law = exact_conditional_distribution(plane, 5)
    rng = SeededRNG(10)
    config = SampleConfig(n=5)
    outputs = []
    for _ in range(20_000):
        t1 = sample_conditional(plane, config, rng)
        t2 = sample_conditional(plane, config, rng)
        outputs.append(switch_random_fringe(t1, t2, 2, rng))
    assert _empirical_tv(outputs, law) < 0.05
