"""
Tests des lois de reproduction : lois usuelles, constantes L_k, L, κ et tirages.
"""

import math

import numpy as np
import pytest

from src.models.offspring import builtin, constants, from_pmf, parse_distribution, sample_degree
from src.utils.errors import InvalidDistributionError

BUILTINS = ["plane", "full-binary", "motzkin", "d-ary(3)", "labeled", "discrete-gaussian(1)"]


@pytest.mark.parametrize("name", BUILTINS)
def test_builtins_are_critical(name):
    dist = builtin(name)
    assert abs(float(dist.probs.sum()) - 1.0) <= 1e-12
    assert abs(dist.mean - 1.0) <= 1e-9
    assert dist.sigma2 > 0.0


def test_builtin_values():
    assert builtin("full-binary").as_dict() == {0: 0.5, 2: 0.5}
    motzkin = builtin("motzkin").as_dict()
    assert set(motzkin) == {0, 1, 2}
    assert all(abs(p - 1 / 3) < 1e-15 for p in motzkin.values())
    plane = builtin("plane")
    for i in range(10):
        assert plane.prob(i) == pytest.approx(2.0 ** -(i + 1), rel=1e-12)
    assert plane.is_unbounded and plane.truncated_mass <= plane.tail_epsilon


def test_d_ary_is_binomial():
    dist = builtin("d-ary", d=3)
    assert dist.prob(0) == pytest.approx(8 / 27)
    assert dist.prob(3) == pytest.approx(1 / 27)
    assert builtin("d-ary(3)").as_dict() == dist.as_dict()


@pytest.mark.parametrize("name, d", [("d-ary", 1), ("d-ary", None), ("d-ary(x)", None), ("binary", None)])
def test_builtin_errors(name, d):
    with pytest.raises(InvalidDistributionError):
        builtin(name, d=d)


def test_span():
    assert builtin("full-binary").span == 2
    assert builtin("motzkin").span == 1
    assert builtin("labeled").span == 1
    assert builtin("plane").span == 1
    assert builtin("full-binary").is_valid_size(5)
    assert not builtin("full-binary").is_valid_size(4)


def test_parse_distribution():
    dist = parse_distribution("0:1/3, 1:1/3, 2:1/3")
    assert dist.name == "custom"
    assert dist.span == 1
    assert parse_distribution("motzkin").name == "motzkin"
    # Loi non critique
    with pytest.raises(InvalidDistributionError):
        parse_distribution("0:0.4,2:0.6")
    with pytest.raises(InvalidDistributionError):
        parse_distribution("0:0.5,0:0.5")
    with pytest.raises(InvalidDistributionError):
        parse_distribution("0:a")


def test_degenerate_law_rejected():
    with pytest.raises(InvalidDistributionError):
        from_pmf({1: 1.0})


# === Constantes ===


def test_constants_closed_forms():
    assert constants(builtin("full-binary")).L == pytest.approx(0.5, abs=1e-12)
    assert constants(builtin("motzkin")).L == pytest.approx(1 / 3, abs=1e-12)
    assert constants(builtin("d-ary(3)")).L == pytest.approx(4 / 27, abs=1e-12)
    plane = constants(builtin("plane"))
    assert plane.L == pytest.approx(0.25, abs=1e-12)
    assert plane.L_table[1] == pytest.approx(0.5, abs=1e-12)
    assert all(plane.L_table[k] == pytest.approx(0.25, abs=1e-12) for k in range(2, 50))
    assert plane.kappa == 1 and not plane.L_truncated


def test_kappa():
    assert constants(builtin("full-binary")).kappa == 1
    assert constants(builtin("motzkin")).kappa == 1
    labeled = constants(builtin("labeled"))
    assert math.isinf(labeled.kappa)
    assert labeled.L_truncated
    assert not labeled.well_behaved


@pytest.mark.parametrize("name", BUILTINS)
def test_L_table_non_increasing(name):
    table = constants(builtin(name), k_max=200).L_table
    values = [table[k] for k in range(1, 201)]
    assert all(b <= a + 1e-15 for a, b in zip(values, values[1:]))
    assert table[1] == pytest.approx(builtin(name).p0)


# === Tirages ===


def test_sample_degree_frequencies():
    rng = np.random.default_rng(1)
    binary = builtin("full-binary")
    draws = binary.sample_degrees(rng, 1_000_000)
    assert abs(np.mean(draws == 0) - 0.5) < 0.002
    assert set(np.unique(builtin("motzkin").sample_degrees(rng, 10_000)).tolist()) <= {0, 1, 2}
    assert abs(builtin("labeled").sample_degrees(rng, 1_000_000).mean() - 1.0) < 0.005


def test_sample_degree_scalar():
    rng = np.random.default_rng(7)
    dist = builtin("motzkin")
    values = {sample_degree(dist, rng) for _ in range(500)}
    assert values == {0, 1, 2}
