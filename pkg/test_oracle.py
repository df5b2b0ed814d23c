"""
Tests de l'oracle par énumération complète.
"""

import math

import pytest

from src.analysis.exact import expected_fringe_count, prob_total_size, prob_tree
from src.analysis.oracle import clear_oracle_cache, exact_conditional_distribution, exact_count_pmf, oracle_count
from src.models.tree import PlaneTree, enumerate_trees
from src.utils.enums import CountMode
from src.utils.errors import CapExceededError, UndefinedConditionalError


def test_plane_law_is_uniform(plane):
    law = exact_conditional_distribution(plane, 5)
    assert len(law.entries) == 14
    assert all(p == pytest.approx(1 / 14) for p in law.entries.values())
    assert law.total_mass == pytest.approx(prob_total_size(plane, 5), rel=1e-12)


def test_full_binary_law(full_binary):
    law = exact_conditional_distribution(full_binary, 5)
    assert sorted(law.entries) == [b"2,0,2,0,0", b"2,2,0,0,0"]
    assert law.total_mass == pytest.approx(1 / 16)
    assert law.prob(PlaneTree([2, 2, 0, 0, 0])) == pytest.approx(0.5)
    assert law.prob(PlaneTree([1, 1, 1, 1, 0])) == 0.0


def test_law_weights_follow_pi(motzkin):
    law = exact_conditional_distribution(motzkin, 6)
    for tree in law.trees:
        assert law.prob(tree) == pytest.approx(prob_tree(motzkin, tree) / law.total_mass)
    assert math.fsum(law.entries.values()) == pytest.approx(1.0)


def test_oracle_errors(full_binary, motzkin):
    with pytest.raises(UndefinedConditionalError):
        exact_conditional_distribution(full_binary, 4)
    with pytest.raises(CapExceededError):
        exact_conditional_distribution(motzkin, 13)
    with pytest.raises(ValueError):
        exact_conditional_distribution(motzkin, 0)


def test_oracle_count(sample_host):
    assert oracle_count(sample_host, PlaneTree([0]), CountMode.FRINGE) == 4
    assert oracle_count(sample_host, PlaneTree([0]), CountMode.NONFRINGE) == 7
    assert oracle_count(sample_host, PlaneTree([2, 0, 0]), CountMode.NONFRINGE) == 1
    assert oracle_count(PlaneTree([1, 1, 1, 0]), PlaneTree([1, 1, 0]), CountMode.NONFRINGE) == 2


def test_count_law(motzkin):
    pattern = PlaneTree([1, 0])
    law = exact_count_pmf(motzkin, 8, pattern, CountMode.FRINGE)
    assert math.fsum(law.pmf.values()) == pytest.approx(1.0)
    assert law.mean == pytest.approx(expected_fringe_count(motzkin, 8, pattern), abs=1e-10)
    assert law.reference_mean == pytest.approx(8 * prob_tree(motzkin, pattern))
    assert law.variance >= 0.0
    assert 0.0 <= law.tv_to_poisson <= 1.0
    assert list(law.pmf) == sorted(law.pmf)


def test_leaf_count_is_deterministic_in_nonfringe_mode(plane):
    law = exact_count_pmf(plane, 6, PlaneTree([0]), CountMode.NONFRINGE)
    assert law.pmf == pytest.approx({6: 1.0})
    assert law.variance == pytest.approx(0.0, abs=1e-12)
    assert law.reference_mean == 6.0


def test_cache_can_be_cleared(motzkin):
    first = exact_conditional_distribution(motzkin, 5)
    assert exact_conditional_distribution(motzkin, 5) is first
    clear_oracle_cache()
    assert exact_conditional_distribution(motzkin, 5) is not first


def test_enumeration_sizes_cover_support(motzkin):
    law = exact_conditional_distribution(motzkin, 7)
    assert len(law.trees) == 51
    assert len(enumerate_trees(7)) == 132
