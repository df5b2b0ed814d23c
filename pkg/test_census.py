"""
Tests du recensement : comptages franges et non franges, classes de taille,
hauteurs r-aires et seuil K_n, croisés avec l'appariement de l'oracle.
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import plane_trees
from src.analysis.census import (
    census,
    compute_K,
    count_fringe,
    count_fringe_size,
    count_nonfringe,
    fringe_key_set,
    max_r_ary_fringe_height,
    max_r_ary_nonfringe_height,
    size_class_counts,
)
from src.analysis.oracle import oracle_count
from src.models.offspring import builtin
from src.models.tree import PlaneTree, chain, complete_r_ary, enumerate_possible, enumerate_trees
from src.utils.enums import CountMode
from src.utils.errors import CapExceededError

SMALL_PATTERNS = [tree for k in range(1, 5) for tree in enumerate_trees(k)]


# === Comptages franges ===


def test_count_fringe_examples(sample_host):
    assert count_fringe(sample_host, PlaneTree([0])) == 4
    assert count_fringe(sample_host, PlaneTree([1, 0])) == 1
    assert count_fringe(sample_host, sample_host) == 1
    assert count_fringe(sample_host, PlaneTree([3, 0, 0, 0])) == 1
    assert count_fringe(PlaneTree([0]), sample_host) == 0


def test_count_fringe_unknown_method(sample_host):
    with pytest.raises(ValueError):
        count_fringe(sample_host, PlaneTree([0]), method="regex")


@settings(max_examples=150, deadline=None)
@given(plane_trees(), st.sampled_from(SMALL_PATTERNS))
def test_fringe_methods_agree_with_oracle(host, pattern):
    expected = oracle_count(host, pattern, CountMode.FRINGE)
    assert count_fringe(host, pattern, method="kmp") == expected
    assert count_fringe(host, pattern, method="naive") == expected


def test_count_fringe_size(sample_host):
    assert count_fringe_size(sample_host, 1) == 4
    assert count_fringe_size(sample_host, 7) == 1
    assert count_fringe_size(sample_host, 3) == 0
    assert size_class_counts(sample_host) == {1: 4, 2: 1, 4: 1, 7: 1}
    assert size_class_counts(sample_host, k_max=2) == {1: 4, 2: 1}


# === Comptages non franges ===


def test_count_nonfringe_examples(sample_host):
    assert count_nonfringe(sample_host, PlaneTree([0])) == 7
    assert count_nonfringe(sample_host, PlaneTree([2, 0, 0])) == 1
    assert count_nonfringe(PlaneTree([1, 1, 1, 0]), PlaneTree([1, 1, 0])) == 2


@settings(max_examples=150, deadline=None)
@given(plane_trees(), st.sampled_from(SMALL_PATTERNS))
def test_nonfringe_agrees_with_oracle(host, pattern):
    fringe = count_fringe(host, pattern)
    nonfringe = count_nonfringe(host, pattern)
    assert nonfringe == oracle_count(host, pattern, CountMode.NONFRINGE)
    assert fringe <= nonfringe <= host.size


# === Hauteurs ===


def test_fringe_heights(sample_host):
    assert max_r_ary_fringe_height(PlaneTree([2, 0, 0]), 2) == 1
    assert max_r_ary_fringe_height(sample_host, 2) == 0
    assert max_r_ary_fringe_height(complete_r_ary(2, 5), 2) == 5
    assert max_r_ary_fringe_height(sample_host, 3) == 1
    assert max_r_ary_fringe_height(sample_host, 1) == 1


def test_nonfringe_heights(sample_host):
    assert max_r_ary_nonfringe_height(PlaneTree([1, 1, 1, 0]), 1) == 3
    assert max_r_ary_nonfringe_height(sample_host, 2) == 1
    assert max_r_ary_nonfringe_height(complete_r_ary(2, 4), 2) == 4
    with pytest.raises(ValueError):
        max_r_ary_nonfringe_height(sample_host, 0)


@settings(max_examples=100, deadline=None)
@given(plane_trees(), st.integers(min_value=1, max_value=3))
def test_heights_match_brute_force(host, r):
    fringe = max_r_ary_fringe_height(host, r)
    nonfringe = max_r_ary_nonfringe_height(host, r)
    assert count_fringe(host, complete_r_ary(r, fringe)) >= 1
    assert count_nonfringe(host, complete_r_ary(r, nonfringe)) >= 1
    if complete_r_ary(r, fringe + 1).size <= host.size:
        assert count_fringe(host, complete_r_ary(r, fringe + 1)) == 0
    if complete_r_ary(r, nonfringe + 1).size <= host.size:
        assert count_nonfringe(host, complete_r_ary(r, nonfringe + 1)) == 0
    assert fringe <= nonfringe


# === Seuil K_n ===


def test_compute_K_examples(full_binary, motzkin):
    assert compute_K(PlaneTree([0]), full_binary).K == 1
    assert compute_K(complete_r_ary(2, 2), full_binary).K == 3
    assert compute_K(PlaneTree([0]), motzkin).K == 1
    assert compute_K(PlaneTree([1, 0]), motzkin).K == 2


def test_compute_K_cap_independent(motzkin):
    host = PlaneTree([2, 1, 0, 2, 0, 1, 2, 0, 0])
    assert compute_K(host, motzkin, k_cap=8).K == compute_K(host, motzkin, k_cap=16).K


def test_compute_K_saturation(motzkin):
    # Tous les arbres de Motzkin de taille ≤ 2 apparaissent dans (2,1,0,0)
    result = compute_K(PlaneTree([2, 1, 0, 0]), motzkin, k_cap=2)
    assert result.K == 2 and result.saturated
    assert not compute_K(PlaneTree([2, 1, 0, 0]), motzkin, k_cap=4).saturated


def test_compute_K_cap_exceeded(motzkin):
    with pytest.raises(CapExceededError):
        compute_K(PlaneTree([0]), motzkin, k_cap=17)


@settings(max_examples=60, deadline=None)
@given(plane_trees(max_size=30))
def test_K_matches_key_sets(host):
    dist = builtin("motzkin")
    K = compute_K(host, dist, k_cap=6).K
    keys = fringe_key_set(host, 6)
    possible = enumerate_possible(dist, 6)
    assert all(tree.key in keys for tree in possible if tree.size <= K)
    if K < 6:
        assert any(tree.key not in keys for tree in possible if tree.size == K + 1)


# === Rapport ===


def test_census_report(sample_host, motzkin):
    patterns = [PlaneTree([0]), PlaneTree([1, 0]), chain(2)]
    report = census(
        sample_host,
        patterns=patterns,
        modes=[CountMode.FRINGE, CountMode.NONFRINGE],
        size_classes=[1, 2],
        r_values=[2, 3],
        dist=motzkin,
        k_cap=4,
    )
    assert report.n == 7
    assert report.count(PlaneTree([0]), CountMode.FRINGE) == 4
    assert report.count(PlaneTree([0]), CountMode.NONFRINGE) == 7
    assert report.count(chain(2), CountMode.FRINGE) == 0
    assert report.size_counts == {1: 4, 2: 1}
    assert report.H_r[2] == 0 and report.H_r_nf[2] == 1
    # p_3 = 0 sous la loi de Motzkin
    assert 3 in report.r_impossible and report.H_r[3] == 0
    assert report.K == compute_K(sample_host, motzkin, k_cap=4).K
    for pattern in patterns:
        assert report.count(pattern, CountMode.FRINGE) <= report.count(pattern, CountMode.NONFRINGE)


def test_census_requires_dist_for_K(sample_host):
    with pytest.raises(ValueError):
        census(sample_host, k_cap=4)
