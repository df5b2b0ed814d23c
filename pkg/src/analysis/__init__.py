"""
Module d'analyse : recensement des sous-arbres, calculs exacts, seuils et oracle.
"""

from .census import (
    CensusReport,
    KResult,
    census,
    compute_K,
    count_fringe,
    count_fringe_size,
    count_nonfringe,
    max_r_ary_fringe_height,
    max_r_ary_nonfringe_height,
)
from .exact import (
    ConvolutionTable,
    MomentReport,
    PminResult,
    convolve,
    expected_fringe_count,
    expected_nonfringe_count,
    expected_size_class_count,
    pmin,
    poisson_tv,
    prob_nonfringe_root,
    prob_total_size,
    prob_tree,
    second_factorial_nonfringe,
    t_boxplus_t,
)
from .oracle import CountLaw, ExactLaw, exact_conditional_distribution, exact_count_pmf
from .thresholds import KPrediction, alpha_r, coupon_bounds, predict_K, trinomial_tree_count

__all__ = [
    "CensusReport",
    "KResult",
    "census",
    "compute_K",
    "count_fringe",
    "count_fringe_size",
    "count_nonfringe",
    "max_r_ary_fringe_height",
    "max_r_ary_nonfringe_height",
    "ConvolutionTable",
    "MomentReport",
    "PminResult",
    "convolve",
    "expected_fringe_count",
    "expected_nonfringe_count",
    "expected_size_class_count",
    "pmin",
    "poisson_tv",
    "prob_nonfringe_root",
    "prob_total_size",
    "prob_tree",
    "second_factorial_nonfringe",
    "t_boxplus_t",
    "CountLaw",
    "ExactLaw",
    "exact_conditional_distribution",
    "exact_count_pmf",
    "KPrediction",
    "alpha_r",
    "coupon_bounds",
    "predict_K",
    "trinomial_tree_count",
]
