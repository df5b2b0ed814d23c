"""
Module des modèles métier (lois de reproduction et arbres plans).
Contient la logique pure, sans dépendance à l'échantillonnage ni aux sorties.
"""

from .offspring import (
    DistributionConstants,
    OffspringDistribution,
    builtin,
    constants,
    discrete_gaussian,
    from_pmf,
    parse_distribution,
    sample_degree,
)
from .tree import (
    PlaneTree,
    TreeKey,
    chain,
    complete_r_ary,
    count_possible_trees,
    enumerate_possible,
    enumerate_trees,
    format_tree,
    parse_tree,
    star,
    subtree_sizes,
    subtree_span,
    unique_rotation,
    validate,
)

__all__ = [
    "DistributionConstants",
    "OffspringDistribution",
    "builtin",
    "constants",
    "discrete_gaussian",
    "from_pmf",
    "parse_distribution",
    "sample_degree",
    "PlaneTree",
    "TreeKey",
    "chain",
    "complete_r_ary",
    "count_possible_trees",
    "enumerate_possible",
    "enumerate_trees",
    "format_tree",
    "parse_tree",
    "star",
    "subtree_sizes",
    "subtree_span",
    "unique_rotation",
    "validate",
]
