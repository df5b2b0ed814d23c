"""
Package experiments - campagnes Monte Carlo et leurs résumés.
"""

from .pattern_rules import Expression, PatternRule, parse_pattern_rule
from .probes import K, FringeCount, Height, KSaturated, NonfringeCount, Probe, SizeClass
from .runner import (
    ReplicateRunner,
    run_heights,
    run_Kn,
    run_nonfringe_concentration,
    run_poisson_regimes,
    run_size_class,
)
from .summary import ExperimentRow, ExperimentSummary

__all__ = [
    "Expression",
    "PatternRule",
    "parse_pattern_rule",
    "Probe",
    "FringeCount",
    "NonfringeCount",
    "SizeClass",
    "Height",
    "K",
    "KSaturated",
    "ReplicateRunner",
    "run_poisson_regimes",
    "run_size_class",
    "run_nonfringe_concentration",
    "run_heights",
    "run_Kn",
    "ExperimentRow",
    "ExperimentSummary",
]
