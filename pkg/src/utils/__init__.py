"""
Module utilitaire : constantes, énumérations, erreurs, journalisation et configuration.
"""

from .enums import CountMode, ExperimentKind, KRegime, SupportKind
from .errors import (
    CapExceededError,
    ConfigError,
    GWForestError,
    InvalidDistributionError,
    InvalidTreeError,
    SamplerExhaustedError,
    SpanMismatchError,
    UndefinedConditionalError,
)
from .config_manager import CampaignConfig, ConfigManager
from .logger import get_logger, setup_logging

__all__ = [
    "CountMode",
    "ExperimentKind",
    "KRegime",
    "SupportKind",
    "CapExceededError",
    "ConfigError",
    "GWForestError",
    "InvalidDistributionError",
    "InvalidTreeError",
    "SamplerExhaustedError",
    "SpanMismatchError",
    "UndefinedConditionalError",
    "CampaignConfig",
    "ConfigManager",
    "get_logger",
    "setup_logging",
]
