"""
Journalisation avec étiquettes entre crochets.

Chaque module récupère un logger étiqueté (``get_logger("SAMPLER")``) ; les
messages sont rendus sous la forme ``[SAMPLER] message`` sur stderr.
"""

import logging
import sys
from typing import Optional

ROOT_LOGGER_NAME: str = "gwforest"
LOG_FORMAT: str = "[%(tag)s] %(message)s"

_configured: bool = False


class _TagFilter(logging.Filter):
    """Ajoute l'attribut ``tag`` (dernier segment du nom du logger)."""

    def filter(self, record: logging.LogRecord) -> bool:
        record.tag = record.name.rsplit(".", 1)[-1]
        return True


def get_logger(tag: str) -> logging.Logger:
    """
    Retourne le logger associé à une étiquette.

    Args:
        tag: Étiquette affichée entre crochets (ex: "CENSUS")

    Returns:
        Logger enfant de ``gwforest``
    """
    return logging.getLogger(f"{ROOT_LOGGER_NAME}.{tag}")


def setup_logging(level: str = "WARNING", stream: Optional[object] = None) -> None:
    """
    Installe le handler console du paquet (idempotent).

    Args:
        level: Niveau de journalisation ("DEBUG", "INFO", ...)
        stream: Flux de sortie (stderr par défaut)
    """
    global _configured
    root = logging.getLogger(ROOT_LOGGER_NAME)
    numeric_level = logging.getLevelName(level.upper())
    if not isinstance(numeric_level, int):
        numeric_level = logging.WARNING
    root.setLevel(numeric_level)

    if not _configured:
        handler = logging.StreamHandler(stream or sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler.addFilter(_TagFilter())
        root.addHandler(handler)
        root.propagate = False
        _configured = True
