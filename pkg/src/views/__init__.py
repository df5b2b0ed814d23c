"""
Module des vues : rendu CSV, JSON et console.
"""

from .report_writer import CENSUS_COLUMNS, ReportWriter

__all__ = ["CENSUS_COLUMNS", "ReportWriter"]
