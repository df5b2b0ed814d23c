"""
Module des contrôleurs : orchestration de la ligne de commande.
"""

from .cli_controller import CLIController, main

__all__ = ["CLIController", "main"]
