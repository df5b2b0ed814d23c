"""
Module de persistance des arbres.
Un arbre par ligne, suite de degrés séparée par des virgules ; les lignes
commençant par '#' et les lignes vides sont ignorées à la lecture.
"""

import os
from typing import Iterable, List, Optional

from ..models.tree import PlaneTree, format_tree, parse_tree
from .errors import InvalidTreeError
from .logger import get_logger

logger = get_logger("DATA MANAGER")


def save_trees(trees: Iterable[PlaneTree], filename: str, header: Optional[List[str]] = None) -> bool:
    """
    Écrit des arbres dans un fichier texte.

    Args:
        trees: Arbres à écrire
        filename: Fichier de sortie ("-" n'est pas géré ici, voir la vue)
        header: Lignes de commentaire écrites en tête (préfixées par '# ')

    Returns:
        True si l'écriture a réussi, False sinon
    """
    try:
        directory = os.path.dirname(filename)
        if directory:
            os.makedirs(directory, exist_ok=True)
        count = 0
        with open(filename, "w", encoding="utf-8") as f:
            for line in header or []:
                f.write(f"# {line}\n")
            for tree in trees:
                f.write(format_tree(tree) + "\n")
                count += 1
    except OSError as e:
        logger.error(f"❌ écriture de {filename} impossible : {e}")
        return False
    logger.info(f"{count} arbre(s) écrit(s) dans {filename}")
    return True


def parse_tree_lines(lines: Iterable[str], source: str = "<texte>") -> List[PlaneTree]:
    """
    Lit des arbres ligne par ligne.

    Raises:
        InvalidTreeError: Ligne invalide (avec son numéro)
    """
    trees: List[PlaneTree] = []
    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            trees.append(parse_tree(line))
        except InvalidTreeError as e:
            raise InvalidTreeError(f"{source}, ligne {number} : {e}") from e
    return trees


def load_trees(filename: str) -> Optional[List[PlaneTree]]:
    """
    Charge les arbres d'un fichier.

    Returns:
        Liste des arbres, ou None si le fichier n'existe pas

    Raises:
        InvalidTreeError: Contenu invalide
    """
    if not os.path.exists(filename):
        logger.error(f"fichier {filename} introuvable")
        return None
    with open(filename, "r", encoding="utf-8") as f:
        trees = parse_tree_lines(f, source=filename)
    logger.debug(f"{len(trees)} arbre(s) chargé(s) depuis {filename}")
    return trees
