"""
Fixtures partagées des tests gwforest.

Les lois usuelles sont construites une seule fois par session ; la stratégie
hypothesis `plane_trees` produit des arbres plans valides à partir d'un arbre
récursif aléatoire (liste de parents), converti en suite de degrés en préordre.
"""

from typing import List

import pytest
from hypothesis import strategies as st

from src.models.offspring import builtin
from src.models.tree import PlaneTree
from src.utils.logger import setup_logging

setup_logging("WARNING")


@pytest.fixture(scope="session")
def plane():
    return builtin("plane")


@pytest.fixture(scope="session")
def motzkin():
    return builtin("motzkin")


@pytest.fixture(scope="session")
def full_binary():
    return builtin("full-binary")


@pytest.fixture(scope="session")
def labeled():
    return builtin("labeled")


@pytest.fixture
def sample_host() -> PlaneTree:
    """Arbre (2,1,0,3,0,0,0) utilisé dans la plupart des exemples."""
    return PlaneTree([2, 1, 0, 3, 0, 0, 0])


def preorder_from_parents(parents: List[int]) -> List[int]:
    """Suite de degrés en préordre d'un arbre donné par parents[i] < i (i ≥ 1)."""
    children: List[List[int]] = [[] for _ in range(len(parents) + 1)]
    for child, parent in enumerate(parents, start=1):
        children[parent].append(child)
    degrees: List[int] = []
    pending = [0]
    while pending:
        node = pending.pop()
        degrees.append(len(children[node]))
        pending.extend(reversed(children[node]))
    return degrees


@st.composite
def plane_trees(draw, max_size: int = 40) -> PlaneTree:
    size = draw(st.integers(min_value=1, max_value=max_size))
    parents = [draw(st.integers(min_value=0, max_value=i - 1)) for i in range(1, size)]
    return PlaneTree(preorder_from_parents(parents))
