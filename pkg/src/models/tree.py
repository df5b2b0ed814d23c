"""
Module des arbres plans.

Un arbre plan est stocké uniquement sous forme de suite de degrés en préordre
(d_1, …, d_k). Une suite est valide si et seulement si
Σ_{i≤j} d_i ≥ j pour 1 ≤ j ≤ k−1 et Σ d_i = k−1.

Conventions d'indices :
- Les positions exposées aux utilisateurs (subtree_span) sont 1-based
- Les tableaux numpy internes sont 0-based
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterator, List, NewType, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import NDArray

from ..utils.constants import MAX_ENUMERATION_SIZE, MAX_TREE_SIZE
from ..utils.errors import CapExceededError, InvalidTreeError
from ..utils.logger import get_logger
from .kernels import span_end_kernel, subtree_sizes_kernel
from .offspring import OffspringDistribution

logger = get_logger("TREE")

# Clé canonique : la suite de degrés elle-même, séparée par des virgules
TreeKey = NewType("TreeKey", bytes)

# Arbre sous forme de tuples imbriqués : un nœud est le tuple de ses enfants
Nested = Tuple["Nested", ...]

DegreeInput = Union[Sequence[int], NDArray[np.integer]]


class PlaneTree:
    """
    Arbre plan immuable, représenté par sa suite de degrés en préordre.

    Attributes:
        degrees: Tableau int64 en lecture seule (d_1, …, d_k)
    """

    __slots__ = ("_degrees", "_key")

    def __init__(self, degrees: DegreeInput) -> None:
        """
        Construit et valide un arbre.

        Args:
            degrees: Suite de degrés en préordre

        Raises:
            InvalidTreeError: Si la suite ne vérifie pas la condition de ballot
        """
        array = np.array(degrees, dtype=np.int64).ravel()
        if not validate(array):
            preview = ",".join(str(int(d)) for d in array[:20])
            raise InvalidTreeError(f"suite de degrés invalide : ({preview}{'…' if array.size > 20 else ''})")
        array.setflags(write=False)
        self._degrees: NDArray[np.int64] = array
        self._key: Optional[TreeKey] = None

    @property
    def degrees(self) -> NDArray[np.int64]:
        return self._degrees

    @property
    def size(self) -> int:
        """Nombre de nœuds |T|."""
        return int(self._degrees.size)

    @property
    def internal_count(self) -> int:
        """v(T) : nombre de nœuds internes."""
        return int(np.count_nonzero(self._degrees))

    @property
    def leaf_count(self) -> int:
        """ℓ(T) : nombre de feuilles."""
        return self.size - self.internal_count

    @property
    def key(self) -> TreeKey:
        """Clé canonique (deux arbres sont égaux si et seulement si leurs clés le sont)."""
        if self._key is None:
            self._key = make_key(self._degrees)
        return self._key

    def subtree(self, i: int) -> "PlaneTree":
        """Sous-arbre frange enraciné au i-ème nœud (1-based)."""
        start, end = subtree_span(self, i)
        return PlaneTree(self._degrees[start - 1:end])

    def to_nested(self) -> Nested:
        return to_nested(self._degrees)

    def __len__(self) -> int:
        return self.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PlaneTree):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __lt__(self, other: "PlaneTree") -> bool:
        return (self.size, self._degrees.tolist()) < (other.size, other._degrees.tolist())

    def __str__(self) -> str:
        return format_tree(self)

    def __repr__(self) -> str:
        if self.size <= 20:
            return f"PlaneTree({format_tree(self)})"
        return f"PlaneTree(size={self.size})"

    def __reduce__(self):
        return (PlaneTree, (self._degrees.copy(),))


def make_key(degrees: DegreeInput) -> TreeKey:
    """Clé ASCII "d_1,d_2,…" d'une suite de degrés."""
    return TreeKey(",".join(map(str, np.asarray(degrees).tolist())).encode("ascii"))


# ----------------------------------------------------------------------
# Validation et rotations
# ----------------------------------------------------------------------


def validate(degrees: DegreeInput) -> bool:
    """
    Vérifie la caractérisation des suites de degrés en préordre.

    Args:
        degrees: Suite candidate

    Returns:
        True si Σ_{i≤j} d_i ≥ j pour j < k et Σ d_i = k − 1
    """
    array = np.asarray(degrees, dtype=np.int64)
    if array.ndim != 1 or array.size == 0 or np.any(array < 0):
        return False
    # c_j = Σ_{i≤j} (d_i − 1) doit rester ≥ 0 avant la fin et valoir −1 à la fin
    excess = np.cumsum(array - 1)
    return bool(excess[-1] == -1 and np.all(excess[:-1] >= 0))


def unique_rotation(degrees: DegreeInput) -> int:
    """
    Retourne l'unique décalage cyclique r rendant la suite valide (lemme cyclique).

    La suite tournée est (d_{r+1}, …, d_k, d_1, …, d_r). Le décalage est
    l'indice suivant la première position du minimum des sommes partielles
    de (d_i − 1).

    Raises:
        InvalidTreeError: Si Σ d_i ≠ k − 1 (aucune rotation valide)
    """
    array = np.asarray(degrees, dtype=np.int64)
    if array.size == 0 or np.any(array < 0) or int(array.sum()) != array.size - 1:
        raise InvalidTreeError("aucune rotation valide : Σ d_i doit valoir k − 1")
    excess = np.cumsum(array - 1)
    return int((int(np.argmin(excess)) + 1) % array.size)


def rotate(degrees: DegreeInput, offset: int) -> NDArray[np.int64]:
    """Suite tournée de offset positions vers la gauche."""
    return np.roll(np.asarray(degrees, dtype=np.int64), -offset)


# ----------------------------------------------------------------------
# Sous-arbres
# ----------------------------------------------------------------------


def subtree_span(tree: PlaneTree, i: int) -> Tuple[int, int]:
    """
    Intervalle (start, end) 1-based et inclusif du sous-arbre frange du i-ème nœud.

    Le balayage s'arrête quand la somme partielle des degrés moins le nombre
    de nœuds atteint −1.
    """
    if not 1 <= i <= tree.size:
        raise IndexError(f"position {i} hors de 1..{tree.size}")
    end = span_end_kernel(tree.degrees, i - 1)
    return i, int(end) + 1


def subtree_sizes(tree: Union[PlaneTree, NDArray[np.int64]]) -> NDArray[np.int64]:
    """Taille du sous-arbre frange de chaque nœud, dans l'ordre préfixe."""
    degrees = tree.degrees if isinstance(tree, PlaneTree) else np.ascontiguousarray(tree, dtype=np.int64)
    return subtree_sizes_kernel(degrees)


# ----------------------------------------------------------------------
# Familles nommées
# ----------------------------------------------------------------------


def complete_r_ary(r: int, h: int, size_cap: int = MAX_TREE_SIZE) -> PlaneTree:
    """
    Arbre r-aire complet de hauteur h.

    Pour r ≥ 2 : r^h feuilles et (r^h − 1)/(r − 1) nœuds internes de degré r.
    Pour r = 1 : chaîne de h + 1 nœuds.

    Raises:
        CapExceededError: Si la taille dépasse size_cap
    """
    if r < 1 or h < 0:
        raise ValueError("complete_r_ary exige r ≥ 1 et h ≥ 0")
    if r == 1:
        size = h + 1
    else:
        size = (r ** (h + 1) - 1) // (r - 1)
    if size > size_cap:
        raise CapExceededError(f"arbre {r}-aire complet de hauteur {h} : {size} nœuds > {size_cap}")

    # Préordre : un nœud à profondeur < h a r enfants, les autres sont des feuilles
    degrees = np.empty(size, dtype=np.int64)
    position = 0
    stack = [0]
    while stack:
        depth = stack.pop()
        if depth < h:
            degrees[position] = r
            stack.extend([depth + 1] * r)
        else:
            degrees[position] = 0
        position += 1
    return PlaneTree(degrees)


def chain(h: int) -> PlaneTree:
    """Chaîne de hauteur h (h + 1 nœuds)."""
    return complete_r_ary(1, h)


def star(k: int) -> PlaneTree:
    """Étoile (k−1, 0, …, 0) à k nœuds."""
    if k < 2:
        raise ValueError("star exige k ≥ 2")
    degrees = np.zeros(k, dtype=np.int64)
    degrees[0] = k - 1
    return PlaneTree(degrees)


# ----------------------------------------------------------------------
# Énumération
# ----------------------------------------------------------------------


def _generate(k: int, allowed: Optional[frozenset]) -> Iterator[Tuple[int, ...]]:
    """Suites de degrés valides de longueur k, en ordre lexicographique."""
    prefix: List[int] = []

    def extend(need: int) -> Iterator[Tuple[int, ...]]:
        remaining = k - len(prefix) - 1
        if remaining < 0:
            if need == 0:
                yield tuple(prefix)
            return
        # Après ce nœud : need − 1 + d places ouvertes, au plus remaining nœuds pour les remplir
        for d in range(0, remaining - need + 2):
            if allowed is not None and d not in allowed:
                continue
            after = need - 1 + d
            if after == 0 and remaining > 0:
                continue
            prefix.append(d)
            yield from extend(after)
            prefix.pop()

    yield from extend(1)


def enumerate_trees(k: int) -> List[PlaneTree]:
    """
    Tous les arbres plans à k nœuds (Catalan(k−1) arbres).

    Raises:
        CapExceededError: Si k > 20
    """
    if k < 1:
        raise ValueError("enumerate_trees exige k ≥ 1")
    if k > MAX_ENUMERATION_SIZE:
        raise CapExceededError(f"énumération limitée à k ≤ {MAX_ENUMERATION_SIZE} (reçu {k})")
    return [PlaneTree(seq) for seq in _cached_sequences(k, None)]


def enumerate_possible(dist: OffspringDistribution, k_max: int) -> List[PlaneTree]:
    """
    Tous les arbres de taille ≤ k_max dont chaque degré d vérifie p_d > 0.

    Args:
        dist: Loi de reproduction
        k_max: Taille maximale

    Returns:
        Liste triée par taille puis ordre lexicographique

    Raises:
        CapExceededError: Si k_max > 20
    """
    if k_max > MAX_ENUMERATION_SIZE:
        raise CapExceededError(f"énumération limitée à k ≤ {MAX_ENUMERATION_SIZE} (reçu {k_max})")
    allowed = frozenset(d for d in range(k_max) if dist.supports(d))
    trees: List[PlaneTree] = []
    for k in range(1, k_max + 1):
        trees.extend(PlaneTree(seq) for seq in _cached_sequences(k, allowed))
    return trees


@lru_cache(maxsize=64)
def _cached_sequences(k: int, allowed: Optional[frozenset]) -> Tuple[Tuple[int, ...], ...]:
    return tuple(_generate(k, allowed))


def count_possible_trees(dist: OffspringDistribution, k: int) -> int:
    """
    Nombre exact d'arbres de taille k dont tous les degrés sont supportés.

    Par le lemme cyclique, c'est (1/k) [x^{k−1}] (Σ_{d ∈ D} x^d)^k, calculé en
    entiers Python (Catalan(k−1) pour une loi de support ℕ).
    """
    if k < 1:
        return 0
    allowed = [d for d in range(k) if dist.supports(d)]
    target = k - 1
    # Polynôme tronqué au degré k − 1
    power = [1] + [0] * target
    for _ in range(k):
        product = [0] * (target + 1)
        for i, coeff in enumerate(power):
            if coeff == 0:
                continue
            for d in allowed:
                if i + d > target:
                    break
                product[i + d] += coeff
        power = product
    count, remainder = divmod(power[target], k)
    assert remainder == 0
    return count


def catalan(m: int) -> int:
    return math.comb(2 * m, m) // (m + 1)


# ----------------------------------------------------------------------
# Format texte et tuples imbriqués
# ----------------------------------------------------------------------


def parse_tree(text: str) -> PlaneTree:
    """
    Lit un arbre au format "2,1,0,3,0,0,0".

    Raises:
        InvalidTreeError: Texte illisible ou suite invalide
    """
    cleaned = text.strip().strip("()")
    try:
        degrees = [int(token) for token in cleaned.replace(" ", "").split(",") if token != ""]
    except ValueError as e:
        raise InvalidTreeError(f"arbre illisible : {text!r}") from e
    if not degrees:
        raise InvalidTreeError("arbre vide")
    return PlaneTree(degrees)


def format_tree(tree: PlaneTree) -> str:
    return tree.key.decode("ascii")


def to_nested(degrees: DegreeInput) -> Nested:
    """Convertit une suite de degrés en tuples imbriqués (enfants dans l'ordre)."""
    values = np.asarray(degrees).tolist()
    stack: List[Nested] = []
    for d in reversed(values):
        children = tuple(stack.pop() for _ in range(d))
        stack.append(children)
    return stack[0]


def from_nested(node: Nested) -> PlaneTree:
    """Inverse de to_nested."""
    degrees: List[int] = []
    pending = [node]
    while pending:
        current = pending.pop()
        degrees.append(len(current))
        pending.extend(reversed(current))
    return PlaneTree(degrees)
