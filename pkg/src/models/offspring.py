"""
Module des lois de reproduction critiques.

Représente la loi {p_i} d'un arbre de Galton-Watson critique (E ξ = 1, 0 < σ² < ∞)
et calcule toutes les constantes scalaires qui en dérivent : σ², pas h, p_max,
la suite L_k, sa limite L et l'indice κ.

CONVENTION : les degrés de probabilité nulle ne sont jamais stockés. Les supports
non bornés (géométrique, Poisson, gaussienne discrète) sont tronqués à une masse
de queue ≤ tail_epsilon puis renormalisés ; leur générateur reste disponible
via log_prob() pour les degrés au-delà de la troncature.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Dict, Mapping, Optional, Tuple, Union

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import brentq
from scipy.special import gammaln

from ..utils.constants import (
    CRITICALITY_TOLERANCE,
    DEFAULT_TAIL_EPSILON,
    GUIDE_TABLE_SIZE,
    KAPPA_TOLERANCE,
    PMF_SUM_TOLERANCE,
)
from ..utils.enums import SupportKind
from ..utils.errors import InvalidDistributionError
from ..utils.logger import get_logger

logger = get_logger("OFFSPRING")

BUILTIN_NAMES: Tuple[str, ...] = ("plane", "full-binary", "motzkin", "d-ary", "labeled", "discrete-gaussian(c)")

# Nombre maximal de termes générés avant troncature d'une queue infinie
_MAX_GENERATED_TERMS: int = 5000
_LOG_FLOOR: float = math.log(1e-320)


@dataclass(frozen=True, eq=False)
class OffspringDistribution:
    """
    Loi de reproduction critique, immuable après construction.

    Attributes:
        name: Nom lisible ("motzkin", "d-ary(3)", "custom"...)
        degrees: Degrés de probabilité strictement positive, triés
        probs: Probabilités associées (float64)
        support_kind: FINITE ou UNBOUNDED
        tail_epsilon: Masse de queue maximale abandonnée à la troncature
        tail_family: Générateur de la queue ("geometric", "poisson", "gaussian") ou None
        tail_params: Paramètres du générateur
        truncated_mass: Masse effectivement abandonnée avant renormalisation
    """

    name: str
    degrees: NDArray[np.int64]
    probs: NDArray[np.float64]
    support_kind: SupportKind = SupportKind.FINITE
    tail_epsilon: float = DEFAULT_TAIL_EPSILON
    tail_family: Optional[str] = None
    tail_params: Tuple[float, ...] = ()
    truncated_mass: float = 0.0
    cdf: NDArray[np.float64] = field(init=False, repr=False)
    guide: NDArray[np.int64] = field(init=False, repr=False)
    _dense: NDArray[np.float64] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        degrees = np.asarray(self.degrees, dtype=np.int64)
        probs = np.asarray(self.probs, dtype=np.float64)
        order = np.argsort(degrees)
        degrees, probs = degrees[order], probs[order]

        if degrees.size == 0:
            raise InvalidDistributionError("loi vide")
        if np.any(degrees < 0):
            raise InvalidDistributionError("degré négatif dans la loi")
        if np.unique(degrees).size != degrees.size:
            raise InvalidDistributionError("degré répété dans la loi")
        if np.any(probs <= 0.0) or np.any(probs > 1.0):
            raise InvalidDistributionError("les probabilités stockées doivent être dans (0, 1]")

        total = float(probs.sum())
        if abs(total - 1.0) > PMF_SUM_TOLERANCE:
            raise InvalidDistributionError(f"Σ p_i = {total!r} ≠ 1")
        mean = float(np.dot(degrees, probs))
        if abs(mean - 1.0) > CRITICALITY_TOLERANCE:
            raise InvalidDistributionError(f"loi non critique : E ξ = {mean!r}")
        second = float(np.dot(degrees.astype(np.float64) ** 2, probs))
        if not second - mean * mean > 0.0:
            raise InvalidDistributionError("variance nulle : la loi doit vérifier σ² > 0")

        degrees.setflags(write=False)
        probs.setflags(write=False)
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "probs", probs)

        # Table dense indexée par le degré (utilisée par les convolutions et les scans)
        dense = np.zeros(int(degrees[-1]) + 1, dtype=np.float64)
        dense[degrees] = probs
        dense.setflags(write=False)
        object.__setattr__(self, "_dense", dense)

        # Inverse de la fonction de répartition avec table guide : tirage en O(1) amorti
        cdf = np.cumsum(probs)
        cdf[-1] = 1.0
        cuts = np.arange(GUIDE_TABLE_SIZE, dtype=np.float64) / GUIDE_TABLE_SIZE
        guide = np.searchsorted(cdf, cuts, side="right").astype(np.int64)
        cdf.setflags(write=False)
        guide.setflags(write=False)
        object.__setattr__(self, "cdf", cdf)
        object.__setattr__(self, "guide", guide)

    # ------------------------------------------------------------------
    # Accès à la loi
    # ------------------------------------------------------------------

    @property
    def max_degree(self) -> int:
        """Plus grand degré stocké (après troncature éventuelle)."""
        return int(self.degrees[-1])

    @property
    def dense_pmf(self) -> NDArray[np.float64]:
        """Vecteur p[0..max_degree] (zéros pour les degrés absents)."""
        return self._dense

    @property
    def p0(self) -> float:
        return self.prob(0)

    @property
    def is_unbounded(self) -> bool:
        return self.support_kind is SupportKind.UNBOUNDED

    def prob(self, degree: int) -> float:
        """
        Retourne p_d.

        Pour un support non borné, les degrés au-delà de la troncature sont
        évalués par le générateur (valeur non renormalisée, < tail_epsilon).
        """
        if degree < 0:
            return 0.0
        if degree <= self.max_degree:
            return float(self._dense[degree])
        if self.is_unbounded:
            return math.exp(self._tail_log_prob(degree))
        return 0.0

    def log_prob(self, degree: int) -> float:
        """Retourne log p_d (−inf si p_d = 0), sans sous-dépassement pour les grands d."""
        if degree < 0:
            return -math.inf
        if degree <= self.max_degree:
            p = float(self._dense[degree])
            return math.log(p) if p > 0.0 else -math.inf
        if self.is_unbounded:
            return self._tail_log_prob(degree)
        return -math.inf

    def supports(self, degree: int) -> bool:
        """True si p_d > 0 pour la vraie loi (troncature exclue)."""
        if degree < 0:
            return False
        if degree <= self.max_degree:
            return bool(self._dense[degree] > 0.0)
        return self.is_unbounded

    def _tail_log_prob(self, degree: int) -> float:
        return _family_log_prob(self.tail_family, self.tail_params, degree)

    def as_dict(self) -> Dict[int, float]:
        """Loi sous forme de dictionnaire {degré: probabilité}."""
        return {int(d): float(p) for d, p in zip(self.degrees, self.probs)}

    @property
    def mean(self) -> float:
        return float(np.dot(self.degrees, self.probs))

    @property
    def sigma2(self) -> float:
        mean = self.mean
        return float(np.dot(self.degrees.astype(np.float64) ** 2, self.probs)) - mean * mean

    @property
    def span(self) -> int:
        """Pas h = pgcd{i ≥ 1 : p_i > 0}."""
        positive = [int(d) for d in self.degrees if d >= 1]
        return reduce(math.gcd, positive)

    @property
    def p_max(self) -> float:
        return float(self.probs.max())

    @property
    def fingerprint(self) -> str:
        """Empreinte stable de la loi (clé des caches de convolution)."""
        digest = hashlib.sha256()
        digest.update(self.degrees.tobytes())
        digest.update(self.probs.tobytes())
        return digest.hexdigest()[:16]

    def is_valid_size(self, n: int) -> bool:
        """True si n ≥ 1 et n ≡ 1 (mod h)."""
        return n >= 1 and (n - 1) % self.span == 0

    # ------------------------------------------------------------------
    # Tirages
    # ------------------------------------------------------------------

    def sample_degree(self, rng: np.random.Generator) -> int:
        """
        Tire un degré selon {p_i} (inverse de la fonction de répartition guidée).

        Args:
            rng: Générateur numpy propre à l'appelant

        Returns:
            Degré i tiré avec probabilité p_i
        """
        u = rng.random()
        index = int(self.guide[int(u * GUIDE_TABLE_SIZE)])
        while self.cdf[index] <= u:
            index += 1
        return int(self.degrees[index])

    def sample_degrees(self, rng: np.random.Generator, size: int) -> NDArray[np.int64]:
        """Version vectorisée de sample_degree."""
        indices = np.searchsorted(self.cdf, rng.random(size), side="right")
        return self.degrees[indices]

    def __repr__(self) -> str:
        return f"OffspringDistribution({self.name}, support≤{self.max_degree}, h={self.span})"


# ----------------------------------------------------------------------
# Constantes dérivées
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class DistributionConstants:
    """
    Constantes scalaires d'une loi critique.

    Attributes:
        sigma2: Variance σ²
        span: Pas h
        p_max: max_i p_i
        L: lim L_k = inf_i p_0 (p_i/p_0)^{1/i}
        kappa: Premier indice i avec L_{i+1} = L (math.inf si non atteint)
        L_table: {k: L_k} pour 1 ≤ k ≤ k_max
        L_argmin: Plus petit degré i ≥ 1 réalisant L
        L_truncated: True si L n'est atteint qu'à la coupure d'un support tronqué
    """

    sigma2: float
    span: int
    p_max: float
    L: float
    kappa: Union[int, float]
    L_table: Dict[int, float]
    L_argmin: int
    L_truncated: bool

    @property
    def well_behaved(self) -> bool:
        return not math.isinf(self.kappa)


def constants(dist: OffspringDistribution, k_max: int = 200) -> DistributionConstants:
    """
    Calcule σ², h, p_max, la suite L_k, L et κ.

    L_1 = p_0 et, pour k ≥ 2, L_k est le minimum courant de p_0 et des
    p_0 (p_i/p_0)^{1/i} pour 1 ≤ i ≤ k−1, p_i > 0 (calcul en espace log).
    Pour un support tronqué, L est l'infimum sur le support stocké ; si le
    minimiseur tombe sur la coupure, L_truncated est levé et κ = ∞.

    Args:
        dist: Loi valide
        k_max: Dernier indice de la table L_k

    Returns:
        Constantes de la loi
    """
    if k_max < 1:
        raise InvalidDistributionError("k_max doit être ≥ 1")

    log_p0 = dist.log_prob(0)
    candidates = np.full(dist.max_degree + 1, np.inf)
    for degree in dist.degrees:
        i = int(degree)
        if i >= 1:
            candidates[i] = log_p0 + (dist.log_prob(i) - log_p0) / i

    # Minimum courant : running[k] = log L_k
    horizon = max(k_max, dist.max_degree + 1)
    running = np.empty(horizon + 1)
    running[0] = np.nan
    running[1] = log_p0
    for k in range(2, horizon + 1):
        step = candidates[k - 1] if k - 1 < candidates.size else np.inf
        running[k] = min(running[k - 1], step)

    log_L = float(running[horizon])
    L = math.exp(log_L)
    L_table = {k: math.exp(float(running[k])) for k in range(1, k_max + 1)}

    finite = np.flatnonzero(np.abs(np.exp(candidates[1:]) - L) <= KAPPA_TOLERANCE) + 1
    L_argmin = int(finite[0]) if finite.size else 0
    L_truncated = dist.is_unbounded and L_argmin == dist.max_degree

    kappa: Union[int, float] = math.inf
    if not L_truncated:
        for i in range(1, horizon):
            if abs(math.exp(float(running[i + 1])) - L) <= KAPPA_TOLERANCE:
                kappa = i
                break

    logger.debug(f"{dist.name} : L={L:.6g}, κ={kappa}, argmin={L_argmin}, tronqué={L_truncated}")
    return DistributionConstants(
        sigma2=dist.sigma2,
        span=dist.span,
        p_max=dist.p_max,
        L=L,
        kappa=kappa,
        L_table=L_table,
        L_argmin=L_argmin,
        L_truncated=L_truncated,
    )


def sample_degree(dist: OffspringDistribution, rng: np.random.Generator) -> int:
    """Tire un degré selon dist (voir OffspringDistribution.sample_degree)."""
    return dist.sample_degree(rng)


# ----------------------------------------------------------------------
# Construction
# ----------------------------------------------------------------------


def from_pmf(
    pmf: Mapping[int, float],
    name: str = "custom",
) -> OffspringDistribution:
    """
    Construit une loi à support fini à partir d'un dictionnaire {degré: p}.

    Les degrés de probabilité nulle sont retirés.

    Raises:
        InvalidDistributionError: Si la loi n'est pas une loi critique valide
    """
    items = [(int(d), float(p)) for d, p in pmf.items() if float(p) != 0.0]
    if not items:
        raise InvalidDistributionError("loi vide")
    degrees = np.array([d for d, _ in items], dtype=np.int64)
    probs = np.array([p for _, p in items], dtype=np.float64)
    return OffspringDistribution(name=name, degrees=degrees, probs=probs)


def builtin(
    name: str,
    d: Optional[int] = None,
    tail_epsilon: float = DEFAULT_TAIL_EPSILON,
) -> OffspringDistribution:
    """
    Retourne une des lois usuelles des arbres de Galton-Watson conditionnés.

    Args:
        name: "plane", "full-binary", "motzkin", "d-ary" (ou "d-ary(3)"), "labeled"
              ou "discrete-gaussian(c)"
        d: Arité pour "d-ary" (≥ 2)
        tail_epsilon: Masse de queue abandonnée pour les supports non bornés

    Returns:
        Loi de reproduction correspondante

    Raises:
        InvalidDistributionError: Nom inconnu ou d < 2
    """
    key = name.strip().lower()
    if key == "full-binary":
        return from_pmf({0: 0.5, 2: 0.5}, name="full-binary")
    if key == "motzkin":
        return from_pmf({0: 1 / 3, 1: 1 / 3, 2: 1 / 3}, name="motzkin")
    if key == "d-ary" or key.startswith("d-ary("):
        if d is None and key.startswith("d-ary("):
            text = _parameter(name, key)
            if not text.isdigit():
                raise InvalidDistributionError(f"arité entière attendue dans {name!r}")
            d = int(text)
        if d is None or d < 2:
            raise InvalidDistributionError("la loi d-ary exige d ≥ 2")
        q = 1.0 / d
        pmf = {i: math.comb(d, i) * q ** i * (1.0 - q) ** (d - i) for i in range(d + 1)}
        return from_pmf(pmf, name=f"d-ary({d})")
    if key == "plane":
        return _truncated("plane", "geometric", (), tail_epsilon)
    if key == "labeled":
        return _truncated("labeled", "poisson", (), tail_epsilon)
    if key.startswith("discrete-gaussian("):
        return discrete_gaussian(float(_parameter(name, key)), tail_epsilon)
    raise InvalidDistributionError(f"loi inconnue : {name!r} (attendu : {', '.join(BUILTIN_NAMES)})")


def _parameter(name: str, key: str) -> str:
    """Paramètre entre parenthèses d'un nom comme "d-ary(3)"."""
    if not key.endswith(")"):
        raise InvalidDistributionError(f"paramètre mal formé dans {name!r}")
    inner = key[key.index("(") + 1:-1]
    try:
        float(inner)
    except ValueError:
        raise InvalidDistributionError(f"paramètre non numérique dans {name!r}") from None
    return inner


def discrete_gaussian(c_prime: float, tail_epsilon: float = DEFAULT_TAIL_EPSILON) -> OffspringDistribution:
    """
    Loi gaussienne discrète inclinée p_i ∝ θ^i e^{−c' i²}, θ choisi pour E ξ = 1.

    Sa queue est f-super-exponentielle avec f(i) ~ c' i², donc L = 0.
    """
    if c_prime <= 0:
        raise InvalidDistributionError("c' doit être > 0")

    indices = np.arange(0, 200, dtype=np.float64)

    def mean_minus_one(log_theta: float) -> float:
        logs = indices * log_theta - c_prime * indices ** 2
        weights = np.exp(logs - logs.max())
        return float(np.dot(indices, weights) / weights.sum()) - 1.0

    log_theta = brentq(mean_minus_one, -50.0, 50.0 + 4.0 * c_prime * 50, xtol=1e-15)
    logs = indices * log_theta - c_prime * indices ** 2
    log_norm = float(logs.max() + np.log(np.exp(logs - logs.max()).sum()))
    return _truncated(
        f"discrete-gaussian({c_prime:g})", "gaussian", (c_prime, log_theta, log_norm), tail_epsilon
    )


def parse_distribution(
    text: str,
    d: Optional[int] = None,
    tail_epsilon: float = DEFAULT_TAIL_EPSILON,
) -> OffspringDistribution:
    """
    Interprète une déclaration de loi : nom usuel ou liste explicite "i:p_i,…".

    Les probabilités explicites acceptent les fractions ("0:1/3,1:1/3,2:1/3").

    Raises:
        InvalidDistributionError: Déclaration illisible ou loi invalide
    """
    text = text.strip()
    if ":" not in text:
        return builtin(text, d=d, tail_epsilon=tail_epsilon)

    pmf: Dict[int, float] = {}
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            degree_text, prob_text = chunk.split(":")
            degree = int(degree_text)
            prob = float(Fraction(prob_text.strip()))
        except (ValueError, ZeroDivisionError) as e:
            raise InvalidDistributionError(f"entrée de loi illisible : {chunk!r}") from e
        if degree in pmf:
            raise InvalidDistributionError(f"degré {degree} déclaré deux fois")
        pmf[degree] = prob
    return from_pmf(pmf, name="custom")


def _family_log_prob(family: Optional[str], params: Tuple[float, ...], degree: int) -> float:
    """log p_d pour les générateurs de queue connus."""
    if family == "geometric":
        return -(degree + 1) * math.log(2.0)
    if family == "poisson":
        return -1.0 - float(gammaln(degree + 1))
    if family == "gaussian":
        c_prime, log_theta, log_norm = params
        return degree * log_theta - c_prime * degree * degree - log_norm
    return -math.inf


def _truncated(
    name: str,
    family: str,
    params: Tuple[float, ...],
    tail_epsilon: float,
) -> OffspringDistribution:
    """Tronque une loi infinie à une masse de queue ≤ tail_epsilon puis renormalise."""
    if not 0.0 < tail_epsilon < 1e-3:
        raise InvalidDistributionError("tail_epsilon doit être dans (0, 1e-3)")

    log_terms = []
    for degree in range(_MAX_GENERATED_TERMS):
        value = _family_log_prob(family, params, degree)
        log_terms.append(value)
        if value < _LOG_FLOOR:
            break
    terms = np.exp(np.array(log_terms))

    # Masses de queue au-delà de chaque degré, sommées depuis la fin
    suffix = np.cumsum(terms[::-1])[::-1]
    tails = np.append(suffix[1:], 0.0)
    cutoff = int(np.flatnonzero(tails <= tail_epsilon)[0])

    kept = terms[: cutoff + 1]
    dropped = float(tails[cutoff])
    probs = kept / kept.sum()
    degrees = np.arange(cutoff + 1, dtype=np.int64)
    positive = probs > 0.0
    logger.debug(f"{name} tronquée au degré {cutoff} (masse abandonnée {dropped:.3e})")
    return OffspringDistribution(
        name=name,
        degrees=degrees[positive],
        probs=probs[positive],
        support_kind=SupportKind.UNBOUNDED,
        tail_epsilon=tail_epsilon,
        tail_family=family,
        tail_params=params,
        truncated_mass=dropped,
    )
