"""
Règles de motifs : suites T_n décrites par une petite formule en n.

Format "famille:expression", par exemple "chain:ceil(0.5*log2(n)+0.5)".
Familles :
- chain : chaîne de k nœuds (expression = taille)
- rary<r> : arbre r-aire complet (expression = hauteur), ex. "rary2:2"
- star : étoile de k nœuds
- pmin : témoin de p^min_k
- size : taille k seule (classes N_{S_k})
- tree : motif fixe, ex. "tree:2,0,0"
"""

from __future__ import annotations

import ast
import math
import operator
import re
from dataclasses import dataclass
from typing import Callable, Dict, Optional

from ..analysis.exact import pmin
from ..models.offspring import OffspringDistribution
from ..models.tree import PlaneTree, chain, complete_r_ary, parse_tree, star
from ..utils.constants import LARGE_PATTERN_RATIO
from ..utils.errors import ConfigError, InvalidTreeError
from ..utils.logger import get_logger

logger = get_logger("PATTERN")

_BINARY_OPERATORS: Dict[type, Callable[[float, float], float]] = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.FloorDiv: operator.floordiv,
    ast.Mod: operator.mod,
    ast.Pow: operator.pow,
}

_UNARY_OPERATORS: Dict[type, Callable[[float], float]] = {
    ast.UAdd: operator.pos,
    ast.USub: operator.neg,
}

_FUNCTIONS: Dict[str, Callable[..., float]] = {
    "log": math.log,
    "ln": math.log,
    "log2": math.log2,
    "log10": math.log10,
    "sqrt": math.sqrt,
    "exp": math.exp,
    "ceil": math.ceil,
    "floor": math.floor,
    "round": round,
    "min": min,
    "max": max,
    "abs": abs,
}

_CONSTANTS: Dict[str, float] = {"pi": math.pi, "e": math.e}

_RARY = re.compile(r"^rary(\d+)$")


class Expression:
    """
    Expression arithmétique en n, évaluée sur un arbre syntaxique filtré.

    Seuls les nombres, n, pi, e, les opérateurs arithmétiques et les
    fonctions de _FUNCTIONS sont acceptés.
    """

    def __init__(self, text: str):
        self.text = text.strip()
        try:
            self._tree = ast.parse(self.text, mode="eval")
        except SyntaxError as e:
            raise ConfigError(f"expression illisible : {text!r}") from e
        self._check(self._tree.body)

    def _check(self, node: ast.AST) -> None:
        if isinstance(node, ast.Constant):
            if not isinstance(node.value, (int, float)) or isinstance(node.value, bool):
                raise ConfigError(f"constante non numérique dans {self.text!r}")
        elif isinstance(node, ast.Name):
            if node.id != "n" and node.id not in _CONSTANTS:
                raise ConfigError(f"nom inconnu {node.id!r} dans {self.text!r}")
        elif isinstance(node, ast.BinOp):
            if type(node.op) not in _BINARY_OPERATORS:
                raise ConfigError(f"opérateur interdit dans {self.text!r}")
            self._check(node.left)
            self._check(node.right)
        elif isinstance(node, ast.UnaryOp):
            if type(node.op) not in _UNARY_OPERATORS:
                raise ConfigError(f"opérateur interdit dans {self.text!r}")
            self._check(node.operand)
        elif isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCTIONS or node.keywords:
                raise ConfigError(f"fonction interdite dans {self.text!r}")
            for argument in node.args:
                self._check(argument)
        else:
            raise ConfigError(f"construction interdite ({type(node).__name__}) dans {self.text!r}")

    def _eval(self, node: ast.AST, n: int) -> float:
        if isinstance(node, ast.Constant):
            return node.value
        if isinstance(node, ast.Name):
            return n if node.id == "n" else _CONSTANTS[node.id]
        if isinstance(node, ast.BinOp):
            return _BINARY_OPERATORS[type(node.op)](self._eval(node.left, n), self._eval(node.right, n))
        if isinstance(node, ast.UnaryOp):
            return _UNARY_OPERATORS[type(node.op)](self._eval(node.operand, n))
        assert isinstance(node, ast.Call)
        return _FUNCTIONS[node.func.id](*(self._eval(argument, n) for argument in node.args))

    def __call__(self, n: int) -> float:
        try:
            return self._eval(self._tree.body, n)
        except (ValueError, ZeroDivisionError, OverflowError) as e:
            raise ConfigError(f"évaluation impossible de {self.text!r} en n = {n} : {e}") from e

    def integer(self, n: int) -> int:
        """Valeur entière (arrondie vers le bas si l'expression n'est pas entière)."""
        return int(math.floor(self(n) + 1e-9))


@dataclass(frozen=True)
class PatternRule:
    """
    Règle n ↦ T_n.

    Attributes:
        family: "chain", "rary", "star", "pmin", "size" ou "tree"
        text: Texte d'origine
        r: Arité pour la famille rary
    """

    family: str
    text: str
    r: int = 0

    @property
    def expression(self) -> Optional[Expression]:
        if self.family == "tree":
            return None
        return Expression(self.text.split(":", 1)[1])

    def size_for(self, n: int) -> int:
        """Taille k_n du motif (ou de la classe) pour la taille d'hôte n."""
        if self.family == "tree":
            return self.fixed_tree().size
        value = self.expression.integer(n)
        if self.family == "rary":
            return complete_r_ary(self.r, value).size
        return value

    def fixed_tree(self) -> PlaneTree:
        try:
            return parse_tree(self.text.split(":", 1)[1])
        except InvalidTreeError as e:
            raise ConfigError(f"motif fixe invalide dans {self.text!r}") from e

    def pattern_for(self, n: int, dist: Optional[OffspringDistribution] = None) -> PlaneTree:
        """
        Motif T_n pour la taille d'hôte n.

        Raises:
            ConfigError: Famille sans motif (size) ou paramètre invalide
        """
        if self.family == "tree":
            pattern = self.fixed_tree()
        elif self.family == "size":
            raise ConfigError("la règle 'size' décrit une classe de taille, pas un motif")
        else:
            value = self.expression.integer(n)
            if value < 1:
                raise ConfigError(f"{self.text!r} donne {value} < 1 en n = {n}")
            if self.family == "chain":
                pattern = chain(value - 1)
            elif self.family == "rary":
                pattern = complete_r_ary(self.r, value)
            elif self.family == "star":
                pattern = star(value) if value >= 2 else PlaneTree([0])
            else:
                if dist is None:
                    raise ConfigError("la règle pmin exige la loi de reproduction")
                pattern = pmin(dist, value).tree
        if pattern.size / n > LARGE_PATTERN_RATIO:
            logger.warning(f"motif de taille {pattern.size} pour n = {n} : k_n/n > {LARGE_PATTERN_RATIO}")
        return pattern

    def is_large(self, n: int) -> bool:
        """k_n/n > 0.1 : la règle sort du régime k_n = o(n)."""
        return self.size_for(n) / n > LARGE_PATTERN_RATIO


def parse_pattern_rule(text: str) -> PatternRule:
    """
    Lit une règle "famille:expression".

    Raises:
        ConfigError: Famille inconnue ou expression invalide
    """
    if ":" not in text:
        raise ConfigError(f"règle de motif sans famille : {text!r}")
    family, body = text.split(":", 1)
    family = family.strip().lower()
    rule_text = f"{family}:{body.strip()}"
    rary = _RARY.match(family)
    if rary:
        r = int(rary.group(1))
        if r < 1:
            raise ConfigError("l'arité d'une règle rary doit être ≥ 1")
        rule = PatternRule(family="rary", text=rule_text, r=r)
    elif family in ("chain", "star", "pmin", "size", "tree"):
        rule = PatternRule(family=family, text=rule_text)
    else:
        raise ConfigError(f"famille de motif inconnue : {family!r}")
    if rule.family == "tree":
        rule.fixed_tree()
    else:
        Expression(body)
    return rule
