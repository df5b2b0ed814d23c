"""
Module de gestion de la configuration des campagnes.
Charge les valeurs par défaut depuis config.json, applique les surcharges
d'environnement (.env) puis celles de la ligne de commande.
"""

import json
import os
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

from .constants import (
    DEFAULT_K_CAP,
    DEFAULT_MAX_REJECTIONS,
    DEFAULT_SEED,
    DEFAULT_TAIL_EPSILON,
    DEFAULT_WORKERS,
    MAX_CENSUS_K_CAP,
)
from .enums import CountMode, ExperimentKind
from .errors import ConfigError
from .logger import get_logger

logger = get_logger("CONFIG MANAGER")

_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


@dataclass
class CampaignConfig:
    """
    Campagne nommée déclarée dans config.json.

    Attributes:
        name: Nom de la campagne
        kind: Type de campagne
        dist: Loi (nom intégré ou liste "i:p_i,...")
        n_values: Tailles n
        replicates: Répliques par taille
        pattern: Règle de motif ou de taille (poisson, sizeclass, nonfringe)
        r: Arité (heights)
        modes: Modes de hauteur (heights)
        d: Paramètre de la loi d-aire
    """

    name: str
    kind: ExperimentKind
    dist: str
    n_values: List[int]
    replicates: int
    pattern: Optional[str] = None
    r: Optional[int] = None
    modes: List[CountMode] = field(default_factory=lambda: [CountMode.FRINGE])
    d: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        """Entrée de config.json (mêmes clés qu'à la lecture, nom exclu)."""
        data = asdict(self)
        del data["name"]
        data["kind"] = self.kind.value
        data["n"] = data.pop("n_values")
        data["mode"] = [mode.value for mode in data.pop("modes")]
        return {key: value for key, value in data.items() if value is not None}


class ConfigManager:
    """
    Gère les paramètres par défaut des campagnes.

    Ordre de priorité : option de ligne de commande > variable d'environnement
    > config.json > valeurs par défaut de la classe. Une valeur invalide lève
    ConfigError ; elle n'est jamais corrigée en silence.

    Attributes:
        seed: Graine maîtresse
        workers: Nombre de processus
        max_rejections: Plafond d'essais du rejet
        tail_epsilon: Masse de queue abandonnée pour les lois non bornées
        k_cap: Plafond du calcul de K_n
        log_level: Niveau de journalisation
        output_dir: Répertoire des rapports
        campaigns: Campagnes nommées
        filename: Fichier de configuration
    """

    # Valeurs par défaut
    DEFAULT_SEED: int = DEFAULT_SEED
    DEFAULT_WORKERS: int = DEFAULT_WORKERS
    DEFAULT_MAX_REJECTIONS: int = DEFAULT_MAX_REJECTIONS
    DEFAULT_TAIL_EPSILON: float = DEFAULT_TAIL_EPSILON
    DEFAULT_K_CAP: int = DEFAULT_K_CAP
    DEFAULT_LOG_LEVEL: str = "INFO"
    DEFAULT_OUTPUT_DIR: str = "results"

    # Limites
    MIN_WORKERS: int = 1
    MAX_WORKERS: int = 256
    MIN_MAX_REJECTIONS: int = 1
    MIN_TAIL_EPSILON: float = 1e-300
    MAX_TAIL_EPSILON: float = 1e-3
    MIN_K_CAP: int = 1
    MAX_K_CAP: int = MAX_CENSUS_K_CAP
    MIN_REPLICATES: int = 1

    # Variables d'environnement
    ENV_PREFIX: str = "GWFOREST_"

    def __init__(self, filename: str = "config.json", use_env: bool = True) -> None:
        """
        Args:
            filename: Fichier de configuration (absent = valeurs par défaut)
            use_env: Applique les surcharges GWFOREST_* (et le fichier .env)

        Raises:
            ConfigError: Fichier illisible ou valeur invalide
        """
        self.filename: str = filename
        self.seed: int = self.DEFAULT_SEED
        self.workers: int = self.DEFAULT_WORKERS
        self.max_rejections: int = self.DEFAULT_MAX_REJECTIONS
        self.tail_epsilon: float = self.DEFAULT_TAIL_EPSILON
        self.k_cap: int = self.DEFAULT_K_CAP
        self.log_level: str = self.DEFAULT_LOG_LEVEL
        self.output_dir: str = self.DEFAULT_OUTPUT_DIR
        self.campaigns: Dict[str, CampaignConfig] = {}

        self.load_config()
        if use_env:
            self.apply_env()
        logger.debug(f"configuration : graine {self.seed}, {self.workers} processus, k_cap {self.k_cap}")

    # === Chargement / sauvegarde ===

    def load_config(self) -> bool:
        """
        Charge config.json.

        Returns:
            True si le fichier a été lu, False s'il est absent

        Raises:
            ConfigError: JSON invalide ou valeur hors limites
        """
        if not os.path.exists(self.filename):
            logger.debug(f"fichier {self.filename} introuvable, valeurs par défaut")
            return False
        try:
            with open(self.filename, "r", encoding="utf-8") as f:
                data: Dict[str, Any] = json.load(f)
        except (json.JSONDecodeError, OSError) as e:
            raise ConfigError(f"lecture de {self.filename} impossible : {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"{self.filename} doit contenir un objet JSON")

        self.update(data)
        self.campaigns = {}
        for name, raw in (data.get("campaigns") or {}).items():
            self.campaigns[name] = self._validate_campaign(name, raw)
        logger.debug(f"configuration chargée depuis {self.filename} ({len(self.campaigns)} campagne(s))")
        return True

    def save_config(self) -> bool:
        """
        Sauvegarde la configuration courante dans config.json.

        Returns:
            True si la sauvegarde a réussi, False sinon
        """
        data = self.get_config()
        data["campaigns"] = {name: campaign.to_dict() for name, campaign in self.campaigns.items()}
        try:
            with open(self.filename, "w", encoding="utf-8") as f:
                json.dump(data, f, indent=2, ensure_ascii=False)
        except OSError as e:
            logger.error(f"❌ sauvegarde de {self.filename} impossible : {e}")
            return False
        logger.info(f"✅ configuration sauvegardée dans {self.filename}")
        return True

    def get_config(self) -> Dict[str, Any]:
        """Paramètres scalaires courants."""
        return {
            "seed": self.seed,
            "workers": self.workers,
            "max_rejections": self.max_rejections,
            "tail_epsilon": self.tail_epsilon,
            "k_cap": self.k_cap,
            "log_level": self.log_level,
            "output_dir": self.output_dir,
        }

    # === Surcharges ===

    def apply_env(self) -> None:
        """Applique les variables GWFOREST_* (après lecture du fichier .env)."""
        load_dotenv()
        overrides: Dict[str, Any] = {}
        for key in self.get_config():
            value = os.getenv(self.ENV_PREFIX + key.upper())
            if value is not None and value != "":
                overrides[key] = value
        if overrides:
            logger.debug(f"surcharges d'environnement : {sorted(overrides)}")
            self.update(overrides)

    def update(self, values: Dict[str, Any]) -> None:
        """
        Applique des valeurs (fichier, environnement ou ligne de commande).

        Les clés absentes ou à None sont ignorées.

        Raises:
            ConfigError: Valeur invalide
        """
        if values.get("seed") is not None:
            self.seed = self._validate_seed(values["seed"])
        if values.get("workers") is not None:
            self.workers = self._validate_int("workers", values["workers"], self.MIN_WORKERS, self.MAX_WORKERS)
        if values.get("max_rejections") is not None:
            self.max_rejections = self._validate_int("max_rejections", values["max_rejections"], self.MIN_MAX_REJECTIONS)
        if values.get("tail_epsilon") is not None:
            self.tail_epsilon = self._validate_tail_epsilon(values["tail_epsilon"])
        if values.get("k_cap") is not None:
            self.k_cap = self._validate_int("k_cap", values["k_cap"], self.MIN_K_CAP, self.MAX_K_CAP)
        if values.get("log_level") is not None:
            self.log_level = self._validate_log_level(values["log_level"])
        if values.get("output_dir") is not None:
            self.output_dir = str(values["output_dir"])

    def get_campaign(self, name: str) -> CampaignConfig:
        """
        Raises:
            ConfigError: Campagne inconnue
        """
        try:
            return self.campaigns[name]
        except KeyError:
            raise ConfigError(f"campagne inconnue : {name!r} (disponibles : {sorted(self.campaigns)})") from None

    # === Validation ===

    def _validate_int(self, name: str, value: Any, minimum: int, maximum: Optional[int] = None) -> int:
        """Entier dans [minimum, maximum], sans troncature."""
        try:
            number = int(value)
        except (TypeError, ValueError):
            raise ConfigError(f"{name} doit être un entier (reçu {value!r})") from None
        if isinstance(value, float) and value != number:
            raise ConfigError(f"{name} doit être un entier (reçu {value!r})")
        if number < minimum or (maximum is not None and number > maximum):
            bound = f"[{minimum}, {maximum}]" if maximum is not None else f"≥ {minimum}"
            raise ConfigError(f"{name} = {number} hors limites {bound}")
        return number

    def _validate_seed(self, value: Any) -> int:
        return self._validate_int("seed", value, 0, (1 << 64) - 1)

    def _validate_tail_epsilon(self, value: Any) -> float:
        try:
            epsilon = float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"tail_epsilon doit être un réel (reçu {value!r})") from None
        if not self.MIN_TAIL_EPSILON <= epsilon <= self.MAX_TAIL_EPSILON:
            raise ConfigError(f"tail_epsilon = {epsilon} hors limites [{self.MIN_TAIL_EPSILON}, {self.MAX_TAIL_EPSILON}]")
        return epsilon

    def _validate_log_level(self, value: Any) -> str:
        level = str(value).upper()
        if level not in _LOG_LEVELS:
            raise ConfigError(f"log_level inconnu : {value!r} (attendu : {', '.join(_LOG_LEVELS)})")
        return level

    def _validate_campaign(self, name: str, raw: Any) -> CampaignConfig:
        """Valide une campagne ; les règles de motif sont vérifiées au lancement."""
        if not isinstance(raw, dict):
            raise ConfigError(f"campagne {name!r} : objet JSON attendu")
        try:
            kind = ExperimentKind(raw["kind"])
        except KeyError:
            raise ConfigError(f"campagne {name!r} : champ 'kind' manquant") from None
        except ValueError:
            raise ConfigError(f"campagne {name!r} : kind inconnu {raw['kind']!r}") from None
        if "dist" not in raw or "n" not in raw:
            raise ConfigError(f"campagne {name!r} : champs 'dist' et 'n' requis")

        n_values = raw["n"] if isinstance(raw["n"], list) else [raw["n"]]
        n_values = [self._validate_int(f"{name}.n", n, 1) for n in n_values]
        replicates = self._validate_int(f"{name}.replicates", raw.get("replicates", 100), self.MIN_REPLICATES)
        if kind in (ExperimentKind.POISSON, ExperimentKind.SIZE_CLASS, ExperimentKind.NONFRINGE) and not raw.get("pattern"):
            raise ConfigError(f"campagne {name!r} : 'pattern' requis pour kind={kind.value}")
        r = raw.get("r")
        if kind is ExperimentKind.HEIGHTS:
            if r is None:
                raise ConfigError(f"campagne {name!r} : 'r' requis pour kind=heights")
            r = self._validate_int(f"{name}.r", r, 1)
        raw_modes = raw.get("mode", "fringe")
        raw_modes = raw_modes if isinstance(raw_modes, list) else [raw_modes]
        try:
            modes = [CountMode(mode) for mode in raw_modes]
        except ValueError:
            raise ConfigError(f"campagne {name!r} : mode inconnu {raw_modes!r}") from None
        d = raw.get("d")
        return CampaignConfig(
            name=name,
            kind=kind,
            dist=str(raw["dist"]),
            n_values=n_values,
            replicates=replicates,
            pattern=raw.get("pattern"),
            r=r,
            modes=modes,
            d=None if d is None else self._validate_int(f"{name}.d", d, 2),
        )
