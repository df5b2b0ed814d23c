"""
Constantes globales de gwforest.
Définit les tolérances numériques, les plafonds de sécurité et les valeurs par défaut.
"""

# Tolérances sur les lois de reproduction
PMF_SUM_TOLERANCE: float = 1e-12      # Σ p_i = 1
CRITICALITY_TOLERANCE: float = 1e-9   # Σ i p_i = 1
DEFAULT_TAIL_EPSILON: float = 1e-15   # Masse de queue abandonnée (supports non bornés)
KAPPA_TOLERANCE: float = 1e-12        # Égalité L_{i+1} = L pour κ

# Calcul exact
UNDERFLOW_THRESHOLD: float = 1e-300   # Entrées de convolution mises à zéro
POISSON_TAIL_MASS: float = 1e-12      # Coupure de queue pour les pmf de Poisson
RELATIVE_TIE_TOLERANCE: float = 1e-12 # Égalités dans le DP de p^min (espace log)

# Plafonds de sécurité
MAX_ENUMERATION_SIZE: int = 20        # enumerate_trees / enumerate_possible
MAX_ORACLE_SIZE: int = 12             # Catalan(11) = 58 786 arbres
MAX_CENSUS_K_CAP: int = 16            # Collecte des clés pour K_n
MAX_PMIN_SIZE: int = 10_000
MAX_TREE_SIZE: int = 100_000_000      # complete_r_ary et constructeurs
MAX_CONVOLUTION_LENGTH: int = 50_000_000

# Échantillonnage
DEFAULT_MAX_REJECTIONS: int = 10_000_000
DEFAULT_SEED: int = 20240611
GUIDE_TABLE_SIZE: int = 256           # Table guide de l'inverse de la fonction de répartition

# Campagnes Monte Carlo
DEFAULT_K_CAP: int = 16
DEFAULT_WORKERS: int = 1
LARGE_PATTERN_RATIO: float = 0.1      # k_n / n au-delà duquel la règle est signalée
CONVOLUTION_REUSE_WINDOW: int = 32     # Pas unitaires tolérés depuis une table en cache
FFT_THRESHOLD: int = 4096              # Longueur à partir de laquelle la convolution passe par la FFT
