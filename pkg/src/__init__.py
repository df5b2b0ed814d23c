"""
Package principal de gwforest : arbres de Galton-Watson conditionnés.
Architecture en couches : modèles purs, échantillonnage, analyse exacte,
campagnes Monte Carlo, contrôleur CLI et vues de rapport.
"""

__version__ = "1.0.0"
__author__ = "gwforest Team"
