"""
Point d'entrée de gwforest.
Arbres de Galton-Watson conditionnés : échantillonnage, recensement de
sous-arbres, formules exactes et campagnes Monte Carlo.

Usage:
    python main.py sample --dist plane --n 1001 --count 100 --seed 42 --out trees.txt
    python main.py census --in trees.txt --pattern "1,0" --mode fringe --r 2 --kcap 12 --dist plane
    python main.py exact --dist motzkin --n 1001 --pattern "1,1,0" --mode nonfringe --what mean,var,fm2
    python main.py experiment --kind poisson --dist plane --n 10001 --pattern "chain:ceil(0.5*log2(n)+0.5)"
"""

import sys

from src.controllers.cli_controller import main

if __name__ == "__main__":
    sys.exit(main())
