"""Littlewood-Paley decomposition and Besov / Chemin-Lerner norms on a periodic lattice."""
