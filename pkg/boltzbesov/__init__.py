"""BoltzBesov - Besov-space machinery and a desk-scale solver for non-cutoff Boltzmann."""

__version__ = "0.1.0"
