"""Maxwellian equilibrium, moments and the macro-micro decomposition."""
