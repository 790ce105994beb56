"""Utility modules for BoltzBesov."""
