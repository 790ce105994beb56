"""Test suite for BoltzBesov."""
