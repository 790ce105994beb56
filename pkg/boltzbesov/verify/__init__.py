"""Fitted-constant verification of the functional inequalities.

Every check evaluates LHS / RHS-without-constant over a seeded random
family, reports the extreme ratio as the fitted constant, and compares the
constants across grid refinements.
"""
