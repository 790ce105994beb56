"""Time integration, the linear Cauchy problem, Picard iteration and the run ledger."""
